#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "phaselab/error.hpp"
#include "phaselab/harness.hpp"
#include "phaselab/parallel.hpp"
#include "phaselab/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitVerify = 4;

const char* kKinds[] = {"recover", "stability", "injectivity", "embed", "smallball", "chaos", "adversarial", "sweep"};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"phaselab: phaseless and rank-one measurement experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    std::string suite = "fast";

    for (const char* kind : kKinds) {
        auto* sub = app.add_subcommand(kind, std::string("run a ") + kind + " experiment");
        sub->add_option("--config", config_path, "JSON config file")->required();
        sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--out", out_dir, "output directory");
    }
    auto* verify_cmd = app.add_subcommand("verify", "run the acceptance suite");
    verify_cmd->add_option("--suite", suite, "fast or full")->check(CLI::IsMember({"fast", "full"}));
    verify_cmd->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    std::vector<int> only;
    verify_cmd->add_option("--criterion", only, "run only these criterion ids")->check(CLI::Range(1, 11));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }
    phaselab::set_thread_count(threads);

    try {
        if (verify_cmd->parsed()) {
            phaselab::VerifyReport report;
            if (only.empty()) {
                report = phaselab::verify(phaselab::suite_from_string(suite));
            } else {
                for (int id : only) report.criteria.push_back(phaselab::run_criterion(id));
            }
            for (const auto& c : report.criteria) std::cout << phaselab::format_line(c) << '\n';
            std::cout << (report.all_passed() ? "all criteria passed" : "verification failures present") << '\n';
            return report.all_passed() ? kExitOk : kExitVerify;
        }
        const std::string kind = app.get_subcommands().front()->get_name();
        phaselab::ExperimentConfig cfg;
        try {
            cfg = phaselab::load_config(config_path, phaselab::experiment_kind_from_string(kind));
        } catch (const phaselab::Error& e) {
            std::cerr << "config error: " << e.what() << '\n';
            return kExitConfig;
        }
        const std::filesystem::path dir = !out_dir.empty()             ? out_dir
                                          : !cfg.output_path.empty() ? cfg.output_path
                                                                     : ".";
        const auto result = phaselab::run(cfg, dir);
        std::cout << result.csv_path.string() << '\n' << result.summary.dump(2) << '\n';
        return kExitOk;
    } catch (const phaselab::Error& e) {
        std::cerr << "error (" << phaselab::to_string(e.code()) << "): " << e.what() << '\n';
        return e.code() == phaselab::ErrorCode::ConfigError ? kExitConfig : kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}
