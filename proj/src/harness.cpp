#include "phaselab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

#include "phaselab/csv.hpp"
#include "phaselab/error.hpp"
#include "phaselab/parallel.hpp"

namespace phaselab {

namespace {

constexpr std::uint64_t kCertificateStream = 0x63657274ULL;

bool is_vector_set_kind(const std::string& kind) {
    return kind == "full" || kind == "sparse" || kind == "finite";
}

double median(std::vector<double> values) { return nearest_rank_quantile(std::move(values), 0.5); }

void apply_noise(RealVector& b, const NoiseModel& noise, Rng& rng) {
    std::normal_distribution<double> normal;
    if (noise.gaussian_sigma > 0) {
        for (Eigen::Index k = 0; k < b.size(); ++k) b[k] += noise.gaussian_sigma * normal(rng);
    }
    if (noise.outlier_fraction > 0) {
        const int m = static_cast<int>(b.size());
        const int count = std::clamp(static_cast<int>(std::lround(noise.outlier_fraction * m)), 0, m);
        const double magnitude = noise.outlier_scale * b.cwiseAbs().mean();
        std::bernoulli_distribution coin(0.5);
        for (int k : random_support(m, count, rng)) b[k] += coin(rng) ? magnitude : -magnitude;
    }
}

Matrix psd_member(const MatrixSetDescriptor& set, Field field, Rng& rng) {
    const int n = set.dim();
    int rank = n;
    std::vector<int> support(static_cast<std::size_t>(n));
    std::iota(support.begin(), support.end(), 0);
    if (const auto* lr = std::get_if<LowRank>(&set.set)) rank = lr->rank;
    if (const auto* slr = std::get_if<SparseLowRank>(&set.set)) {
        rank = slr->rank;
        support = random_support(n, slr->s, rng);
    }
    Matrix x = Matrix::Zero(n, n);
    for (int r = 0; r < rank; ++r) {
        const Vector g = gaussian_vector(static_cast<int>(support.size()), field, rng);
        Vector v = Vector::Zero(n);
        for (std::size_t i = 0; i < support.size(); ++i) v[support[i]] = g[static_cast<Eigen::Index>(i)];
        x += v * v.adjoint();
    }
    return x / x.norm();
}

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

struct Outputs {
    std::ofstream csv;
    RunResult result;
};

Outputs open_outputs(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + out_dir.string() + ": " + ec.message());
    Outputs o;
    const std::string stem(to_string(cfg.kind));
    o.result.csv_path = out_dir / (stem + ".csv");
    o.result.summary_path = out_dir / (stem + "_summary.json");
    o.result.metadata_path = out_dir / (stem + "_metadata.json");
    o.csv.open(o.result.csv_path, std::ios::binary);
    if (!o.csv) throw Error(ErrorCode::IoError, "cannot write " + o.result.csv_path.string());
    return o;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << j.dump(2) << '\n';
}

/// m values to visit: one per oversample factor, or the ensemble's m.
std::vector<std::pair<double, int>> m_schedule(const ExperimentConfig& cfg, double budget) {
    std::vector<std::pair<double, int>> out;
    if (cfg.oversample_factors.empty()) {
        out.emplace_back(0.0, cfg.ensemble.m);
    } else {
        for (double f : cfg.oversample_factors) out.emplace_back(f, oversampled_m(f, budget));
    }
    return out;
}

const std::vector<std::string> kCertificateColumns{"experiment", "descriptor", "m",      "q",       "ell_or_p",
                                                   "statistic",  "q01",        "q50",    "q99",     "trials",
                                                   "seed"};

void certificate_row(CsvWriter& w, const std::string& experiment, const std::string& descriptor, int m, double q,
                     const CsvField& ell_or_p, const CertificateEstimate& c) {
    w.write_row({experiment, descriptor, std::int64_t{m}, q, ell_or_p, c.statistic, c.q01, c.q50, c.q99,
                 std::uint64_t{c.trials}, c.seed});
}

std::string variant_name(ChaosVariant v) {
    switch (v) {
        case ChaosVariant::S: return "S";
        case ChaosVariant::Sbar: return "Sbar";
        case ChaosVariant::Stilde: return "Stilde";
    }
    return "?";
}

EnsembleSpec trial_ensemble(const ExperimentConfig& cfg, int n, int m, std::size_t t) {
    EnsembleSpec spec = cfg.ensemble;
    spec.n = n;
    spec.m = m;
    spec.seed = derive_seed(cfg.ensemble.seed, t);
    return spec;
}

std::uint64_t certificate_seed(const ExperimentConfig& cfg, std::size_t t) {
    return derive_seed(derive_seed(cfg.ensemble.seed, kCertificateStream), t);
}

nlohmann::json run_recover(const ExperimentConfig& cfg, CsvWriter& w) {
    w.write_header({"trial", "seed", "n", "m", "q", "ell_or_matrix", "objective", "relative_error", "iterations",
                    "success"});
    std::vector<RecoveryTrial> trials(cfg.trials);
    const bool matrix = cfg.matrix_set.has_value();
    parallel_for(cfg.trials, [&](std::size_t t) {
        const std::uint64_t seed = derive_seed(cfg.ensemble.seed, t);
        trials[t] = matrix ? run_matrix_recovery(cfg.ensemble, *cfg.matrix_set, *cfg.solver, cfg.noise, seed,
                                                 cfg.success_threshold)
                           : run_vector_recovery(cfg.ensemble, *cfg.vector_set, cfg.ell, *cfg.solver, cfg.noise,
                                                 seed, cfg.success_threshold);
    });
    std::vector<double> errors;
    std::size_t successes = 0;
    const int n = matrix ? cfg.matrix_set->dim() : cfg.vector_set->dim();
    for (std::size_t t = 0; t < trials.size(); ++t) {
        const auto& r = trials[t];
        w.write_row({std::uint64_t{t}, derive_seed(cfg.ensemble.seed, t), std::int64_t{n},
                     std::int64_t{cfg.ensemble.m}, cfg.solver->q,
                     matrix ? std::string("matrix") : std::to_string(cfg.ell), r.objective, r.relative_error,
                     std::int64_t{r.iterations}, std::int64_t{r.success ? 1 : 0}});
        errors.push_back(r.relative_error);
        successes += r.success ? 1 : 0;
    }
    return {{"success_rate", double(successes) / double(trials.size())}, {"median_error", median(errors)}};
}

nlohmann::json run_sweep(const ExperimentConfig& cfg, CsvWriter& w) {
    w.write_header({"experiment", "descriptor", "oversample", "m", "trials", "success_rate", "median_error", "seed"});
    const bool matrix = cfg.matrix_set.has_value();
    const double budget = matrix ? matrix_budget(*cfg.matrix_set).m_budget
                                 : std::pow(gamma2_budget(*cfg.vector_set), 2.0);
    const std::string descriptor = matrix ? cfg.matrix_set->describe() : cfg.vector_set->describe();
    nlohmann::json points = nlohmann::json::array();
    for (const auto& [factor, m] : m_schedule(cfg, budget)) {
        EnsembleSpec ensemble = cfg.ensemble;
        ensemble.m = m;
        std::vector<RecoveryTrial> trials(cfg.trials);
        parallel_for(cfg.trials, [&](std::size_t t) {
            const std::uint64_t seed = derive_seed(cfg.ensemble.seed, t);
            trials[t] = matrix ? run_matrix_recovery(ensemble, *cfg.matrix_set, *cfg.solver, cfg.noise, seed,
                                                     cfg.success_threshold)
                               : run_vector_recovery(ensemble, *cfg.vector_set, cfg.ell, *cfg.solver, cfg.noise, seed,
                                                     cfg.success_threshold);
        });
        std::vector<double> errors;
        std::size_t successes = 0;
        for (const auto& r : trials) {
            errors.push_back(r.relative_error);
            successes += r.success ? 1 : 0;
        }
        const double rate = double(successes) / double(trials.size());
        w.write_row({std::string("sweep"), descriptor, factor, std::int64_t{m}, std::uint64_t{cfg.trials}, rate,
                     median(errors), cfg.ensemble.seed});
        points.push_back({{"oversample", factor}, {"m", m}, {"success_rate", rate}, {"median_error", median(errors)}});
    }
    return {{"points", points}};
}

/// Shared driver for certificate kinds: one row per (m, repetition, label).
template <class Body>
nlohmann::json run_certificates(const ExperimentConfig& cfg, CsvWriter& w, double budget, Body&& body) {
    w.write_header(kCertificateColumns);
    nlohmann::json points = nlohmann::json::array();
    for (const auto& [factor, m] : m_schedule(cfg, budget)) {
        std::vector<std::vector<std::pair<std::string, CertificateEstimate>>> results(cfg.trials);
        std::vector<CsvField> params(cfg.trials);
        parallel_for(cfg.trials, [&](std::size_t t) { results[t] = body(m, t); });
        std::map<std::string, std::vector<double>> by_label;
        for (const auto& rows : results) {
            for (const auto& [label, cert] : rows) by_label[label].push_back(cert.statistic);
        }
        for (std::size_t t = 0; t < results.size(); ++t) {
            for (const auto& [label, cert] : results[t]) {
                const auto sep = label.find('|');
                certificate_row(w, std::string(to_string(cfg.kind)) + ":" + label.substr(0, sep),
                                cfg.vector_set ? cfg.vector_set->describe() : cfg.matrix_set->describe(), m, cfg.q,
                                sep == std::string::npos ? CsvField{std::string()} : CsvField{label.substr(sep + 1)},
                                cert);
            }
        }
        nlohmann::json medians;
        for (const auto& [label, stats] : by_label) medians[label] = median(stats);
        points.push_back({{"oversample", factor}, {"m", m}, {"median_statistic", medians}});
    }
    return {{"points", points}};
}

nlohmann::json run_adversarial(const ExperimentConfig& cfg, CsvWriter& w) {
    SharpnessConfig sc;
    sc.ensemble = cfg.ensemble;
    sc.matrix = cfg.matrix_set.has_value() || cfg.ell == 0;
    sc.ell = cfg.ell;
    sc.q = cfg.q;
    sc.trials = cfg.trials;
    const SharpnessResult res = sharpness_experiment(sc);
    w.write_header({"trial", "seed", "n", "m", "q", "ell_or_matrix", "d_error", "z_norm_q", "ratio"});
    for (const auto& r : res.rows) {
        w.write_row({std::to_string(r.trial), r.seed, std::int64_t{r.n}, std::int64_t{r.m}, r.q, r.ell_or_matrix,
                     r.d_error, r.z_norm, r.ratio});
    }
    const std::string tag = sc.matrix ? "matrix" : std::to_string(sc.ell);
    for (const auto& [name, value] : {std::pair{"q01", res.q01}, {"q50", res.q50}, {"q99", res.q99}}) {
        w.write_row({std::string(name), std::string(), std::int64_t{cfg.ensemble.n}, std::int64_t{cfg.ensemble.m},
                     cfg.q, tag, std::string(), std::string(), value});
    }
    return {{"q01", res.q01},
            {"q50", res.q50},
            {"q99", res.q99},
            {"max_relative_residual", res.max_relative_residual}};
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Recover: return "recover";
        case ExperimentKind::Stability: return "stability";
        case ExperimentKind::Injectivity: return "injectivity";
        case ExperimentKind::Embed: return "embed";
        case ExperimentKind::SmallBall: return "smallball";
        case ExperimentKind::Chaos: return "chaos";
        case ExperimentKind::Adversarial: return "adversarial";
        case ExperimentKind::Sweep: return "sweep";
    }
    return "unknown";
}

ExperimentKind experiment_kind_from_string(std::string_view name) {
    for (auto kind : {ExperimentKind::Recover, ExperimentKind::Stability, ExperimentKind::Injectivity,
                      ExperimentKind::Embed, ExperimentKind::SmallBall, ExperimentKind::Chaos,
                      ExperimentKind::Adversarial, ExperimentKind::Sweep}) {
        if (to_string(kind) == name) return kind;
    }
    throw Error(ErrorCode::ConfigError, "unknown experiment kind '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
    auto need = [&](bool ok, const char* what) {
        if (!ok) throw Error(ErrorCode::ConfigError, std::string(to_string(kind)) + " requires " + what);
    };
    need(q >= 1.0, "q >= 1");
    need(std::isfinite(q), "a finite q");
    need(trials >= 1, "trials >= 1");
    need(ell == 1 || ell == 2 || (kind == ExperimentKind::Adversarial && ell == 0), "ell in {1, 2}");
    if (vector_set) {
        vector_set->validate();
        need(vector_set->dim() == ensemble.n || kind == ExperimentKind::Sweep || kind == ExperimentKind::Recover ||
                 kind == ExperimentKind::Stability || kind == ExperimentKind::Embed,
             "set dimension equal to ensemble n");
    }
    if (matrix_set) matrix_set->validate();
    switch (kind) {
        case ExperimentKind::Recover:
            need(vector_set || matrix_set, "a set");
            need(solver.has_value(), "a solver section");
            break;
        case ExperimentKind::Sweep:
            need(vector_set || matrix_set, "a set");
            need(solver.has_value(), "a solver section");
            need(!oversample_factors.empty(), "oversample_factors");
            break;
        case ExperimentKind::Stability:
        case ExperimentKind::Embed: need(vector_set.has_value(), "a vector set"); break;
        case ExperimentKind::Injectivity:
        case ExperimentKind::SmallBall:
        case ExperimentKind::Chaos: need(matrix_set.has_value(), "a matrix set"); break;
        case ExperimentKind::Adversarial: break;
    }
    if (solver) solver->validate();
    for (double p : p_values) need(p >= 0.5 && p <= 1.0, "p in [1/2, 1]");
    for (double f : oversample_factors) need(f > 0, "positive oversample factors");
}

ExperimentConfig parse_config(const nlohmann::json& doc, std::optional<ExperimentKind> kind_override) {
    ExperimentConfig cfg;
    try {
        if (kind_override) {
            cfg.kind = *kind_override;
        } else {
            cfg.kind = experiment_kind_from_string(doc.at("kind").get<std::string>());
        }
        if (!doc.contains("ensemble")) throw Error(ErrorCode::ConfigError, "missing 'ensemble' section");
        cfg.ensemble = doc.at("ensemble").get<EnsembleSpec>();
        if (doc.contains("set")) {
            const auto& s = doc.at("set");
            if (is_vector_set_kind(s.at("kind").get<std::string>())) {
                cfg.vector_set = s.get<VectorSetDescriptor>();
            } else {
                cfg.matrix_set = s.get<MatrixSetDescriptor>();
            }
        }
        if (doc.contains("solver")) cfg.solver = doc.at("solver").get<SolverConfig>();
        cfg.trials = doc.value("trials", cfg.trials);
        cfg.output_path = doc.value("output_path", cfg.output_path);
        cfg.oversample_factors = doc.value("oversample_factors", cfg.oversample_factors);
        cfg.ell = doc.value("ell", cfg.ell);
        cfg.q = doc.value("q", cfg.q);
        if (doc.contains("matrix") && doc.at("matrix").get<bool>()) cfg.ell = 0;
        if (doc.contains("p")) {
            const auto& p = doc.at("p");
            cfg.p_values = p.is_array() ? p.get<std::vector<double>>() : std::vector<double>{p.get<double>()};
        }
        cfg.xi = doc.value("xi", cfg.xi);
        const std::string variant = doc.value("variant", std::string("Stilde"));
        if (variant == "S") {
            cfg.variant = ChaosVariant::S;
        } else if (variant == "Sbar") {
            cfg.variant = ChaosVariant::Sbar;
        } else if (variant == "Stilde") {
            cfg.variant = ChaosVariant::Stilde;
        } else {
            throw Error(ErrorCode::ConfigError, "variant must be S, Sbar or Stilde");
        }
        cfg.pairs = doc.value("pairs", cfg.pairs);
        cfg.inner_samples = doc.value("inner_samples", cfg.inner_samples);
        cfg.mc_trials = doc.value("mc_trials", cfg.mc_trials);
        cfg.success_threshold = doc.value("success_threshold", cfg.success_threshold);
        if (doc.contains("noise")) {
            const auto& nz = doc.at("noise");
            cfg.noise.gaussian_sigma = nz.value("gaussian_sigma", 0.0);
            cfg.noise.outlier_fraction = nz.value("outlier_fraction", 0.0);
            cfg.noise.outlier_scale = nz.value("outlier_scale", cfg.noise.outlier_scale);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigError, e.what());
    }
    // The q of the solver section governs recovery runs.
    if (cfg.solver && !doc.contains("q")) cfg.q = cfg.solver->q;
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, std::optional<ExperimentKind> kind_override) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot read config " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("invalid JSON in ") + path.string() + ": " + e.what());
    }
    return parse_config(doc, kind_override);
}

int oversampled_m(double factor, double budget) {
    return std::max(1, static_cast<int>(std::ceil(factor * budget - 1e-9)));
}

RecoveryTrial run_vector_recovery(const EnsembleSpec& ensemble, const VectorSetDescriptor& set, int ell,
                                  const SolverConfig& solver, const NoiseModel& noise, std::uint64_t trial_seed,
                                  double success_threshold) {
    EnsembleSpec spec = ensemble;
    spec.n = set.dim();
    spec.seed = derive_seed(trial_seed, 1);
    const MeasurementMatrix phi = sample_ensemble(spec);
    Rng rng = make_rng(trial_seed, 2);
    Vector x0;
    if (const auto* finite = std::get_if<FiniteSet>(&set.set)) {
        std::uniform_int_distribution<std::size_t> pick(0, finite->members.size() - 1);
        x0 = finite->members[pick(rng)];
    } else {
        x0 = sample_cone_sphere(set, spec.field, rng);
    }
    RealVector b = phaseless_op(phi, x0, ell);
    apply_noise(b, noise, rng);
    SolverConfig cfg = solver;
    cfg.seed = derive_seed(trial_seed, 3);
    const PhaseReport report = solve_phase(ell, phi, b, set, cfg, x0);
    RecoveryTrial out;
    out.relative_error = *report.d2_error / x0.squaredNorm();
    out.objective = report.objective_final;
    out.iterations = report.iterations_used;
    out.success = out.relative_error < success_threshold;
    return out;
}

RecoveryTrial run_matrix_recovery(const EnsembleSpec& ensemble, const MatrixSetDescriptor& set,
                                  const SolverConfig& solver, const NoiseModel& noise, std::uint64_t trial_seed,
                                  double success_threshold) {
    EnsembleSpec spec = ensemble;
    spec.n = set.dim();
    spec.seed = derive_seed(trial_seed, 1);
    const MeasurementMatrix phi = sample_ensemble(spec);
    Rng rng = make_rng(trial_seed, 2);
    const Matrix x0 = psd_member(set, spec.field, rng);
    RealVector b = rank_one_op(phi, x0);
    apply_noise(b, noise, rng);
    SolverConfig cfg = solver;
    cfg.seed = derive_seed(trial_seed, 3);
    const MatrixReport report = solve_matrix(phi, b, set, cfg, x0);
    RecoveryTrial out;
    out.relative_error = *report.frobenius_error / x0.norm();
    out.objective = report.objective_final;
    out.iterations = report.iterations_used;
    out.success = out.relative_error < success_threshold;
    return out;
}

RunResult run(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
    cfg.validate();
    Outputs out = open_outputs(cfg, out_dir);
    CsvWriter w(out.csv);
    nlohmann::json summary;
    switch (cfg.kind) {
        case ExperimentKind::Recover: summary = run_recover(cfg, w); break;
        case ExperimentKind::Sweep: summary = run_sweep(cfg, w); break;
        case ExperimentKind::Adversarial: summary = run_adversarial(cfg, w); break;
        case ExperimentKind::Stability: {
            const VectorSetDescriptor& set = *cfg.vector_set;
            summary = run_certificates(cfg, w, std::pow(gamma2_budget(set), 2.0), [&](int m, std::size_t t) {
                const MeasurementMatrix phi = sample_ensemble(trial_ensemble(cfg, set.dim(), m, t));
                const auto c = stability_constant_lower(phi, set, cfg.ell, cfg.q, cfg.pairs, certificate_seed(cfg, t));
                return std::vector<std::pair<std::string, CertificateEstimate>>{
                    {"StabilityLower|" + std::to_string(cfg.ell), c}};
            });
            break;
        }
        case ExperimentKind::Injectivity: {
            const MatrixSetDescriptor& set = *cfg.matrix_set;
            summary = run_certificates(cfg, w, matrix_budget(set).m_budget, [&](int m, std::size_t t) {
                const MeasurementMatrix phi = sample_ensemble(trial_ensemble(cfg, set.dim(), m, t));
                const auto c = injectivity_constant_lower(phi, set, cfg.q, cfg.pairs, certificate_seed(cfg, t));
                return std::vector<std::pair<std::string, CertificateEstimate>>{{"InjectivityLower", c}};
            });
            break;
        }
        case ExperimentKind::Embed: {
            const VectorSetDescriptor& set = *cfg.vector_set;
            summary = run_certificates(cfg, w, std::pow(gamma2_budget(set), 2.0), [&](int m, std::size_t t) {
                const MeasurementMatrix phi = sample_ensemble(trial_ensemble(cfg, set.dim(), m, t));
                std::vector<std::pair<std::string, CertificateEstimate>> rows;
                for (double p : cfg.p_values) {
                    const EmbedBounds b = embed_bounds(phi, p, set, set, cfg.pairs, certificate_seed(cfg, t));
                    rows.emplace_back("EmbedLower|" + format_double(p), b.lower);
                    rows.emplace_back("EmbedUpper|" + format_double(p), b.upper);
                }
                return rows;
            });
            break;
        }
        case ExperimentKind::SmallBall: {
            const MatrixSetDescriptor& set = *cfg.matrix_set;
            summary = run_certificates(cfg, w, matrix_budget(set).m_budget, [&](int, std::size_t t) {
                const auto c = small_ball_Q(trial_ensemble(cfg, set.dim(), cfg.ensemble.m, t), set, cfg.xi,
                                            cfg.mc_trials, cfg.inner_samples, certificate_seed(cfg, t));
                return std::vector<std::pair<std::string, CertificateEstimate>>{
                    {"SmallBallQ|" + format_double(cfg.xi), c}};
            });
            break;
        }
        case ExperimentKind::Chaos: {
            const MatrixSetDescriptor& set = *cfg.matrix_set;
            summary = run_certificates(cfg, w, matrix_budget(set).m_budget, [&](int m, std::size_t t) {
                const auto c = chaos_S(trial_ensemble(cfg, set.dim(), m, t), set, m, cfg.variant, cfg.mc_trials,
                                       cfg.inner_samples, certificate_seed(cfg, t));
                return std::vector<std::pair<std::string, CertificateEstimate>>{
                    {"ChaosS|" + variant_name(cfg.variant), c}};
            });
            for (auto& point : summary["points"]) {
                const BoundComparison b = bound_compare(set, point["m"].get<int>());
                point["bound_K33"] = b.bound_K33;
                point["bound_K44"] = b.bound_K44;
                point["R0"] = b.R0;
            }
            break;
        }
    }
    out.csv.close();
    if (!out.csv) throw Error(ErrorCode::IoError, "failed writing " + out.result.csv_path.string());
    summary["kind"] = std::string(to_string(cfg.kind));
    out.result.summary = summary;
    write_json(out.result.summary_path, summary);
    write_json(out.result.metadata_path,
               {{"kind", std::string(to_string(cfg.kind))}, {"timestamp", timestamp_utc()}, {"threads", thread_count()}});
    return out.result;
}

}  // namespace phaselab
