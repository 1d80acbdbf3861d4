#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "phaselab/adversarial.hpp"
#include "phaselab/ensembles.hpp"
#include "phaselab/geometry.hpp"
#include "phaselab/solvers.hpp"
#include "phaselab/stability.hpp"

namespace phaselab {

enum class ExperimentKind { Recover, Stability, Injectivity, Embed, SmallBall, Chaos, Adversarial, Sweep };

std::string_view to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(std::string_view name);

/// Additive corruption of synthetic measurements.
struct NoiseModel {
    double gaussian_sigma = 0;
    /// Fraction of entries hit by a gross outlier.
    double outlier_fraction = 0;
    /// Outlier magnitude in units of mean |b|.
    double outlier_scale = 10;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Recover;
    EnsembleSpec ensemble;
    std::optional<VectorSetDescriptor> vector_set;
    std::optional<MatrixSetDescriptor> matrix_set;
    std::optional<SolverConfig> solver;
    std::size_t trials = 1;
    std::string output_path;
    std::vector<double> oversample_factors;

    int ell = 2;
    double q = 2;
    std::vector<double> p_values{0.5, 1.0};
    double xi = 0.5;
    ChaosVariant variant = ChaosVariant::Stilde;
    std::size_t pairs = 1000;
    std::size_t inner_samples = 200;
    std::size_t mc_trials = 1000;
    NoiseModel noise;
    double success_threshold = 1e-2;

    /// Kind-specific required fields; throws ConfigError.
    void validate() const;
};

/// Parses a config document. `kind_override` (from the CLI) wins over a
/// "kind" field in the document.
ExperimentConfig parse_config(const nlohmann::json& doc, std::optional<ExperimentKind> kind_override = {});
ExperimentConfig load_config(const std::filesystem::path& path, std::optional<ExperimentKind> kind_override = {});

struct RecoveryTrial {
    double relative_error = 0;  // d2 / ||x0||^2 or ||X - X0||_F / ||X0||_F
    double objective = 0;
    int iterations = 0;
    bool success = false;
};

/// b = A^ell(x0) + noise with x0 a random unit member of the set. The trial
/// seed drives Phi, x0, the noise and the solver restarts.
RecoveryTrial run_vector_recovery(const EnsembleSpec& ensemble, const VectorSetDescriptor& set, int ell,
                                  const SolverConfig& solver, const NoiseModel& noise, std::uint64_t trial_seed,
                                  double success_threshold);

/// b = A(X0) + noise with X0 a random PSD member of the set of unit
/// Frobenius norm.
RecoveryTrial run_matrix_recovery(const EnsembleSpec& ensemble, const MatrixSetDescriptor& set,
                                  const SolverConfig& solver, const NoiseModel& noise, std::uint64_t trial_seed,
                                  double success_threshold);

/// Measurement count for an oversample factor: ceil(factor * budget).
int oversampled_m(double factor, double budget);

struct RunResult {
    std::filesystem::path csv_path;
    std::filesystem::path summary_path;
    std::filesystem::path metadata_path;
    nlohmann::json summary;
};

/// Writes <kind>.csv, <kind>_summary.json and <kind>_metadata.json (the only
/// file with wall-clock content) under out_dir.
RunResult run(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace phaselab
