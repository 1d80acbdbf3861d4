#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "phaselab/ensembles.hpp"
#include "phaselab/geometry.hpp"

namespace phaselab {

enum class InitKind { Spectral, Random, Provided };

struct SolverConfig {
    double q = 2.0;
    int max_iters = 3000;
    /// Multiplier on the Polyak-type step ||r||_q / ||grad||^2.
    double step0 = 1.0;
    double step_decay = 0.999;
    int restarts = 5;
    /// Relative best-objective improvement required over a 50-iteration window.
    double tol = 1e-7;
    InitKind init = InitKind::Spectral;
    std::optional<Vector> provided_vector;
    std::optional<Matrix> provided_matrix;
    /// Root of the per-restart RNG streams.
    std::uint64_t seed = 0;

    /// ConfigError unless 1 <= q < inf, tol > 0, restarts >= 1, step0 > 0,
    /// step_decay in (0, 1], and a Provided init carries its value.
    void validate() const;
};

void to_json(nlohmann::json& j, const SolverConfig& cfg);
void from_json(const nlohmann::json& j, SolverConfig& cfg);

struct SolverStats {
    double objective_initial = 0;  // winning restart, at its initial iterate
    double objective_final = 0;
    int iterations_used = 0;
    int restart_index = 0;
    /// Best-so-far objective per iteration of the winning restart (index 0 is
    /// the initial iterate).
    std::vector<double> best_history;
    /// Objective of every restart, in restart order.
    std::vector<double> restart_objectives;
    bool zero_information = false;
};

struct PhaseReport : SolverStats {
    Vector estimate;
    /// Position of the estimate within a Finite set.
    std::optional<std::size_t> member_index;
    std::optional<double> d1_error;
    std::optional<double> d2_error;
};

struct MatrixReport : SolverStats {
    Matrix estimate;
    std::optional<double> frobenius_error;
};

void to_json(nlohmann::json& j, const PhaseReport& r);
void to_json(nlohmann::json& j, const MatrixReport& r);

/// ||v||_q for finite q >= 1, computed with max-abs scaling.
double lq_norm(const RealVector& v, double q);

/// ||A^ell(x) - b||_q.
double phase_objective(const MeasurementMatrix& phi, int ell, const Vector& x, const RealVector& b, double q);
/// ||A(X) - b||_q with A(X)_k = phi_k^* X phi_k.
double matrix_objective(const MeasurementMatrix& phi, const Matrix& x, const RealVector& b, double q);

struct SpectralInit {
    Vector estimate;
    bool zero_information = false;
};

/// Top eigenvector of (1/m) sum w_k phi_k phi_k^* (w = b for ell = 2, b^2 for
/// ell = 1), scaled so ||x||^2 equals mean(w). With all weights zero the unit
/// first eigenvector is returned and zero_information is set.
SpectralInit spectral_init(const MeasurementMatrix& phi, const RealVector& b, int ell);

/// Set-aware variant used by solve_phase: Sparse sets restrict the spectral
/// problem to the s coordinates with the largest weighted energy, Finite sets
/// project the result onto the set.
SpectralInit spectral_init(const MeasurementMatrix& phi, const RealVector& b, int ell,
                           const VectorSetDescriptor& set);

/// Moment-matched estimate of X from b = A(X): ((1/m) sum b_k phi_k phi_k^* -
/// mean(b) I) / c with c = 2 (real) or 1 (complex), projected onto the set.
Matrix spectral_init_matrix(const MeasurementMatrix& phi, const RealVector& b, const MatrixSetDescriptor& set);

/// Projected subgradient on ||A^ell(x) - b||_q over x in T, best of restarts.
PhaseReport solve_phase(int ell, const MeasurementMatrix& phi, const RealVector& b, const VectorSetDescriptor& set,
                        const SolverConfig& cfg, const std::optional<Vector>& truth = std::nullopt);

/// Projected subgradient on ||A(X) - b||_q over X in M, best of restarts.
MatrixReport solve_matrix(const MeasurementMatrix& phi, const RealVector& b, const MatrixSetDescriptor& set,
                          const SolverConfig& cfg, const std::optional<Matrix>& truth = std::nullopt);

/// Exact minimizer over the members of a finite set; lowest index on ties.
PhaseReport solve_finite_oracle(int ell, const MeasurementMatrix& phi, const RealVector& b, const FiniteSet& set,
                                double q, const std::optional<Vector>& truth = std::nullopt);

}  // namespace phaselab
