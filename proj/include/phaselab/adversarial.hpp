#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phaselab/ensembles.hpp"
#include "phaselab/geometry.hpp"

namespace phaselab {

/// Noise z that makes a wrong target fit b = A(target_0) + z exactly.
struct AdversarialInstance {
    bool matrix = false;
    int ell = 2;  // vector case only
    double q = 2;
    Vector x0;
    Vector x_star;
    Matrix X0;
    Matrix X_star;
    RealVector z;
    double d_error = 0;  // d_ell(x_star, x0) or ||X_star - X0||_F
    double z_norm = 0;   // ||z||_q
    double ratio = 0;    // d_error * m^{1/q} / ||z||_q
    /// ||A(target_star) - (A(target_0) + z)||_q.
    double zero_residual = 0;
};

/// z = A^ell(x_star) - A^ell(x0). Throws EquivalentTargets when
/// d1(x0, x_star) < 1e-8 or the two targets give identical measurements.
AdversarialInstance make_phase_noise(const MeasurementMatrix& phi, int ell, const Vector& x0, const Vector& x_star,
                                     double q);

/// X_star = X0 + t ww^* with w normalized; z = A(X_star - X0).
/// Throws ZeroPerturbation when t = 0 or w = 0.
AdversarialInstance make_matrix_noise(const MeasurementMatrix& phi, const Matrix& X0, const Vector& w, double t,
                                      double q);

struct GammaEstimate {
    double value = 0;
    double std_error = 0;
};

/// Monte Carlo E| (|<phi,u>|^ell - |<phi,v>|^ell) / d_ell(u,v) |^q over
/// `trials` (>= 1e4) fresh measurement vectors.
GammaEstimate gamma_moment(const EnsembleSpec& spec, int ell, double q, const Vector& u, const Vector& v,
                           std::size_t trials, std::uint64_t seed);

struct SharpnessConfig {
    EnsembleSpec ensemble;  // n, m, law, root seed
    bool matrix = false;
    int ell = 2;
    double q = 2;
    std::size_t trials = 100;
};

struct SharpnessRow {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    int n = 0;
    int m = 0;
    double q = 0;
    std::string ell_or_matrix;
    double d_error = 0;
    double z_norm = 0;
    double ratio = 0;
    double zero_residual = 0;
};

struct SharpnessResult {
    std::vector<SharpnessRow> rows;  // trial order
    double q01 = 0;
    double q50 = 0;
    double q99 = 0;
    double max_relative_residual = 0;  // zero_residual / ||A(target_star)||_q
};

/// Per trial: fresh Phi, a random unit x0 and a random unit x_star with
/// d1(x0, x_star) >= 0.1 (matrix case: X0 = x0 x0^*, X_star = X0 + ww^*).
SharpnessResult sharpness_experiment(const SharpnessConfig& cfg);

}  // namespace phaselab
