#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "phaselab/adversarial.hpp"
#include "phaselab/error.hpp"
#include "phaselab/stability.hpp"

using namespace phaselab;

namespace {

EnsembleSpec gaussian(Field f, int n, int m, std::uint64_t seed) {
    EnsembleSpec s;
    s.field = f;
    s.n = n;
    s.m = m;
    s.seed = seed;
    return s;
}

double k_proxy() { return estimate_moments(gaussian(Field::Real, 1, 1, 99), 100000).psi2_proxy; }

std::size_t count_at_least(const SharpnessResult& r, double floor) {
    return static_cast<std::size_t>(
        std::count_if(r.rows.begin(), r.rows.end(), [&](const SharpnessRow& row) { return row.ratio >= floor; }));
}

}  // namespace

TEST(PhaseNoise, ScaledTarget) {
    const MeasurementMatrix phi = sample_ensemble(gaussian(Field::Complex, 6, 30, 1));
    Rng rng = make_rng(1, 0);
    const Vector x0 = gaussian_vector(6, Field::Complex, rng);
    const AdversarialInstance inst = make_phase_noise(phi, 2, x0, 2.0 * x0, 2.0);
    EXPECT_LT((inst.z - 3.0 * intensity_op(phi, x0)).cwiseAbs().maxCoeff(), 1e-12 * inst.z.cwiseAbs().maxCoeff());
    EXPECT_LE(inst.zero_residual, 1e-12 * inst.z_norm);
}

TEST(PhaseNoise, EquivalentTargetsRejected) {
    const MeasurementMatrix phi = sample_ensemble(gaussian(Field::Complex, 4, 10, 2));
    const Vector x0 = Vector::Unit(4, 1);
    for (const Vector& star : {x0, Vector(std::polar(1.0, 2.0) * x0)}) {
        try {
            make_phase_noise(phi, 1, x0, star, 1.0);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::EquivalentTargets);
        }
    }
}

TEST(PhaseNoise, RatioPhaseInvariant) {
    const MeasurementMatrix phi = sample_ensemble(gaussian(Field::Complex, 8, 64, 3));
    Rng rng = make_rng(3, 0);
    const Vector x0 = gaussian_vector(8, Field::Complex, rng).normalized();
    const Vector xs = gaussian_vector(8, Field::Complex, rng).normalized();
    const double a = make_phase_noise(phi, 2, x0, xs, 2.0).ratio;
    const double b = make_phase_noise(phi, 2, std::polar(1.0, 0.9) * x0, xs, 2.0).ratio;
    EXPECT_NEAR(a, b, 1e-10 * a);
}

TEST(PhaseNoise, RatioFloorL1Q1) {
    SharpnessConfig cfg;
    cfg.ensemble = gaussian(Field::Real, 32, 512, 4);
    cfg.ell = 1;
    cfg.q = 1;
    cfg.trials = 100;
    const SharpnessResult r = sharpness_experiment(cfg);
    EXPECT_GE(count_at_least(r, 1.0 / (2.0 * std::sqrt(cfg.q) * k_proxy())), 99u);
    EXPECT_LE(r.max_relative_residual, 1e-12);
}

TEST(MatrixNoise, Examples) {
    const MeasurementMatrix phi = sample_ensemble(gaussian(Field::Real, 5, 20, 5));
    const Matrix X0 = Matrix::Identity(5, 5);
    const AdversarialInstance up = make_matrix_noise(phi, X0, Vector::Unit(5, 0), 1.0, 2.0);
    for (int k = 0; k < 20; ++k) EXPECT_NEAR(up.z[k], std::norm(phi.rows()(k, 0)), 1e-12);
    const AdversarialInstance down = make_matrix_noise(phi, X0, Vector::Unit(5, 0), -1.0, 2.0);
    EXPECT_LT((up.z + down.z).norm(), 1e-12);
    EXPECT_LE(up.zero_residual, 1e-12 * up.z_norm);
    try {
        make_matrix_noise(phi, X0, Vector::Unit(5, 0), 0.0, 2.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ZeroPerturbation);
    }
    EXPECT_THROW(make_matrix_noise(phi, X0, Vector::Zero(5), 1.0, 2.0), Error);
}

TEST(MatrixNoise, RatioFloorQ2) {
    SharpnessConfig cfg;
    cfg.ensemble = gaussian(Field::Real, 32, 512, 6);
    cfg.matrix = true;
    cfg.q = 2;
    cfg.trials = 100;
    const SharpnessResult r = sharpness_experiment(cfg);
    const double k = k_proxy();
    EXPECT_GE(count_at_least(r, 1.0 / (4.0 * cfg.q * k * k)), 99u);
    EXPECT_LE(r.max_relative_residual, 1e-12);
}

TEST(Gamma, HalfNormalOracle) {
    const GammaEstimate g =
        gamma_moment(gaussian(Field::Real, 3, 1, 0), 1, 1.0, Vector::Unit(3, 0) * 2.5, Vector::Zero(3), 100000, 7);
    const double target = oracle::gauss_expect([](double x) { return std::abs(x); });
    EXPECT_LE(std::abs(g.value - target), 3 * g.std_error);
}

TEST(Gamma, QuadratureOracle) {
    const GammaEstimate g =
        gamma_moment(gaussian(Field::Real, 2, 1, 0), 2, 1.0, Vector::Unit(2, 0), Vector::Unit(2, 1), 100000, 8);
    const double target = oracle::gauss_expect2([](double a, double b) { return std::abs(a * a - b * b); }) /
                          std::sqrt(2.0);
    EXPECT_LE(std::abs(g.value - target), 3 * g.std_error);
}

TEST(Gamma, BelowMomentBound) {
    const double k = k_proxy();
    Rng rng = make_rng(9, 0);
    for (int ell : {1, 2}) {
        for (double q : {1.0, 2.0, 3.0}) {
            const Vector u = gaussian_vector(6, Field::Complex, rng), v = gaussian_vector(6, Field::Complex, rng);
            const GammaEstimate g = gamma_moment(gaussian(Field::Complex, 6, 1, 0), ell, q, u, v, 20000, 10);
            EXPECT_LE(g.value, 10 * std::pow(std::sqrt(q) * k, ell * q));
        }
    }
    EXPECT_THROW(gamma_moment(gaussian(Field::Real, 2, 1, 0), 2, 1.0, Vector::Unit(2, 0), Vector::Unit(2, 0), 20000,
                              1),
                 Error);
    EXPECT_THROW(gamma_moment(gaussian(Field::Real, 2, 1, 0), 2, 1.0, Vector::Unit(2, 0), Vector::Unit(2, 1), 100, 1),
                 Error);
}

TEST(Sharpness, StableAcrossMAndQ) {
    for (double q : {1.0, 2.0}) {
        std::vector<double> medians;
        for (int m : {256, 512}) {
            SharpnessConfig cfg;
            cfg.ensemble = gaussian(Field::Real, 32, m, 11);
            cfg.q = q;
            cfg.trials = 100;
            const SharpnessResult r = sharpness_experiment(cfg);
            EXPECT_GT(r.q01, 0.1);
            medians.push_back(r.q50);
            EXPECT_EQ(r.rows.size(), 100u);
        }
        EXPECT_LE(std::max(medians[0], medians[1]), 2 * std::min(medians[0], medians[1]));
    }
}

TEST(Sharpness, InfiniteQRejected) {
    SharpnessConfig cfg;
    cfg.ensemble = gaussian(Field::Real, 4, 8, 1);
    cfg.q = std::numeric_limits<double>::infinity();
    try {
        sharpness_experiment(cfg);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ConfigError);
    }
}
