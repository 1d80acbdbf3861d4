#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
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

double median(std::vector<double> v) { return nearest_rank_quantile(std::move(v), 0.5); }

}  // namespace

TEST(Quantiles, NearestRank) {
    const std::vector<double> v{5, 1, 4, 2, 3};
    EXPECT_EQ(nearest_rank_quantile(v, 0.5), 3);
    EXPECT_EQ(nearest_rank_quantile(v, 0.01), 1);
    EXPECT_EQ(nearest_rank_quantile(v, 0.99), 5);
    EXPECT_EQ(nearest_rank_quantile(v, 0.2), 1);
    EXPECT_EQ(nearest_rank_quantile(v, 0.21), 2);
}

TEST(Stability, FloorOnFullSet) {
    const MeasurementMatrix phi = sample_ensemble(gaussian(Field::Real, 32, 512, 1));
    const auto c = stability_constant_lower(phi, VectorSetDescriptor{FullSet{32}}, 2, 1.0, 1000, 2);
    EXPECT_GE(c.statistic, 0.05);
    EXPECT_EQ(c.kind, CertificateKind::StabilityLower);
    EXPECT_EQ(c.trials, 1000u);
    EXPECT_LE(c.statistic, c.q01);
    EXPECT_LE(c.q01, c.q50);
    EXPECT_LE(c.q50, c.q99);
}

TEST(Stability, UndersampledIsNonnegative) {
    const MeasurementMatrix phi = sample_ensemble(gaussian(Field::Real, 32, 1, 3));
    const auto c = stability_constant_lower(phi, VectorSetDescriptor{FullSet{32}}, 2, 2.0, 200, 4);
    EXPECT_GE(c.statistic, 0.0);
}

TEST(Stability, RatioIsHomogeneous) {
    const MeasurementMatrix phi = sample_ensemble(gaussian(Field::Complex, 6, 40, 5));
    Rng rng = make_rng(5, 0);
    const Vector u = gaussian_vector(6, Field::Complex, rng), v = gaussian_vector(6, Field::Complex, rng);
    for (double q : {1.0, 2.0, 3.5}) {
        const double r = *stability_ratio(phi, u, v, 2, q);
        EXPECT_NEAR(*stability_ratio(phi, 3.7 * u, 3.7 * v, 2, q), r, 1e-12 * r);
        EXPECT_NEAR(*stability_ratio(phi, 0.2 * u, 0.2 * v, 2, q), r, 1e-12 * r);
    }
    EXPECT_FALSE(stability_ratio(phi, u, std::polar(1.0, 0.3) * u, 2, 2.0).has_value());
}

TEST(Stability, MorePairsNeverRaiseTheMinimum) {
    const MeasurementMatrix phi = sample_ensemble(gaussian(Field::Real, 16, 64, 6));
    const VectorSetDescriptor set{FullSet{16}};
    const double few = stability_constant_lower(phi, set, 1, 2.0, 100, 7).statistic;
    const double many = stability_constant_lower(phi, set, 1, 2.0, 800, 7).statistic;
    EXPECT_LE(many, few);
}

TEST(Stability, ErrorCases) {
    const MeasurementMatrix phi = sample_ensemble(gaussian(Field::Real, 3, 10, 8));
    const VectorSetDescriptor single{FiniteSet{{Vector::Unit(3, 0)}}};
    try {
        stability_constant_lower(phi, single, 2, 2.0, 100, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateSet);
    }
    EXPECT_THROW(stability_constant_lower(phi, VectorSetDescriptor{FullSet{3}}, 2, 2.0, 99, 1), Error);
    EXPECT_THROW(stability_constant_lower(phi, VectorSetDescriptor{FullSet{4}}, 2, 2.0, 100, 1), Error);
}

TEST(Injectivity, FloorAndGrowth) {
    const MatrixSetDescriptor set{LowRank{32, 1}};
    const int m = static_cast<int>(std::ceil(8 * matrix_budget(set).m_budget));
    std::vector<double> base, doubled;
    for (int s = 0; s < 20; ++s) {
        const MeasurementMatrix phi = sample_ensemble(gaussian(Field::Real, 32, 2 * m, derive_seed(10, s)));
        const MeasurementMatrix half(phi.rows().topRows(m), Field::Real);
        base.push_back(injectivity_constant_lower(half, set, 2.0, 100, derive_seed(11, s)).statistic);
        doubled.push_back(injectivity_constant_lower(phi, set, 2.0, 100, derive_seed(11, s)).statistic);
    }
    EXPECT_GE(*std::min_element(base.begin(), base.end()), 0.05);
    EXPECT_GE(median(doubled), median(base));
}

TEST(Embed, OrthogonalPair) {
    const MeasurementMatrix phi = sample_ensemble(gaussian(Field::Real, 32, 512, 12));
    const VectorSetDescriptor t1{FiniteSet{{Vector::Unit(32, 0)}}}, t2{FiniteSet{{Vector::Unit(32, 1)}}};
    const EmbedBounds b = embed_bounds(phi, 1.0, t1, t2, 100, 13);
    EXPECT_GE(b.lower.statistic, 0.1);
    EXPECT_LE(b.upper.statistic, 4.0);
    EXPECT_LE(b.lower.statistic, b.upper.statistic);
}

TEST(Embed, RipAgainstZero) {
    const MeasurementMatrix phi = sample_ensemble(gaussian(Field::Real, 32, 512, 14));
    Rng rng = make_rng(14, 0);
    for (int i = 0; i < 20; ++i) {
        const Vector u = gaussian_vector(32, Field::Real, rng);
        const double r = *embed_ratio(phi, 1.0, u, Vector::Zero(32));
        EXPECT_NEAR(r, intensity_op(phi, u).mean() / u.squaredNorm(), 1e-12);
        EXPECT_GE(r, 0.5);
        EXPECT_LE(r, 1.5);
    }
    EXPECT_FALSE(embed_ratio(phi, 1.0, Vector::Unit(32, 0), Vector::Unit(32, 0)).has_value());
    EXPECT_THROW(embed_ratio(phi, 0.3, Vector::Unit(32, 0), Vector::Zero(32)), Error);
}

TEST(Embed, QuadratureOracleForOrthogonalPair) {
    // E|g1^2 - g2^2| / sqrt(2) by 2-d quadrature.
    const double target = oracle::gauss_expect2([](double a, double b) { return std::abs(a * a - b * b); }) /
                          std::sqrt(2.0);
    const int m = 200000;
    const MeasurementMatrix phi = sample_ensemble(gaussian(Field::Real, 2, m, 15));
    const RealVector diff = lifted_difference(phi, Vector::Unit(2, 0), Vector::Unit(2, 1)).cwiseAbs() / std::sqrt(2.0);
    const double mean = diff.mean();
    const double se = std::sqrt((diff.array() - mean).square().sum() / (m - 1.0) / m);
    EXPECT_NEAR(*embed_ratio(phi, 1.0, Vector::Unit(2, 0), Vector::Unit(2, 1)), mean, 1e-12);
    EXPECT_LE(std::abs(mean - target), 3 * se);
}

TEST(CorollaryChecks, AmplitudeMean) {
    const MeasurementMatrix phi = sample_ensemble(gaussian(Field::Real, 32, 512, 16));
    const CorollaryChecks c = corollary_checks(phi, VectorSetDescriptor{FullSet{32}}, 200, 17);
    EXPECT_GE(c.f2_upper.statistic, 0.6);
    EXPECT_LE(c.f2_upper.statistic, 1.0);
    EXPECT_GT(c.f3_lower.statistic, 0.0);
    EXPECT_GT(c.f0_lower.statistic, 0.0);
    // Population value for a fixed u is the half-normal mean.
    EXPECT_NEAR(c.f2_upper.q50, oracle::gauss_expect([](double x) { return std::abs(x); }), 0.05);
    EXPECT_NEAR(oracle::gauss_expect([](double x) { return std::abs(x); }), std::sqrt(2 / std::numbers::pi), 1e-9);
}

TEST(SmallBall, CoordinateOracle) {
    const std::vector<Matrix> xs{Matrix(Vector::Unit(4, 0) * Vector::Unit(4, 0).adjoint())};
    const std::size_t trials = 100000;
    const auto c = small_ball_Q(gaussian(Field::Real, 4, 1, 0), xs, 0.5, trials, 18);
    const double p = 2 * (1 - oracle::normal_cdf(std::sqrt(0.5)));
    EXPECT_NEAR(p, 0.4795, 1e-4);
    EXPECT_LE(std::abs(c.statistic - p), 3 * std::sqrt(p * (1 - p) / trials));
}

TEST(SmallBall, LowRankFloorAndMonotone) {
    const MatrixSetDescriptor set{LowRank{16, 1}};
    const EnsembleSpec s = gaussian(Field::Real, 16, 1, 0);
    const double q_half = small_ball_Q(s, set, 0.5, 2000, 60, 19).statistic;
    const double q_small = small_ball_Q(s, set, 0.1, 2000, 60, 19).statistic;
    const double q_tiny = small_ball_Q(s, set, 1e-9, 2000, 60, 19).statistic;
    EXPECT_GE(q_half, 0.2);
    EXPECT_GE(q_small, q_half);
    EXPECT_GE(q_tiny, q_small);
    EXPECT_GE(q_tiny, 0.999);
}

TEST(Rademacher, ScalingAndBounds) {
    const MatrixSetDescriptor set{LowRank{16, 1}};
    std::vector<double> r64, r256;
    for (int s = 0; s < 20; ++s) {
        r64.push_back(rademacher_R(gaussian(Field::Real, 16, 1, derive_seed(20, s)), set, 64, 50, 100,
                                   derive_seed(21, s))
                          .statistic);
        r256.push_back(rademacher_R(gaussian(Field::Real, 16, 1, derive_seed(20, s)), set, 256, 50, 100,
                                    derive_seed(21, s))
                           .statistic);
    }
    const double ratio = median(r64) / median(r256);
    EXPECT_GE(ratio, 2 / 1.5);
    EXPECT_LE(ratio, 2 * 1.5);
    EXPECT_LE(median(r256), 10 * bound_compare(set, 256).bound_K33 / 256);

    const std::vector<Matrix> zero{Matrix::Zero(16, 16)};
    EXPECT_EQ(rademacher_R(gaussian(Field::Real, 16, 1, 0), zero, 64, 50, 22).statistic, 0.0);
}

TEST(Chaos, IdentityExample) {
    for (int n : {16, 64}) {
        const std::vector<Matrix> xs{Matrix::Identity(n, n) / std::sqrt(double(n))};
        const auto c = chaos_S(gaussian(Field::Real, n, 1, 0), xs, 1, ChaosVariant::Stilde, 4000, 23);
        // E ||phi||^2 / sqrt(n) = sqrt(n); sd of ||phi||^2 is sqrt(2n).
        EXPECT_NEAR(c.statistic, std::sqrt(double(n)), 4 * std::sqrt(2.0 * n) / std::sqrt(n * 4000.0));
    }
}

TEST(Chaos, SingletonQuadrature) {
    const std::vector<Matrix> xs{Matrix(Vector::Unit(3, 0) * Vector::Unit(3, 0).adjoint())};
    const std::size_t trials = 100000;
    const auto c = chaos_S(gaussian(Field::Real, 3, 1, 0), xs, 1, ChaosVariant::S, trials, 24);
    const double mean = oracle::gauss_expect([](double x) { return std::abs(x * x - 1); });
    const double var = 2.0 - mean * mean;
    EXPECT_LE(std::abs(c.statistic - mean), 3 * std::sqrt(var / trials));
}

TEST(Chaos, BelowTenTimesK33) {
    const MatrixSetDescriptor set{LowRank{16, 1}};
    for (int m : {64, 256}) {
        const auto c = chaos_S(gaussian(Field::Real, 16, 1, 0), set, m, ChaosVariant::Stilde, 100, 100, 25);
        EXPECT_LE(c.statistic, 10 * bound_compare(set, m).bound_K33);
    }
}

TEST(BoundCompare, Examples) {
    EXPECT_EQ(bound_compare(MatrixSetDescriptor{FullSymmetric{12}}, 5).R0, 12);
    for (int n : {4, 16, 64}) {
        for (int r : {2, 3}) {
            for (int m : {1, 2, 10, 100, 10000}) {
                const BoundComparison b = bound_compare(MatrixSetDescriptor{LowRank{n, r}}, m);
                EXPECT_LT(b.bound_K33, b.bound_K44) << n << " " << r << " " << m;
                const MatrixBudget mb = matrix_budget(MatrixSetDescriptor{LowRank{n, r}});
                EXPECT_LE(std::sqrt(m) * mb.trace_sup, std::sqrt(m) * std::sqrt(mb.gamma2_sq));
                EXPECT_NEAR(b.bound_K33,
                            std::sqrt(m) * std::sqrt(mb.gamma2_sq) + mb.gamma1 + std::sqrt(m) * mb.trace_sup, 1e-9);
            }
        }
    }
}
