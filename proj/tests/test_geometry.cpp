#include <gtest/gtest.h>

#include <cmath>
#include <bit>
#include <numbers>

#include "phaselab/error.hpp"
#include "phaselab/geometry.hpp"

using namespace phaselab;

namespace {

Vector randn(int n, Field f, Rng& rng) { return gaussian_vector(n, f, rng); }

// min over theta of ||u - e^{i theta} v|| on a fine grid, refined locally.
double d1_grid(const Vector& u, const Vector& v) {
    double best = 1e300, best_t = 0;
    const int steps = 20000;
    for (int i = 0; i < steps; ++i) {
        const double t = 2 * std::numbers::pi * i / steps;
        const double d = (u - std::polar(1.0, t) * v).norm();
        if (d < best) best = d, best_t = t;
    }
    for (double h = 2 * std::numbers::pi / steps; h > 1e-13; h /= 2) {
        for (double t : {best_t - h, best_t + h}) {
            const double d = (u - std::polar(1.0, t) * v).norm();
            if (d < best) best = d, best_t = t;
        }
    }
    return best;
}

Vector real_vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

int numeric_rank(const Matrix& x, double tol = 1e-9) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(x);
    int r = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) r += std::abs(es.eigenvalues()[i]) > tol;
    return r;
}

}  // namespace

TEST(Distances, D1Examples) {
    const Vector e1 = Vector::Unit(3, 0), e2 = Vector::Unit(3, 1);
    EXPECT_EQ(dist_d1(e1, e1, Field::Complex), 0.0);
    EXPECT_NEAR(dist_d1(e1, -e1, Field::Real), 0.0, 1e-15);
    EXPECT_NEAR(dist_d1(e1, e2, Field::Complex), d1_grid(e1, e2), 1e-9);
    EXPECT_NEAR(d1_grid(e1, e2), std::sqrt(2.0), 1e-12);
    EXPECT_THROW(dist_d1(e1, Vector::Unit(4, 0), Field::Real), Error);
}

TEST(Distances, D1MatchesGridOracle) {
    Rng rng = make_rng(4, 0);
    for (int i = 0; i < 20; ++i) {
        const Vector u = randn(5, Field::Complex, rng), v = randn(5, Field::Complex, rng);
        EXPECT_NEAR(dist_d1(u, v, Field::Complex), d1_grid(u, v), 1e-8);
    }
    // Real field: c is restricted to +-1.
    for (int i = 0; i < 20; ++i) {
        const Vector u = randn(5, Field::Real, rng), v = randn(5, Field::Real, rng);
        EXPECT_NEAR(dist_d1(u, v, Field::Real), std::min((u - v).norm(), (u + v).norm()), 1e-12);
    }
}

TEST(Distances, D2Examples) {
    const Vector e1 = Vector::Unit(3, 0), e2 = Vector::Unit(3, 1);
    EXPECT_EQ(dist_d2(e1, e1), 0.0);
    EXPECT_NEAR(dist_d2(e1, e2), std::sqrt(2.0), 1e-15);
    Rng rng = make_rng(5, 0);
    for (int i = 0; i < 200; ++i) {
        const Field f = i % 2 ? Field::Real : Field::Complex;
        const Vector u = randn(8, f, rng), v = randn(8, f, rng);
        const Matrix diff = u * u.adjoint() - v * v.adjoint();
        EXPECT_NEAR(dist_d2(u, v), diff.norm(), 1e-10 * diff.norm());
        EXPECT_NEAR(dist_d2_materialized(u, v), diff.norm(), 1e-12 * diff.norm());
        EXPECT_GE(2 * dist_d2(u, v) * (1 + 1e-12), (u.norm() + v.norm()) * dist_d1(u, v, f));
    }
    EXPECT_THROW(dist_d2(e1, Vector::Unit(2, 0)), Error);
}

TEST(Distances, D2PhaseInvariant) {
    Rng rng = make_rng(6, 0);
    const Vector u = randn(6, Field::Complex, rng);
    EXPECT_NEAR(dist_d2(u, std::polar(1.0, 1.3) * u), 0.0, 1e-12);
}

TEST(Projection, Examples) {
    const VectorSetDescriptor sparse{SparseSet{4, 2}};
    EXPECT_EQ(project(sparse, real_vec({3, 1, -2, 0})), real_vec({3, 0, -2, 0}));
    Rng rng = make_rng(7, 0);
    const Vector x = randn(5, Field::Complex, rng);
    EXPECT_EQ(project(VectorSetDescriptor{FullSet{5}}, x), x);
    Vector probe = Vector::Zero(4);
    probe[0] = 0.9;
    probe[1] = 0.1;
    const VectorSetDescriptor finite{FiniteSet{{Vector::Unit(4, 0), Vector::Unit(4, 1)}}};
    EXPECT_EQ(project(finite, probe), Vector::Unit(4, 0));
    // Ties go to the lowest index.
    const VectorSetDescriptor tie{FiniteSet{{Vector::Unit(2, 0), Vector::Unit(2, 1)}}};
    EXPECT_EQ(project(tie, real_vec({1, 1})), Vector::Unit(2, 0));
}

TEST(Projection, SparseMatchesBruteForce) {
    Rng rng = make_rng(8, 0);
    for (int n = 2; n <= 10; ++n) {
        for (int s = 1; s <= n; s += 2) {
            const Vector x = randn(n, Field::Complex, rng);
            double best = 1e300;
            for (unsigned mask = 0; mask < (1u << n); ++mask) {
                if (std::popcount(mask) != s) continue;
                Vector y = Vector::Zero(n);
                for (int i = 0; i < n; ++i) {
                    if (mask >> i & 1u) y[i] = x[i];
                }
                best = std::min(best, (x - y).norm());
            }
            const Vector p = project(VectorSetDescriptor{SparseSet{n, s}}, x);
            EXPECT_NEAR((x - p).norm(), best, 1e-12);
            EXPECT_LE((p.array() != Complex(0, 0)).count(), s);
        }
    }
}

TEST(Projection, MatrixExamples) {
    Rng rng = make_rng(9, 0);
    const Vector a = randn(6, Field::Real, rng);
    const Matrix x = a * a.adjoint();
    EXPECT_LT((project_matrix(MatrixSetDescriptor{LowRank{6, 1}}, x) - x).norm(), 1e-10);
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 3;
    d(1, 1) = 1;
    Matrix expect = Matrix::Zero(2, 2);
    expect(0, 0) = 3;
    EXPECT_LT((project_matrix(MatrixSetDescriptor{LowRank{2, 1}}, d) - expect).norm(), 1e-12);
    // Eigenvalue of largest magnitude wins, whatever its sign.
    d(1, 1) = -5;
    expect.setZero();
    expect(1, 1) = -5;
    EXPECT_LT((truncate_rank(d, 1) - expect).norm(), 1e-12);
}

TEST(Projection, SparseLowRankFixedPointByBruteForce) {
    const Vector u = real_vec({2, 1, 0, 0});
    const Matrix x = u * u.adjoint();
    // Oracle: best rank-1 approximation over every 2-support.
    double best = 1e300;
    for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j) {
            Matrix sub = Matrix::Zero(4, 4);
            for (int a : {i, j}) {
                for (int b : {i, j}) sub(a, b) = x(a, b);
            }
            Eigen::SelfAdjointEigenSolver<Matrix> es(sub);
            Eigen::Index k = 0;
            es.eigenvalues().cwiseAbs().maxCoeff(&k);
            const Matrix approx = es.eigenvalues()[k] * es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint();
            best = std::min(best, (x - approx).norm());
        }
    }
    EXPECT_NEAR(best, 0.0, 1e-12);
    EXPECT_LT((project_matrix(MatrixSetDescriptor{SparseLowRank{4, 1, 2}}, x) - x).norm(), 1e-10);
}

TEST(Budgets, VectorSets) {
    EXPECT_DOUBLE_EQ(gamma2_budget(VectorSetDescriptor{FullSet{64}}), 8.0);
    EXPECT_NEAR(gamma2_budget(VectorSetDescriptor{SparseSet{128, 4}}), std::sqrt(4 * (1 + std::log(32.0))), 1e-12);
    FiniteSet sixteen;
    for (int i = 0; i < 16; ++i) sixteen.members.push_back(Vector::Unit(16, i));
    EXPECT_NEAR(gamma2_budget(VectorSetDescriptor{sixteen}), std::sqrt(std::log(16.0)), 1e-12);
}

TEST(Budgets, MatrixSets) {
    EXPECT_DOUBLE_EQ(matrix_budget(MatrixSetDescriptor{LowRank{64, 2}}).m_budget, 260.0);
    EXPECT_NEAR(matrix_budget(MatrixSetDescriptor{SparseLowRank{128, 1, 4}}).gamma2_sq, 4 * (1 + std::log(32.0)),
                1e-12);
    EXPECT_NEAR(matrix_budget(MatrixSetDescriptor{SparseLowRank{128, 1, 4}}).gamma2_sq, 17.86, 0.01);
    EXPECT_DOUBLE_EQ(matrix_budget(MatrixSetDescriptor{LowRank{10, 2}}).trace_sup, 2.0);
    for (int n = 2; n < 40; ++n) {
        const MatrixBudget b = matrix_budget(MatrixSetDescriptor{LowRank{n, 2}});
        EXPECT_LE(b.trace_sup, std::sqrt(b.gamma2_sq));
    }
}

TEST(Sampling, VectorConeSphere) {
    Rng rng = make_rng(10, 0);
    for (int i = 0; i < 50; ++i) {
        const Vector f = sample_cone_sphere(VectorSetDescriptor{FullSet{9}}, Field::Complex, rng);
        EXPECT_NEAR(f.norm(), 1.0, 1e-12);
        const Vector s = sample_cone_sphere(VectorSetDescriptor{SparseSet{20, 3}}, Field::Real, rng);
        EXPECT_NEAR(s.norm(), 1.0, 1e-12);
        EXPECT_LE((s.array() != Complex(0, 0)).count(), 3);
        const Vector sd = sample_cone_sphere(VectorSetDescriptor{SparseSet{20, 3}}, Field::Real, rng, true);
        EXPECT_LE((sd.array() != Complex(0, 0)).count(), 6);
    }
}

TEST(Sampling, MatrixDifferences) {
    Rng rng = make_rng(11, 0);
    for (int i = 0; i < 30; ++i) {
        const Matrix x = sample_cone_sphere(MatrixSetDescriptor{LowRank{8, 2}}, Field::Complex, rng, true);
        EXPECT_NEAR(x.norm(), 1.0, 1e-12);
        EXPECT_TRUE(is_hermitian(x));
        EXPECT_LE(numeric_rank(x), 4);
    }
}

TEST(Sampling, DegenerateFiniteDifference) {
    Rng rng = make_rng(12, 0);
    const VectorSetDescriptor single{FiniteSet{{Vector::Unit(3, 0)}}};
    try {
        sample_cone_sphere(single, Field::Real, rng, true);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateSample);
    }
}

TEST(Descriptors, Validation) {
    EXPECT_THROW((VectorSetDescriptor{SparseSet{4, 5}}.validate()), Error);
    EXPECT_THROW((VectorSetDescriptor{SparseSet{4, 0}}.validate()), Error);
    EXPECT_THROW(VectorSetDescriptor{FiniteSet{}}.validate(), Error);
    EXPECT_THROW((VectorSetDescriptor{FiniteSet{{Vector::Unit(3, 0), Vector::Unit(4, 0)}}}.validate()), Error);
    EXPECT_THROW((MatrixSetDescriptor{LowRank{4, 0}}.validate()), Error);
    const nlohmann::json j = nlohmann::json::parse(R"({"kind":"sparse","n":10,"s":2})");
    EXPECT_EQ(j.get<VectorSetDescriptor>().dim(), 10);
    const nlohmann::json f = nlohmann::json::parse(R"({"kind":"finite","members":[[1,0],[[0,1],[1,0]]]})");
    EXPECT_EQ(std::get<FiniteSet>(f.get<VectorSetDescriptor>().set).members[1][0], Complex(0, 1));
}
