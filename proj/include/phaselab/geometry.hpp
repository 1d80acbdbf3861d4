#pragma once

#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "phaselab/rng.hpp"
#include "phaselab/types.hpp"

namespace phaselab {

struct FullSet {
    int n = 1;
};

/// Vectors with at most s nonzero entries.
struct SparseSet {
    int n = 1;
    int s = 1;
};

struct FiniteSet {
    std::vector<Vector> members;
};

struct VectorSetDescriptor {
    std::variant<FullSet, SparseSet, FiniteSet> set;

    int dim() const;
    /// Throws ConfigError when the invariants (1 <= s <= n, nonempty
    /// equal-dimension members) are violated.
    void validate() const;
    std::string describe() const;
};

struct FullSymmetric {
    int n = 1;
};

struct LowRank {
    int n = 1;
    int rank = 1;
};

/// Rank at most `rank`, with at most s nonzero rows and columns.
struct SparseLowRank {
    int n = 1;
    int rank = 1;
    int s = 1;
};

struct MatrixSetDescriptor {
    std::variant<FullSymmetric, LowRank, SparseLowRank> set;

    int dim() const;
    void validate() const;
    std::string describe() const;
};

void to_json(nlohmann::json& j, const VectorSetDescriptor& d);
void from_json(const nlohmann::json& j, VectorSetDescriptor& d);
void to_json(nlohmann::json& j, const MatrixSetDescriptor& d);
void from_json(const nlohmann::json& j, MatrixSetDescriptor& d);

struct PhaseDistancePair {
    double d1 = 0;
    double d2 = 0;
    Complex aligner{1.0, 0.0};  // unimodular c with ||u - c v|| = d1
};

/// Phase(v^* u), with Phase(0) = 1; restricted to +-1 for the Real field.
Complex phase_aligner(const Vector& u, const Vector& v, Field field);

/// min over |c| = 1 of ||u - c v||_2.
double dist_d1(const Vector& u, const Vector& v, Field field);
/// ||uu^* - vv^*||_F in O(n), without forming the matrices.
double dist_d2(const Vector& u, const Vector& v);
/// ||uu^* - vv^*||_F from the materialized n x n difference.
double dist_d2_materialized(const Vector& u, const Vector& v);
/// d1 for ell = 1, d2 for ell = 2.
double dist_ell(const Vector& u, const Vector& v, Field field, int ell);
PhaseDistancePair phase_distances(const Vector& u, const Vector& v, Field field);

Vector project(const VectorSetDescriptor& set, const Vector& x, Field field = Field::Complex);
/// Index of the d1-nearest member (lowest index on ties).
std::size_t nearest_member(const FiniteSet& set, const Vector& x, Field field);

/// Throws EigenFailure if the Hermitian eigensolver does not converge.
Matrix project_matrix(const MatrixSetDescriptor& set, const Matrix& x);
/// Keeps the `rank` eigenpairs of largest |eigenvalue|.
Matrix truncate_rank(const Matrix& x, int rank);

/// Covering budgets with unit constants.
double gamma2_budget(const VectorSetDescriptor& set);

struct MatrixBudget {
    double gamma2_sq = 0;
    double gamma1 = 0;
    double trace_sup = 0;
    double m_budget = 0;
};

MatrixBudget matrix_budget(const MatrixSetDescriptor& set);

/// Standard Gaussian vector of the field (complex entries have E|z|^2 = 1).
Vector gaussian_vector(int n, Field field, Rng& rng);
/// s distinct indices of [0, n), sorted.
std::vector<int> random_support(int n, int s, Rng& rng);

/// Unit-norm element of cone(T) or, with `difference`, of cone(T - T).
/// Throws DegenerateSample after 100 numerically zero draws.
Vector sample_cone_sphere(const VectorSetDescriptor& set, Field field, Rng& rng, bool difference = false);
/// Unit-Frobenius element of cone(M) or cone(M - M); always Hermitian.
Matrix sample_cone_sphere(const MatrixSetDescriptor& set, Field field, Rng& rng, bool difference = false);

}  // namespace phaselab
