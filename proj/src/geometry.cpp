#include "phaselab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "phaselab/error.hpp"

namespace phaselab {

namespace {

constexpr int kMaxResample = 100;
constexpr double kDegenerateNorm = 1e-12;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

nlohmann::json vector_to_json(const Vector& v) {
    nlohmann::json out = nlohmann::json::array();
    const bool real = is_real_valued(v);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (real) {
            out.push_back(v[i].real());
        } else {
            out.push_back({v[i].real(), v[i].imag()});
        }
    }
    return out;
}

Vector vector_from_json(const nlohmann::json& j) {
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& e = j[i];
        v[static_cast<Eigen::Index>(i)] =
            e.is_array() ? Complex(e.at(0).get<double>(), e.at(1).get<double>()) : Complex(e.get<double>(), 0.0);
    }
    return v;
}

Matrix hermitian_part(const Matrix& x) { return 0.5 * (x + x.adjoint()); }

Matrix sample_member(const MatrixSetDescriptor& set, Field field, Rng& rng) {
    std::normal_distribution<double> normal;
    const int n = set.dim();
    return std::visit(
        Overloaded{
            [&](const FullSymmetric&) -> Matrix {
                Matrix g(n, n);
                for (Eigen::Index j = 0; j < n; ++j) {
                    g.col(j) = gaussian_vector(n, field, rng);
                }
                return hermitian_part(g);
            },
            [&](const LowRank& s) -> Matrix {
                Matrix x = Matrix::Zero(n, n);
                for (int r = 0; r < s.rank; ++r) {
                    const Vector v = gaussian_vector(n, field, rng);
                    x += normal(rng) * (v * v.adjoint());
                }
                return hermitian_part(x);
            },
            [&](const SparseLowRank& s) -> Matrix {
                const std::vector<int> support = random_support(n, s.s, rng);
                Matrix x = Matrix::Zero(n, n);
                for (int r = 0; r < s.rank; ++r) {
                    const Vector g = gaussian_vector(s.s, field, rng);
                    Vector v = Vector::Zero(n);
                    for (int i = 0; i < s.s; ++i) v[support[static_cast<std::size_t>(i)]] = g[i];
                    x += normal(rng) * (v * v.adjoint());
                }
                return hermitian_part(x);
            },
        },
        set.set);
}

Vector sample_vector_member(const VectorSetDescriptor& set, Field field, Rng& rng) {
    return std::visit(
        Overloaded{
            [&](const FullSet& s) -> Vector { return gaussian_vector(s.n, field, rng); },
            [&](const SparseSet& s) -> Vector {
                const std::vector<int> support = random_support(s.n, s.s, rng);
                const Vector g = gaussian_vector(s.s, field, rng);
                Vector v = Vector::Zero(s.n);
                for (int i = 0; i < s.s; ++i) v[support[static_cast<std::size_t>(i)]] = g[i];
                return v;
            },
            [&](const FiniteSet& s) -> Vector {
                std::uniform_int_distribution<std::size_t> pick(0, s.members.size() - 1);
                return s.members[pick(rng)];
            },
        },
        set.set);
}

}  // namespace

int VectorSetDescriptor::dim() const {
    return std::visit(Overloaded{
                          [](const FullSet& s) { return s.n; },
                          [](const SparseSet& s) { return s.n; },
                          [](const FiniteSet& s) {
                              return s.members.empty() ? 0 : static_cast<int>(s.members.front().size());
                          },
                      },
                      set);
}

void VectorSetDescriptor::validate() const {
    std::visit(Overloaded{
                   [](const FullSet& s) {
                       if (s.n < 1) throw Error(ErrorCode::ConfigError, "full set needs n >= 1");
                   },
                   [](const SparseSet& s) {
                       if (s.n < 1 || s.s < 1 || s.s > s.n) {
                           throw Error(ErrorCode::ConfigError, "sparse set needs 1 <= s <= n");
                       }
                   },
                   [](const FiniteSet& s) {
                       if (s.members.empty()) throw Error(ErrorCode::ConfigError, "finite set is empty");
                       const auto n = s.members.front().size();
                       if (n < 1) throw Error(ErrorCode::ConfigError, "finite set members are empty");
                       for (const auto& v : s.members) {
                           if (v.size() != n) {
                               throw Error(ErrorCode::ConfigError, "finite set members differ in dimension");
                           }
                       }
                   },
               },
               set);
}

std::string VectorSetDescriptor::describe() const {
    return std::visit(Overloaded{
                          [](const FullSet& s) { return "full(" + std::to_string(s.n) + ")"; },
                          [](const SparseSet& s) {
                              return "sparse(" + std::to_string(s.n) + "," + std::to_string(s.s) + ")";
                          },
                          [&](const FiniteSet& s) {
                              return "finite(" + std::to_string(dim()) + ",|T|=" +
                                     std::to_string(s.members.size()) + ")";
                          },
                      },
                      set);
}

int MatrixSetDescriptor::dim() const {
    return std::visit([](const auto& s) { return s.n; }, set);
}

void MatrixSetDescriptor::validate() const {
    std::visit(Overloaded{
                   [](const FullSymmetric& s) {
                       if (s.n < 1) throw Error(ErrorCode::ConfigError, "full symmetric set needs n >= 1");
                   },
                   [](const LowRank& s) {
                       if (s.n < 1 || s.rank < 1 || s.rank > s.n) {
                           throw Error(ErrorCode::ConfigError, "low-rank set needs 1 <= R <= n");
                       }
                   },
                   [](const SparseLowRank& s) {
                       if (s.n < 1 || s.rank < 1 || s.rank > s.n || s.s < 1 || s.s > s.n) {
                           throw Error(ErrorCode::ConfigError, "sparse low-rank set needs 1 <= R <= n, 1 <= s <= n");
                       }
                   },
               },
               set);
}

std::string MatrixSetDescriptor::describe() const {
    return std::visit(Overloaded{
                          [](const FullSymmetric& s) { return "full_symmetric(" + std::to_string(s.n) + ")"; },
                          [](const LowRank& s) {
                              return "low_rank(" + std::to_string(s.n) + "," + std::to_string(s.rank) + ")";
                          },
                          [](const SparseLowRank& s) {
                              return "sparse_low_rank(" + std::to_string(s.n) + "," + std::to_string(s.rank) +
                                     "," + std::to_string(s.s) + ")";
                          },
                      },
                      set);
}

void to_json(nlohmann::json& j, const VectorSetDescriptor& d) {
    std::visit(Overloaded{
                   [&](const FullSet& s) { j = {{"kind", "full"}, {"n", s.n}}; },
                   [&](const SparseSet& s) { j = {{"kind", "sparse"}, {"n", s.n}, {"s", s.s}}; },
                   [&](const FiniteSet& s) {
                       nlohmann::json members = nlohmann::json::array();
                       for (const auto& v : s.members) members.push_back(vector_to_json(v));
                       j = {{"kind", "finite"}, {"members", members}};
                   },
               },
               d.set);
}

void from_json(const nlohmann::json& j, VectorSetDescriptor& d) {
    try {
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "full") {
            d.set = FullSet{j.at("n").get<int>()};
        } else if (kind == "sparse") {
            d.set = SparseSet{j.at("n").get<int>(), j.at("s").get<int>()};
        } else if (kind == "finite") {
            FiniteSet f;
            for (const auto& v : j.at("members")) f.members.push_back(vector_from_json(v));
            d.set = std::move(f);
        } else {
            throw Error(ErrorCode::ConfigError, "unknown vector set kind '" + kind + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("vector set: ") + e.what());
    }
    d.validate();
}

void to_json(nlohmann::json& j, const MatrixSetDescriptor& d) {
    std::visit(Overloaded{
                   [&](const FullSymmetric& s) { j = {{"kind", "full_symmetric"}, {"n", s.n}}; },
                   [&](const LowRank& s) { j = {{"kind", "low_rank"}, {"n", s.n}, {"rank", s.rank}}; },
                   [&](const SparseLowRank& s) {
                       j = {{"kind", "sparse_low_rank"}, {"n", s.n}, {"rank", s.rank}, {"s", s.s}};
                   },
               },
               d.set);
}

void from_json(const nlohmann::json& j, MatrixSetDescriptor& d) {
    try {
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "full_symmetric") {
            d.set = FullSymmetric{j.at("n").get<int>()};
        } else if (kind == "low_rank") {
            d.set = LowRank{j.at("n").get<int>(), j.at("rank").get<int>()};
        } else if (kind == "sparse_low_rank") {
            d.set = SparseLowRank{j.at("n").get<int>(), j.at("rank").get<int>(), j.at("s").get<int>()};
        } else {
            throw Error(ErrorCode::ConfigError, "unknown matrix set kind '" + kind + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("matrix set: ") + e.what());
    }
    d.validate();
}

Complex phase_aligner(const Vector& u, const Vector& v, Field field) {
    const Complex vu = v.dot(u);  // v^* u
    if (field == Field::Real) return Complex(vu.real() < 0.0 ? -1.0 : 1.0, 0.0);
    const double mag = std::abs(vu);
    if (mag == 0.0) return Complex(1.0, 0.0);
    return vu / mag;
}

double dist_d1(const Vector& u, const Vector& v, Field field) {
    if (u.size() != v.size()) throw Error(ErrorCode::DimensionMismatch, "d1 needs equal dimensions");
    return (u - phase_aligner(u, v, field) * v).norm();
}

double dist_d2(const Vector& u, const Vector& v) {
    if (u.size() != v.size()) throw Error(ErrorCode::DimensionMismatch, "d2 needs equal dimensions");
    // ||uu* - vv*||_F^2 = (|u|^2 - |v|^2)^2 + 2 (|u|^2 |v|^2 - |u* v|^2), and the
    // second bracket equals |u|^2 |w|^2 with w = v - (u* v / |u|^2) u.
    const double uu = u.dot(u).real();
    const double vv = v.dot(v).real();
    if (uu == 0.0) return vv;
    if (vv == 0.0) return uu;
    const Vector w = v - (u.dot(v) / uu) * u;
    const double cross = uu * w.squaredNorm();
    return std::sqrt((uu - vv) * (uu - vv) + 2.0 * cross);
}

double dist_d2_materialized(const Vector& u, const Vector& v) {
    if (u.size() != v.size()) throw Error(ErrorCode::DimensionMismatch, "d2 needs equal dimensions");
    return (u * u.adjoint() - v * v.adjoint()).norm();
}

double dist_ell(const Vector& u, const Vector& v, Field field, int ell) {
    if (ell == 1) return dist_d1(u, v, field);
    if (ell == 2) return dist_d2(u, v);
    throw Error(ErrorCode::ConfigError, "ell must be 1 or 2");
}

PhaseDistancePair phase_distances(const Vector& u, const Vector& v, Field field) {
    PhaseDistancePair out;
    out.aligner = phase_aligner(u, v, field);
    out.d1 = dist_d1(u, v, field);
    out.d2 = dist_d2(u, v);
    return out;
}

std::size_t nearest_member(const FiniteSet& set, const Vector& x, Field field) {
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < set.members.size(); ++i) {
        const double d = dist_d1(x, set.members[i], field);
        if (d < best_dist) {
            best_dist = d;
            best = i;
        }
    }
    return best;
}

Vector project(const VectorSetDescriptor& set, const Vector& x, Field field) {
    if (x.size() != set.dim()) throw Error(ErrorCode::DimensionMismatch, "projection dimension mismatch");
    return std::visit(Overloaded{
                          [&](const FullSet&) -> Vector { return x; },
                          [&](const SparseSet& s) -> Vector {
                              std::vector<int> order(static_cast<std::size_t>(s.n));
                              std::iota(order.begin(), order.end(), 0);
                              std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
                                  return std::abs(x[a]) > std::abs(x[b]);
                              });
                              Vector out = Vector::Zero(s.n);
                              for (int i = 0; i < s.s; ++i) {
                                  const int idx = order[static_cast<std::size_t>(i)];
                                  out[idx] = x[idx];
                              }
                              return out;
                          },
                          [&](const FiniteSet& s) -> Vector { return s.members[nearest_member(s, x, field)]; },
                      },
                      set.set);
}

Matrix truncate_rank(const Matrix& x, int rank) {
    const Eigen::Index n = x.rows();
    if (rank >= n) return hermitian_part(x);
    auto keep = [&](const auto& values) {
        std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
            return std::abs(values[a]) > std::abs(values[b]);
        });
        order.resize(static_cast<std::size_t>(rank));
        return order;
    };
    if (is_real_valued(x)) {
        const RealMatrix xr = 0.5 * (x.real() + x.real().transpose());
        Eigen::SelfAdjointEigenSolver<RealMatrix> eig(xr);
        if (eig.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "eigensolver did not converge");
        RealMatrix out = RealMatrix::Zero(n, n);
        for (Eigen::Index i : keep(eig.eigenvalues())) {
            out += eig.eigenvalues()[i] * eig.eigenvectors().col(i) * eig.eigenvectors().col(i).transpose();
        }
        return out.cast<Complex>();
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(hermitian_part(x));
    if (eig.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "eigensolver did not converge");
    Matrix out = Matrix::Zero(n, n);
    for (Eigen::Index i : keep(eig.eigenvalues())) {
        out += eig.eigenvalues()[i] * eig.eigenvectors().col(i) * eig.eigenvectors().col(i).adjoint();
    }
    return hermitian_part(out);
}

Matrix project_matrix(const MatrixSetDescriptor& set, const Matrix& x) {
    const int n = set.dim();
    if (x.rows() != n || x.cols() != n) throw Error(ErrorCode::DimensionMismatch, "projection dimension mismatch");
    return std::visit(Overloaded{
                          [&](const FullSymmetric&) -> Matrix { return hermitian_part(x); },
                          [&](const LowRank& s) -> Matrix { return truncate_rank(x, s.rank); },
                          [&](const SparseLowRank& s) -> Matrix {
                              Matrix y = hermitian_part(x);
                              std::vector<int> order(static_cast<std::size_t>(n));
                              for (int round = 0; round < 3; ++round) {
                                  const RealVector row_norms = y.rowwise().norm();
                                  std::iota(order.begin(), order.end(), 0);
                                  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
                                      return row_norms[a] > row_norms[b];
                                  });
                                  Eigen::VectorXd mask = Eigen::VectorXd::Zero(n);
                                  for (int i = 0; i < s.s; ++i) mask[order[static_cast<std::size_t>(i)]] = 1.0;
                                  y = mask.asDiagonal() * y * mask.asDiagonal();
                                  y = truncate_rank(y, s.rank);
                                  y = mask.asDiagonal() * y * mask.asDiagonal();
                              }
                              return y;
                          },
                      },
                      set.set);
}

double gamma2_budget(const VectorSetDescriptor& set) {
    set.validate();
    return std::visit(Overloaded{
                          [](const FullSet& s) { return std::sqrt(double(s.n)); },
                          [](const SparseSet& s) {
                              return std::sqrt(s.s * std::log(std::exp(1.0) * s.n / s.s));
                          },
                          [](const FiniteSet& s) { return std::sqrt(std::log(double(s.members.size()))); },
                      },
                      set.set);
}

MatrixBudget matrix_budget(const MatrixSetDescriptor& set) {
    set.validate();
    MatrixBudget b;
    std::visit(Overloaded{
                   [&](const FullSymmetric& s) {
                       b.gamma2_sq = double(s.n) * s.n;
                       b.gamma1 = b.gamma2_sq;
                       b.trace_sup = std::sqrt(double(s.n));
                   },
                   [&](const LowRank& s) {
                       b.gamma2_sq = double(s.rank) * s.n;
                       b.gamma1 = b.gamma2_sq;
                       b.trace_sup = std::sqrt(double(std::min(2 * s.rank, s.n)));
                   },
                   [&](const SparseLowRank& s) {
                       b.gamma2_sq = s.rank * s.s * std::log(std::exp(1.0) * s.n / s.s);
                       b.gamma1 = b.gamma2_sq;
                       b.trace_sup = std::sqrt(double(std::min(2 * s.rank, s.n)));
                   },
               },
               set.set);
    b.m_budget = b.gamma2_sq + b.gamma1 + b.trace_sup * b.trace_sup;
    return b;
}

Vector gaussian_vector(int n, Field field, Rng& rng) {
    std::normal_distribution<double> normal;
    Vector v(n);
    if (field == Field::Real) {
        for (int i = 0; i < n; ++i) v[i] = Complex(normal(rng), 0.0);
    } else {
        const double s = std::sqrt(0.5);
        for (int i = 0; i < n; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            v[i] = Complex(s * re, s * im);
        }
    }
    return v;
}

std::vector<int> random_support(int n, int s, Rng& rng) {
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < s; ++i) {
        std::uniform_int_distribution<int> pick(i, n - 1);
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
    }
    idx.resize(static_cast<std::size_t>(s));
    std::sort(idx.begin(), idx.end());
    return idx;
}

Vector sample_cone_sphere(const VectorSetDescriptor& set, Field field, Rng& rng, bool difference) {
    set.validate();
    for (int attempt = 0; attempt < kMaxResample; ++attempt) {
        Vector v = sample_vector_member(set, field, rng);
        if (difference) v -= sample_vector_member(set, field, rng);
        const double norm = v.norm();
        if (norm > kDegenerateNorm * std::max(1.0, v.cwiseAbs().maxCoeff())) return v / norm;
    }
    throw Error(ErrorCode::DegenerateSample, "cone sample was numerically zero " + std::to_string(kMaxResample) +
                                                 " times for " + set.describe());
}

Matrix sample_cone_sphere(const MatrixSetDescriptor& set, Field field, Rng& rng, bool difference) {
    set.validate();
    for (int attempt = 0; attempt < kMaxResample; ++attempt) {
        Matrix x = sample_member(set, field, rng);
        if (difference) {
            x /= std::max(x.norm(), kDegenerateNorm);
            Matrix y = sample_member(set, field, rng);
            x -= y / std::max(y.norm(), kDegenerateNorm);
        }
        const double norm = x.norm();
        if (norm > kDegenerateNorm) return x / norm;
    }
    throw Error(ErrorCode::DegenerateSample, "cone sample was numerically zero " + std::to_string(kMaxResample) +
                                                 " times for " + set.describe());
}

}  // namespace phaselab
