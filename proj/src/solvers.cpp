#include "phaselab/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "phaselab/error.hpp"
#include "phaselab/parallel.hpp"

namespace phaselab {

namespace {

constexpr std::size_t kStallWindow = 50;
constexpr double kRestartPerturbation = 0.5;

template <class T>
struct RestartResult {
    T best;
    double best_objective = 0;
    double initial_objective = 0;
    int iterations = 0;
    std::vector<double> history;
};

/// d||r||_q / dr with the 0/0 case mapped to 0.
RealVector lq_gradient(const RealVector& r, double q, double norm) {
    if (norm == 0.0) return RealVector::Zero(r.size());
    if (q == 1.0) return r.unaryExpr([](double v) { return double((v > 0) - (v < 0)); });
    if (q == 2.0) return r / norm;
    return r.unaryExpr([&](double v) {
        const double sign = double((v > 0) - (v < 0));
        return sign * std::pow(std::abs(v) / norm, q - 1.0);
    });
}

template <class T, class Eval, class Project>
RestartResult<T> descend(T x, const SolverConfig& cfg, Eval&& eval, Project&& project) {
    x = project(x);
    T grad;
    double objective = eval(x, grad);
    if (!std::isfinite(objective) || !x.allFinite()) {
        throw Error(ErrorCode::NonFinite, "initial objective is not finite");
    }
    RestartResult<T> out;
    out.best = x;
    out.best_objective = objective;
    out.initial_objective = objective;
    out.history.push_back(objective);
    double decay = 1.0;
    for (int t = 0; t < cfg.max_iters; ++t) {
        if (out.best_objective == 0.0) break;
        const double grad_sq = grad.squaredNorm();
        if (!(grad_sq > 0.0)) break;
        const double step = cfg.step0 * decay * objective / grad_sq;
        x = project(T(x - step * grad));
        objective = eval(x, grad);
        if (!std::isfinite(objective) || !x.allFinite()) {
            throw Error(ErrorCode::NonFinite, "objective or iterate became non-finite at iteration " +
                                                  std::to_string(t + 1));
        }
        if (objective < out.best_objective) {
            out.best_objective = objective;
            out.best = x;
        }
        out.history.push_back(out.best_objective);
        out.iterations = t + 1;
        decay *= cfg.step_decay;
        if (out.history.size() > kStallWindow) {
            const double before = out.history[out.history.size() - 1 - kStallWindow];
            if (before - out.best_objective <= cfg.tol * before) break;
        }
    }
    return out;
}

template <class T>
std::size_t pick_winner(const std::vector<RestartResult<T>>& results) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < results.size(); ++i) {
        if (results[i].best_objective < results[best].best_objective) best = i;
    }
    return best;
}

template <class T>
void fill_stats(SolverStats& stats, const std::vector<RestartResult<T>>& results, std::size_t winner) {
    const auto& w = results[winner];
    stats.objective_initial = w.initial_objective;
    stats.objective_final = w.best_objective;
    stats.iterations_used = w.iterations;
    stats.restart_index = static_cast<int>(winner);
    stats.best_history = w.history;
    for (const auto& r : results) stats.restart_objectives.push_back(r.best_objective);
}

Vector top_eigenvector(const Matrix& w, double& top_value) {
    if (is_real_valued(w)) {
        Eigen::SelfAdjointEigenSolver<RealMatrix> eig(w.real());
        if (eig.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "spectral eigensolver failed");
        top_value = eig.eigenvalues()[eig.eigenvalues().size() - 1];
        return eig.eigenvectors().col(eig.eigenvectors().cols() - 1).cast<Complex>();
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(w);
    if (eig.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "spectral eigensolver failed");
    top_value = eig.eigenvalues()[eig.eigenvalues().size() - 1];
    return eig.eigenvectors().col(eig.eigenvectors().cols() - 1);
}

RealVector spectral_weights(const RealVector& b, int ell) {
    if (ell == 2) return b;
    if (ell == 1) return b.cwiseAbs2();
    throw Error(ErrorCode::ConfigError, "ell must be 1 or 2");
}

void require_measurements(const MeasurementMatrix& phi, const RealVector& b) {
    if (b.size() != phi.m()) throw Error(ErrorCode::DimensionMismatch, "b must have length m");
    if (!b.allFinite()) throw Error(ErrorCode::NonFinite, "measurements contain NaN/Inf");
}

Vector unit_direction(int n, Field field, Rng& rng) {
    Vector v = gaussian_vector(n, field, rng);
    const double norm = v.norm();
    return norm > 0 ? Vector(v / norm) : v;
}

}  // namespace

void SolverConfig::validate() const {
    if (!(q >= 1.0)) throw Error(ErrorCode::ConfigError, "q must be >= 1, got " + std::to_string(q));
    if (!std::isfinite(q)) throw Error(ErrorCode::ConfigError, "q must be finite (q = inf is not supported)");
    if (!(tol > 0.0)) throw Error(ErrorCode::ConfigError, "tol must be positive");
    if (restarts < 1) throw Error(ErrorCode::ConfigError, "restarts must be >= 1");
    if (max_iters < 0) throw Error(ErrorCode::ConfigError, "max_iters must be >= 0");
    if (!(step0 > 0.0)) throw Error(ErrorCode::ConfigError, "step0 must be positive");
    if (!(step_decay > 0.0 && step_decay <= 1.0)) throw Error(ErrorCode::ConfigError, "step_decay must lie in (0, 1]");
    if (init == InitKind::Provided && !provided_vector && !provided_matrix) {
        throw Error(ErrorCode::ConfigError, "provided init needs a starting point");
    }
}

void to_json(nlohmann::json& j, const SolverConfig& cfg) {
    j = {{"q", cfg.q},         {"max_iters", cfg.max_iters}, {"step0", cfg.step0},
         {"step_decay", cfg.step_decay}, {"restarts", cfg.restarts}, {"tol", cfg.tol},
         {"seed", cfg.seed}};
    switch (cfg.init) {
        case InitKind::Spectral: j["init"] = "spectral"; break;
        case InitKind::Random: j["init"] = "random"; break;
        case InitKind::Provided: j["init"] = "provided"; break;
    }
}

void from_json(const nlohmann::json& j, SolverConfig& cfg) {
    try {
        cfg.seed = j.at("seed").get<std::uint64_t>();
        cfg.q = j.value("q", cfg.q);
        cfg.max_iters = j.value("max_iters", cfg.max_iters);
        cfg.step0 = j.value("step0", cfg.step0);
        cfg.step_decay = j.value("step_decay", cfg.step_decay);
        cfg.restarts = j.value("restarts", cfg.restarts);
        cfg.tol = j.value("tol", cfg.tol);
        const std::string init = j.value("init", std::string("spectral"));
        if (init == "spectral") {
            cfg.init = InitKind::Spectral;
        } else if (init == "random") {
            cfg.init = InitKind::Random;
        } else {
            throw Error(ErrorCode::ConfigError, "init must be 'spectral' or 'random' in a config file");
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("solver config: ") + e.what());
    }
    cfg.validate();
}

namespace {
void stats_to_json(nlohmann::json& j, const SolverStats& s) {
    j["objective_initial"] = s.objective_initial;
    j["objective_final"] = s.objective_final;
    j["iterations_used"] = s.iterations_used;
    j["restart_index"] = s.restart_index;
    j["restart_objectives"] = s.restart_objectives;
    j["zero_information"] = s.zero_information;
}
}  // namespace

void to_json(nlohmann::json& j, const PhaseReport& r) {
    j = nlohmann::json::object();
    stats_to_json(j, r);
    j["estimate_norm"] = r.estimate.norm();
    if (r.member_index) j["member_index"] = *r.member_index;
    if (r.d1_error) j["d1_error"] = *r.d1_error;
    if (r.d2_error) j["d2_error"] = *r.d2_error;
}

void to_json(nlohmann::json& j, const MatrixReport& r) {
    j = nlohmann::json::object();
    stats_to_json(j, r);
    j["estimate_norm"] = r.estimate.norm();
    if (r.frobenius_error) j["frobenius_error"] = *r.frobenius_error;
}

double lq_norm(const RealVector& v, double q) {
    if (v.size() == 0) return 0.0;
    const double scale = v.cwiseAbs().maxCoeff();
    if (scale == 0.0 || !std::isfinite(scale)) return scale;
    if (q == 1.0) return v.cwiseAbs().sum();
    if (q == 2.0) return v.stableNorm();
    return scale * std::pow((v.cwiseAbs() / scale).array().pow(q).sum(), 1.0 / q);
}

double phase_objective(const MeasurementMatrix& phi, int ell, const Vector& x, const RealVector& b, double q) {
    return lq_norm(phaseless_op(phi, x, ell) - b, q);
}

double matrix_objective(const MeasurementMatrix& phi, const Matrix& x, const RealVector& b, double q) {
    return lq_norm(phi.quadratic(x) - b, q);
}

SpectralInit spectral_init(const MeasurementMatrix& phi, const RealVector& b, int ell) {
    return spectral_init(phi, b, ell, VectorSetDescriptor{FullSet{phi.n()}});
}

SpectralInit spectral_init(const MeasurementMatrix& phi, const RealVector& b, int ell,
                           const VectorSetDescriptor& set) {
    require_measurements(phi, b);
    const RealVector w = spectral_weights(b, ell);
    const double scale2 = w.mean();
    const Matrix gram = phi.weighted_gram(w) / double(phi.m());
    SpectralInit out;
    out.zero_information = (w.array() == 0.0).all();

    Vector direction;
    double top = 0;
    if (const auto* sparse = std::get_if<SparseSet>(&set.set); sparse && sparse->s < phi.n()) {
        const RealVector energy = gram.diagonal().real();
        std::vector<int> order(static_cast<std::size_t>(phi.n()));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int c) { return energy[a] > energy[c]; });
        order.resize(static_cast<std::size_t>(sparse->s));
        std::sort(order.begin(), order.end());
        Matrix sub(sparse->s, sparse->s);
        for (int i = 0; i < sparse->s; ++i) {
            for (int k = 0; k < sparse->s; ++k) sub(i, k) = gram(order[std::size_t(i)], order[std::size_t(k)]);
        }
        const Vector local = top_eigenvector(sub, top);
        direction = Vector::Zero(phi.n());
        for (int i = 0; i < sparse->s; ++i) direction[order[std::size_t(i)]] = local[i];
    } else {
        direction = top_eigenvector(gram, top);
    }
    if (out.zero_information) {
        out.estimate = Vector::Unit(phi.n(), 0);
        return out;
    }
    out.estimate = std::sqrt(std::max(scale2, 0.0)) * direction;
    if (std::holds_alternative<FiniteSet>(set.set)) {
        out.estimate = project(set, out.estimate, phi.field());
    }
    return out;
}

Matrix spectral_init_matrix(const MeasurementMatrix& phi, const RealVector& b, const MatrixSetDescriptor& set) {
    require_measurements(phi, b);
    const double moment_scale = phi.field() == Field::Real ? 2.0 : 1.0;
    Matrix g = phi.weighted_gram(b) / double(phi.m());
    g.diagonal().array() -= b.mean();
    return project_matrix(set, g / moment_scale);
}

PhaseReport solve_phase(int ell, const MeasurementMatrix& phi, const RealVector& b, const VectorSetDescriptor& set,
                        const SolverConfig& cfg, const std::optional<Vector>& truth) {
    cfg.validate();
    set.validate();
    if (ell != 1 && ell != 2) throw Error(ErrorCode::ConfigError, "ell must be 1 or 2");
    require_measurements(phi, b);
    if (set.dim() != phi.n()) throw Error(ErrorCode::DimensionMismatch, "set dimension differs from n");

    const Field field = phi.field();
    const int n = phi.n();
    Vector base;
    bool zero_info = false;
    const double natural_scale = std::sqrt(std::max(spectral_weights(b, ell).mean(), 0.0));
    switch (cfg.init) {
        case InitKind::Spectral: {
            SpectralInit init = spectral_init(phi, b, ell, set);
            base = std::move(init.estimate);
            zero_info = init.zero_information;
            break;
        }
        case InitKind::Provided:
            if (!cfg.provided_vector || cfg.provided_vector->size() != n) {
                throw Error(ErrorCode::ConfigError, "provided init must be a vector of length n");
            }
            base = *cfg.provided_vector;
            break;
        case InitKind::Random: break;
    }

    // Finite sets get one extra restart seeded at each member.
    const auto* finite_set = std::get_if<FiniteSet>(&set.set);
    const std::size_t base_restarts = static_cast<std::size_t>(cfg.restarts);
    const std::size_t restarts = base_restarts + (finite_set ? finite_set->members.size() : 0);
    std::vector<RestartResult<Vector>> results(restarts);
    const double q = cfg.q;
    parallel_for(restarts, [&](std::size_t r) {
        Rng rng = make_rng(cfg.seed, r);
        Vector start;
        if (r >= base_restarts) {
            start = finite_set->members[r - base_restarts];
        } else if (cfg.init == InitKind::Random) {
            start = (natural_scale > 0 ? natural_scale : 1.0) * unit_direction(n, field, rng);
        } else if (r == 0) {
            start = base;
        } else {
            const double scale = base.norm() > 0 ? base.norm() : (natural_scale > 0 ? natural_scale : 1.0);
            start = base + kRestartPerturbation * scale * unit_direction(n, field, rng);
        }
        auto eval = [&](const Vector& x, Vector& grad) {
            const Vector c = phi.inner(x);
            const RealVector f = ell == 1 ? RealVector(c.cwiseAbs()) : RealVector(c.cwiseAbs2());
            const RealVector residual = f - b;
            const double objective = lq_norm(residual, q);
            const RealVector g = lq_gradient(residual, q, objective);
            Vector weights(c.size());
            for (Eigen::Index k = 0; k < c.size(); ++k) {
                if (ell == 2) {
                    weights[k] = 2.0 * g[k] * c[k];
                } else {
                    const double mag = std::abs(c[k]);
                    weights[k] = mag > 0.0 ? g[k] * c[k] / mag : Complex(0.0, 0.0);
                }
            }
            grad = phi.combine(weights);
            return objective;
        };
        auto proj = [&](const Vector& x) { return project(set, x, field); };
        results[r] = descend(std::move(start), cfg, eval, proj);
    });

    const std::size_t winner = pick_winner(results);
    PhaseReport report;
    fill_stats(report, results, winner);
    report.zero_information = zero_info;
    report.estimate = results[winner].best;
    if (const auto* finite = std::get_if<FiniteSet>(&set.set)) {
        report.member_index = nearest_member(*finite, report.estimate, field);
    }
    if (truth) {
        report.d1_error = dist_d1(report.estimate, *truth, field);
        report.d2_error = dist_d2(report.estimate, *truth);
    }
    return report;
}

MatrixReport solve_matrix(const MeasurementMatrix& phi, const RealVector& b, const MatrixSetDescriptor& set,
                          const SolverConfig& cfg, const std::optional<Matrix>& truth) {
    cfg.validate();
    set.validate();
    require_measurements(phi, b);
    const int n = phi.n();
    if (set.dim() != n) throw Error(ErrorCode::DimensionMismatch, "set dimension differs from n");

    Matrix base;
    switch (cfg.init) {
        case InitKind::Spectral: base = spectral_init_matrix(phi, b, set); break;
        case InitKind::Provided:
            if (!cfg.provided_matrix || cfg.provided_matrix->rows() != n || cfg.provided_matrix->cols() != n) {
                throw Error(ErrorCode::ConfigError, "provided init must be an n x n matrix");
            }
            base = *cfg.provided_matrix;
            break;
        case InitKind::Random: break;
    }
    const double natural_scale = std::sqrt(std::max(b.squaredNorm() / double(b.size()) / 3.0, 0.0));
    const MatrixSetDescriptor full{FullSymmetric{n}};

    const std::size_t restarts = static_cast<std::size_t>(cfg.restarts);
    std::vector<RestartResult<Matrix>> results(restarts);
    const double q = cfg.q;
    parallel_for(restarts, [&](std::size_t r) {
        Rng rng = make_rng(cfg.seed, r);
        Matrix start;
        if (cfg.init == InitKind::Random) {
            start = (natural_scale > 0 ? natural_scale : 1.0) * sample_cone_sphere(set, phi.field(), rng);
        } else if (r == 0) {
            start = base;
        } else {
            const double scale = base.norm() > 0 ? base.norm() : (natural_scale > 0 ? natural_scale : 1.0);
            start = base + kRestartPerturbation * scale * sample_cone_sphere(full, phi.field(), rng);
        }
        auto eval = [&](const Matrix& x, Matrix& grad) {
            const RealVector residual = phi.quadratic(x) - b;
            const double objective = lq_norm(residual, q);
            grad = phi.weighted_gram(lq_gradient(residual, q, objective));
            return objective;
        };
        auto proj = [&](const Matrix& x) { return project_matrix(set, x); };
        results[r] = descend(std::move(start), cfg, eval, proj);
    });

    const std::size_t winner = pick_winner(results);
    MatrixReport report;
    fill_stats(report, results, winner);
    report.estimate = results[winner].best;
    if (truth) report.frobenius_error = (report.estimate - *truth).norm();
    return report;
}

PhaseReport solve_finite_oracle(int ell, const MeasurementMatrix& phi, const RealVector& b, const FiniteSet& set,
                                double q, const std::optional<Vector>& truth) {
    VectorSetDescriptor{set}.validate();
    require_measurements(phi, b);
    if (!(q >= 1.0) || !std::isfinite(q)) throw Error(ErrorCode::ConfigError, "q must satisfy 1 <= q < inf");
    std::size_t best = 0;
    double best_objective = std::numeric_limits<double>::infinity();
    std::vector<double> objectives;
    objectives.reserve(set.members.size());
    for (std::size_t i = 0; i < set.members.size(); ++i) {
        const double value = phase_objective(phi, ell, set.members[i], b, q);
        objectives.push_back(value);
        if (value < best_objective) {
            best_objective = value;
            best = i;
        }
    }
    PhaseReport report;
    report.estimate = set.members[best];
    report.member_index = best;
    report.objective_initial = best_objective;
    report.objective_final = best_objective;
    report.best_history = {best_objective};
    report.restart_objectives = std::move(objectives);
    if (truth) {
        report.d1_error = dist_d1(report.estimate, *truth, phi.field());
        report.d2_error = dist_d2(report.estimate, *truth);
    }
    return report;
}

}  // namespace phaselab
