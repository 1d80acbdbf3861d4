#include "phaselab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "phaselab/error.hpp"
#include "phaselab/parallel.hpp"
#include "phaselab/solvers.hpp"

namespace phaselab {

namespace {

constexpr int kMaxPairAttempts = 100;
constexpr std::uint64_t kInnerStream = 0x696e6e6572ULL;
constexpr std::uint64_t kSignStream = 0x7369676e73ULL;
constexpr std::uint64_t kPhiStream = 0x706869ULL;

Vector draw_member(const VectorSetDescriptor& set, Field field, Rng& rng) {
    if (const auto* finite = std::get_if<FiniteSet>(&set.set)) {
        std::uniform_int_distribution<std::size_t> pick(0, finite->members.size() - 1);
        return finite->members[pick(rng)];
    }
    std::uniform_real_distribution<double> log_radius(std::log(0.1), std::log(10.0));
    const double radius = std::exp(log_radius(rng));
    return radius * sample_cone_sphere(set, field, rng);
}

/// Runs `ratio(rng)` until it yields a value, at most kMaxPairAttempts times.
template <class Ratio>
double resample_until_valid(Rng& rng, Ratio&& ratio) {
    for (int attempt = 0; attempt < kMaxPairAttempts; ++attempt) {
        if (const std::optional<double> value = ratio(rng)) return *value;
    }
    throw Error(ErrorCode::DegenerateSet, "every sampled pair was equivalent (distance < 1e-10)");
}

void require_count(std::size_t have, std::size_t need, const char* what) {
    if (have < need) {
        throw Error(ErrorCode::ConfigError,
                    std::string(what) + " must be at least " + std::to_string(need) + ", got " + std::to_string(have));
    }
}

void require_same_dim(const MeasurementMatrix& phi, int n) {
    if (n != phi.n()) throw Error(ErrorCode::DimensionMismatch, "set dimension differs from measurement dimension");
}

int common_dim(std::span<const Matrix> xs) {
    if (xs.empty()) throw Error(ErrorCode::ConfigError, "matrix set sample is empty");
    const auto n = xs.front().rows();
    for (const auto& x : xs) {
        if (x.rows() != n || x.cols() != n) throw Error(ErrorCode::DimensionMismatch, "matrices differ in size");
    }
    return static_cast<int>(n);
}

EnsembleSpec with_shape(EnsembleSpec spec, int n, int m, std::uint64_t seed) {
    spec.n = n;
    spec.m = m;
    spec.seed = seed;
    return spec;
}

/// <G, X> = tr(G X) for Hermitian G, X.
double trace_product(const Matrix& g, const Matrix& x) {
    return g.transpose().cwiseProduct(x).sum().real();
}

double max_abs_pairing(const Matrix& g, std::span<const Matrix> xs) {
    double best = 0.0;
    for (const auto& x : xs) best = std::max(best, std::abs(trace_product(g, x)));
    return best;
}

RealVector rademacher_signs(int m, std::uint64_t seed, std::uint64_t stream) {
    Rng rng = make_rng(derive_seed(seed, kSignStream), stream);
    std::bernoulli_distribution coin(0.5);
    RealVector eps(m);
    for (int k = 0; k < m; ++k) eps[k] = coin(rng) ? 1.0 : -1.0;
    return eps;
}

std::vector<Matrix> sample_unit_differences(const MatrixSetDescriptor& set, Field field, std::size_t count,
                                            std::uint64_t seed) {
    std::vector<Matrix> xs(count);
    for (std::size_t j = 0; j < count; ++j) {
        Rng rng = make_rng(derive_seed(seed, kInnerStream), j);
        xs[j] = sample_cone_sphere(set, field, rng, /*difference=*/true);
    }
    return xs;
}

}  // namespace

std::string_view to_string(CertificateKind kind) {
    switch (kind) {
        case CertificateKind::StabilityLower: return "StabilityLower";
        case CertificateKind::InjectivityLower: return "InjectivityLower";
        case CertificateKind::EmbedLower: return "EmbedLower";
        case CertificateKind::EmbedUpper: return "EmbedUpper";
        case CertificateKind::SmallBallQ: return "SmallBallQ";
        case CertificateKind::RademacherR: return "RademacherR";
        case CertificateKind::ChaosS: return "ChaosS";
    }
    return "Unknown";
}

bool is_lower_kind(CertificateKind kind) {
    return kind == CertificateKind::StabilityLower || kind == CertificateKind::InjectivityLower ||
           kind == CertificateKind::EmbedLower || kind == CertificateKind::SmallBallQ;
}

void to_json(nlohmann::json& j, const CertificateEstimate& c) {
    j = {{"kind", std::string(to_string(c.kind))},
         {"statistic", c.statistic},
         {"trials", c.trials},
         {"seed", c.seed},
         {"quantiles", {{"q01", c.q01}, {"q50", c.q50}, {"q99", c.q99}}}};
}

double nearest_rank_quantile(std::vector<double> values, double p) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    const auto count = static_cast<double>(values.size());
    const auto rank = static_cast<std::size_t>(std::max(1.0, std::ceil(p * count)));
    return values[std::min(rank, values.size()) - 1];
}

CertificateEstimate summarize(CertificateKind kind, const std::vector<double>& values, std::uint64_t seed,
                              Reduction reduction) {
    CertificateEstimate c;
    c.kind = kind;
    c.trials = values.size();
    c.seed = seed;
    if (values.empty()) return c;
    switch (reduction) {
        case Reduction::Min: c.statistic = *std::min_element(values.begin(), values.end()); break;
        case Reduction::Max: c.statistic = *std::max_element(values.begin(), values.end()); break;
        case Reduction::Mean:
            c.statistic = std::accumulate(values.begin(), values.end(), 0.0) / double(values.size());
            break;
    }
    c.q01 = nearest_rank_quantile(values, 0.01);
    c.q50 = nearest_rank_quantile(values, 0.50);
    c.q99 = nearest_rank_quantile(values, 0.99);
    return c;
}

std::optional<double> stability_ratio(const MeasurementMatrix& phi, const Vector& u, const Vector& v, int ell,
                                      double q) {
    const double d = dist_ell(u, v, phi.field(), ell);
    if (!(d >= kDegeneratePairDistance)) return std::nullopt;
    const RealVector diff = phaseless_op(phi, u, ell) - phaseless_op(phi, v, ell);
    return lq_norm(diff, q) / (std::pow(double(phi.m()), 1.0 / q) * d);
}

CertificateEstimate stability_constant_lower(const MeasurementMatrix& phi, const VectorSetDescriptor& set, int ell,
                                             double q, std::size_t pairs, std::uint64_t seed,
                                             std::span<const std::pair<Vector, Vector>> extra_pairs) {
    require_count(pairs, 100, "pairs");
    set.validate();
    require_same_dim(phi, set.dim());
    if (!(q >= 1.0) || !std::isfinite(q)) throw Error(ErrorCode::ConfigError, "q must satisfy 1 <= q < inf");
    std::vector<double> values(pairs);
    parallel_for(pairs, [&](std::size_t i) {
        Rng rng = make_rng(seed, i);
        values[i] = resample_until_valid(rng, [&](Rng& r) {
            const Vector u = draw_member(set, phi.field(), r);
            const Vector v = draw_member(set, phi.field(), r);
            return stability_ratio(phi, u, v, ell, q);
        });
    });
    for (const auto& [u, v] : extra_pairs) {
        if (const auto value = stability_ratio(phi, u, v, ell, q)) values.push_back(*value);
    }
    return summarize(CertificateKind::StabilityLower, values, seed, Reduction::Min);
}

CertificateEstimate injectivity_constant_lower(const MeasurementMatrix& phi, const MatrixSetDescriptor& set,
                                               double q, std::size_t samples, std::uint64_t seed) {
    require_count(samples, 100, "samples");
    set.validate();
    require_same_dim(phi, set.dim());
    if (!(q >= 1.0) || !std::isfinite(q)) throw Error(ErrorCode::ConfigError, "q must satisfy 1 <= q < inf");
    const double scale = std::pow(double(phi.m()), 1.0 / q);
    std::vector<double> values(samples);
    parallel_for(samples, [&](std::size_t i) {
        Rng rng = make_rng(seed, i);
        Matrix x;
        try {
            x = sample_cone_sphere(set, phi.field(), rng, /*difference=*/true);
        } catch (const Error& e) {
            throw Error(ErrorCode::DegenerateSet, e.what());
        }
        values[i] = lq_norm(phi.quadratic(x), q) / scale;
    });
    return summarize(CertificateKind::InjectivityLower, values, seed, Reduction::Min);
}

RealVector lifted_difference(const MeasurementMatrix& phi, const Vector& u, const Vector& v) {
    return intensity_op(phi, u) - intensity_op(phi, v);
}

std::optional<double> embed_ratio(const MeasurementMatrix& phi, double p, const Vector& u, const Vector& v) {
    if (!(p >= 0.5 && p <= 1.0)) throw Error(ErrorCode::InvalidExponent, "p must lie in [1/2, 1]");
    const double d2 = dist_d2(u, v);
    if (!(d2 >= kDegeneratePairDistance)) return std::nullopt;
    const Eigen::ArrayXd diff = lifted_difference(phi, u, v).cwiseAbs().array();
    const double total = p == 1.0 ? diff.sum() : p == 0.5 ? diff.sqrt().sum() : diff.pow(p).sum();
    const double lifted = total / double(phi.m());
    return lifted / std::pow(d2, p);
}

EmbedBounds embed_bounds(const MeasurementMatrix& phi, double p, const VectorSetDescriptor& t1,
                         const VectorSetDescriptor& t2, std::size_t samples, std::uint64_t seed) {
    require_count(samples, 100, "samples");
    t1.validate();
    t2.validate();
    require_same_dim(phi, t1.dim());
    require_same_dim(phi, t2.dim());
    if (!(p >= 0.5 && p <= 1.0)) throw Error(ErrorCode::InvalidExponent, "p must lie in [1/2, 1]");
    std::vector<double> values(samples);
    parallel_for(samples, [&](std::size_t i) {
        Rng rng = make_rng(seed, i);
        values[i] = resample_until_valid(rng, [&](Rng& r) {
            const Vector u = draw_member(t1, phi.field(), r);
            const Vector v = draw_member(t2, phi.field(), r);
            return embed_ratio(phi, p, u, v);
        });
    });
    return {summarize(CertificateKind::EmbedLower, values, seed, Reduction::Min),
            summarize(CertificateKind::EmbedUpper, values, seed, Reduction::Max)};
}

CorollaryChecks corollary_checks(const MeasurementMatrix& phi, const VectorSetDescriptor& set, std::size_t samples,
                                 std::uint64_t seed) {
    require_count(samples, 100, "samples");
    set.validate();
    require_same_dim(phi, set.dim());
    std::vector<double> amplitude(samples);
    std::vector<double> half(samples);
    std::vector<double> full(samples);
    parallel_for(samples, [&](std::size_t i) {
        Rng rng = make_rng(seed, i);
        for (int attempt = 0;; ++attempt) {
            const Vector u = draw_member(set, phi.field(), rng);
            const double norm = u.norm();
            if (norm >= kDegeneratePairDistance) {
                amplitude[i] = amplitude_op(phi, u).mean() / norm;
                break;
            }
            if (attempt + 1 >= kMaxPairAttempts) throw Error(ErrorCode::DegenerateSet, "set only yields zero vectors");
        }
        Rng pair_rng = make_rng(derive_seed(seed, 1), i);
        resample_until_valid(pair_rng, [&](Rng& r) -> std::optional<double> {
            const Vector u = draw_member(set, phi.field(), r);
            const Vector v = draw_member(set, phi.field(), r);
            const auto h = embed_ratio(phi, 0.5, u, v);
            if (!h) return std::nullopt;
            half[i] = *h;
            full[i] = *embed_ratio(phi, 1.0, u, v);
            return h;
        });
    });
    return {summarize(CertificateKind::EmbedUpper, amplitude, seed, Reduction::Max),
            summarize(CertificateKind::EmbedLower, half, seed, Reduction::Min),
            summarize(CertificateKind::EmbedLower, full, seed, Reduction::Min)};
}

CertificateEstimate small_ball_Q(const EnsembleSpec& spec, std::span<const Matrix> xs, double xi,
                                 std::size_t trials, std::uint64_t seed) {
    require_count(trials, 1000, "trials");
    if (!(xi > 0.0)) throw Error(ErrorCode::ConfigError, "xi must be positive");
    const int n = common_dim(xs);
    const MeasurementMatrix draws =
        sample_ensemble(with_shape(spec, n, static_cast<int>(trials), derive_seed(seed, kPhiStream)));
    std::vector<double> values(xs.size());
    parallel_for(xs.size(), [&](std::size_t j) {
        const RealVector q = draws.quadratic(xs[j]).cwiseAbs();
        values[j] = double((q.array() >= xi).count()) / double(trials);
    });
    return summarize(CertificateKind::SmallBallQ, values, seed, Reduction::Min);
}

CertificateEstimate small_ball_Q(const EnsembleSpec& spec, const MatrixSetDescriptor& set, double xi,
                                 std::size_t trials, std::size_t samples, std::uint64_t seed) {
    require_count(samples, 50, "samples");
    set.validate();
    const std::vector<Matrix> xs = sample_unit_differences(set, spec.field, samples, seed);
    return small_ball_Q(spec, xs, xi, trials, seed);
}

CertificateEstimate rademacher_R(const EnsembleSpec& spec, std::span<const Matrix> xs, int m,
                                 std::size_t mc_outer, std::uint64_t seed) {
    require_count(mc_outer, 50, "mc_outer");
    if (m < 1) throw Error(ErrorCode::ConfigError, "m must be positive");
    const int n = common_dim(xs);
    std::vector<double> values(mc_outer);
    parallel_for(mc_outer, [&](std::size_t o) {
        const MeasurementMatrix phi = sample_ensemble(with_shape(spec, n, m, derive_seed(derive_seed(seed, kPhiStream), o)));
        const Matrix g = phi.weighted_gram(rademacher_signs(m, seed, o));
        values[o] = max_abs_pairing(g, xs) / double(m);
    });
    return summarize(CertificateKind::RademacherR, values, seed, Reduction::Mean);
}

CertificateEstimate rademacher_R(const EnsembleSpec& spec, const MatrixSetDescriptor& set, int m,
                                 std::size_t mc_outer, std::size_t mc_inner, std::uint64_t seed) {
    require_count(mc_inner, 100, "mc_inner");
    set.validate();
    const std::vector<Matrix> xs = sample_unit_differences(set, spec.field, mc_inner, seed);
    return rademacher_R(spec, xs, m, mc_outer, seed);
}

std::vector<Matrix> sample_difference_set(const MatrixSetDescriptor& set, Field field, std::size_t count,
                                          std::uint64_t seed) {
    set.validate();
    std::vector<Matrix> xs(count);
    for (std::size_t j = 0; j < count; ++j) {
        Rng rng = make_rng(derive_seed(seed, kInnerStream), j);
        const Matrix a = sample_cone_sphere(set, field, rng);
        const Matrix b = sample_cone_sphere(set, field, rng);
        xs[j] = a - b;
    }
    return xs;
}

CertificateEstimate chaos_S(const EnsembleSpec& spec, std::span<const Matrix> xs, int m, ChaosVariant variant,
                            std::size_t trials, std::uint64_t seed) {
    require_count(trials, 50, "trials");
    if (m < 1) throw Error(ErrorCode::ConfigError, "m must be positive");
    const int n = common_dim(xs);
    const int rows = variant == ChaosVariant::S ? 1 : m;
    std::vector<double> values(trials);
    parallel_for(trials, [&](std::size_t t) {
        const MeasurementMatrix phi =
            sample_ensemble(with_shape(spec, n, rows, derive_seed(derive_seed(seed, kPhiStream), t)));
        Matrix g;
        switch (variant) {
            case ChaosVariant::S:
            case ChaosVariant::Sbar:
                g = phi.weighted_gram(RealVector::Ones(rows));
                g.diagonal().array() -= double(rows);
                break;
            case ChaosVariant::Stilde: g = phi.weighted_gram(rademacher_signs(rows, seed, t)); break;
        }
        values[t] = max_abs_pairing(g, xs);
    });
    return summarize(CertificateKind::ChaosS, values, seed, Reduction::Mean);
}

CertificateEstimate chaos_S(const EnsembleSpec& spec, const MatrixSetDescriptor& set, int m, ChaosVariant variant,
                            std::size_t trials, std::size_t inner_samples, std::uint64_t seed) {
    if (inner_samples < 1) throw Error(ErrorCode::ConfigError, "inner_samples must be positive");
    const std::vector<Matrix> xs = sample_difference_set(set, spec.field, inner_samples, seed);
    return chaos_S(spec, xs, m, variant, trials, seed);
}

BoundComparison bound_compare(const MatrixSetDescriptor& set, int m) {
    if (m < 1) throw Error(ErrorCode::ConfigError, "m must be positive");
    const MatrixBudget b = matrix_budget(set);
    BoundComparison out;
    out.R0 = std::visit(
        [](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, FullSymmetric>) {
                return double(s.n);
            } else {
                return double(std::min(2 * s.rank, s.n));
            }
        },
        set.set);
    const double root_m = std::sqrt(double(m));
    const double gamma2 = std::sqrt(b.gamma2_sq);
    out.bound_K33 = root_m * gamma2 + b.gamma1 + root_m * b.trace_sup;
    out.bound_K44 = root_m * std::sqrt(out.R0) * gamma2 + b.gamma1;
    return out;
}

}  // namespace phaselab
