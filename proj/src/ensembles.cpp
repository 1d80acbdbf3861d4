#include "phaselab/ensembles.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "phaselab/error.hpp"
#include "phaselab/parallel.hpp"

namespace phaselab {

namespace {

constexpr double kFourthMomentFloor = 1.0 + 1e-6;
constexpr std::uint64_t kMomentStream = 0x6d6f6d656e7473ULL;

enum DistKind { kGaussian = 0, kUniform = 1, kDiscrete = 2 };

void require_dim(const MeasurementMatrix& phi, Eigen::Index n, const char* what) {
    if (n != phi.n()) {
        throw Error(ErrorCode::DimensionMismatch,
                    std::string(what) + " has dimension " + std::to_string(n) + ", expected " +
                        std::to_string(phi.n()));
    }
}

void require_hermitian(const Matrix& x, int n) {
    if (x.rows() != n || x.cols() != n) {
        throw Error(ErrorCode::DimensionMismatch, "matrix must be " + std::to_string(n) + " x " +
                                                      std::to_string(n));
    }
    if (!is_hermitian(x)) throw Error(ErrorCode::NotSymmetric, "matrix is not symmetric/Hermitian");
}

}  // namespace

void to_json(nlohmann::json& j, const EnsembleSpec& spec) {
    nlohmann::json dist;
    std::visit(
        [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Gaussian>) {
                dist = {{"kind", "gaussian"}};
            } else if constexpr (std::is_same_v<T, UniformSymmetric>) {
                dist = {{"kind", "uniform"}};
            } else {
                dist = {{"kind", "discrete"}, {"values", d.values}, {"probs", d.probs}};
            }
        },
        spec.dist);
    j = {{"field", std::string(to_string(spec.field))},
         {"n", spec.n},
         {"m", spec.m},
         {"dist", dist},
         {"seed", spec.seed}};
}

void from_json(const nlohmann::json& j, EnsembleSpec& spec) {
    try {
        spec.field = field_from_string(j.at("field").get<std::string>());
        spec.n = j.at("n").get<int>();
        spec.m = j.at("m").get<int>();
        spec.seed = j.at("seed").get<std::uint64_t>();
        const auto& d = j.at("dist");
        const std::string kind = d.is_string() ? d.get<std::string>() : d.at("kind").get<std::string>();
        if (kind == "gaussian") {
            spec.dist = Gaussian{};
        } else if (kind == "uniform") {
            spec.dist = UniformSymmetric{};
        } else if (kind == "discrete") {
            spec.dist = DiscreteSymmetric{d.at("values").get<std::vector<double>>(),
                                          d.at("probs").get<std::vector<double>>()};
        } else {
            throw Error(ErrorCode::ConfigError, "unknown distribution '" + kind + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("ensemble spec: ") + e.what());
    }
    if (spec.n < 1 || spec.m < 1) throw Error(ErrorCode::ConfigError, "n and m must be positive");
}

EntrySampler::EntrySampler(Field field, const Distribution& dist)
    : field_(field), kind_(static_cast<int>(dist.index())) {
    double real_fourth = 3.0;
    if (kind_ == kUniform) {
        real_fourth = 9.0 / 5.0;
    } else if (kind_ == kDiscrete) {
        const auto& d = std::get<DiscreteSymmetric>(dist);
        if (d.values.empty() || d.values.size() != d.probs.size()) {
            throw Error(ErrorCode::InvalidDistribution, "values and probs must be nonempty and equal length");
        }
        if (std::any_of(d.probs.begin(), d.probs.end(), [](double p) { return !(p >= 0.0); })) {
            throw Error(ErrorCode::InvalidDistribution, "probabilities must be nonnegative");
        }
        const double total = std::accumulate(d.probs.begin(), d.probs.end(), 0.0);
        if (!(total > 0.0) || !std::isfinite(total)) {
            throw Error(ErrorCode::InvalidDistribution, "probabilities must sum to a positive value");
        }
        double mean = 0;
        for (std::size_t i = 0; i < d.values.size(); ++i) mean += d.probs[i] / total * d.values[i];
        double var = 0;
        for (std::size_t i = 0; i < d.values.size(); ++i) {
            var += d.probs[i] / total * (d.values[i] - mean) * (d.values[i] - mean);
        }
        if (!(var > 0.0) || !std::isfinite(var)) {
            throw Error(ErrorCode::InvalidDistribution, "variance cannot be normalized to 1");
        }
        const double sd = std::sqrt(var);
        real_fourth = 0;
        double acc = 0;
        for (std::size_t i = 0; i < d.values.size(); ++i) {
            const double w = (d.values[i] - mean) / sd;
            const double p = d.probs[i] / total;
            values_.push_back(w);
            acc += p;
            cumulative_.push_back(acc);
            real_fourth += p * w * w * w * w;
        }
        cumulative_.back() = 1.0;
    }
    // Complex entries (a + ib)/sqrt(2) with a, b i.i.d.: E|phi|^4 = (mu4 + 1) / 2.
    fourth_moment_ = field == Field::Real ? real_fourth : 0.5 * (real_fourth + 1.0);
    if (fourth_moment_ <= kFourthMomentFloor) {
        throw Error(ErrorCode::InvalidDistribution,
                    "fourth moment " + std::to_string(fourth_moment_) +
                        " must exceed 1 (entries with |phi| constant cannot separate e1 from e2)");
    }
}

void EntrySampler::fill(Rng& rng, Eigen::Ref<Vector> out) const {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double root3 = std::sqrt(3.0);
    auto draw = [&]() -> double {
        switch (kind_) {
            case kGaussian: return normal(rng);
            case kUniform: return root3 * (2.0 * unit(rng) - 1.0);
            default: {
                const double u = unit(rng);
                const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
                const auto idx = std::min<std::size_t>(it - cumulative_.begin(), values_.size() - 1);
                return values_[idx];
            }
        }
    };
    if (field_ == Field::Real) {
        for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = Complex(draw(), 0.0);
    } else {
        const double s = std::sqrt(0.5);
        for (Eigen::Index i = 0; i < out.size(); ++i) {
            const double re = draw();
            const double im = draw();
            out[i] = Complex(s * re, s * im);
        }
    }
}

double fourth_moment_excess(const EnsembleSpec& spec) {
    return EntrySampler(spec.field, spec.dist).fourth_moment() - 1.0;
}

MeasurementMatrix::MeasurementMatrix(Matrix rows, Field field, std::optional<EnsembleSpec> spec)
    : rows_(std::move(rows)), field_(field), spec_(std::move(spec)) {
    if (field_ == Field::Real) {
        if (!is_real_valued(rows_)) {
            throw Error(ErrorCode::DimensionMismatch, "real-field measurement rows must be real");
        }
        real_rows_ = rows_.real();
    }
}

Vector MeasurementMatrix::inner(const Vector& x) const {
    require_dim(*this, x.size(), "signal");
    if (field_ == Field::Real && is_real_valued(x)) {
        return (real_rows_ * x.real()).cast<Complex>();
    }
    return rows_.conjugate() * x;
}

RealVector MeasurementMatrix::quadratic(const Matrix& x) const {
    if (x.rows() != n() || x.cols() != n()) {
        throw Error(ErrorCode::DimensionMismatch, "matrix must be n x n");
    }
    if (field_ == Field::Real && is_real_valued(x)) {
        const RealMatrix y = real_rows_ * x.real();
        return y.cwiseProduct(real_rows_).rowwise().sum();
    }
    const Matrix y = rows_.conjugate() * x;
    return y.cwiseProduct(rows_).rowwise().sum().real();
}

Matrix MeasurementMatrix::weighted_gram(const RealVector& w) const {
    if (w.size() != m()) throw Error(ErrorCode::DimensionMismatch, "weights must have length m");
    if (field_ == Field::Real) {
        return (real_rows_.transpose() * w.asDiagonal() * real_rows_).cast<Complex>();
    }
    return rows_.transpose() * w.asDiagonal() * rows_.conjugate();
}

Vector MeasurementMatrix::combine(const Vector& y) const {
    if (y.size() != m()) throw Error(ErrorCode::DimensionMismatch, "coefficients must have length m");
    if (field_ == Field::Real && is_real_valued(y)) {
        return (real_rows_.transpose() * y.real()).cast<Complex>();
    }
    return rows_.transpose() * y;
}

Vector sample_vector(const EntrySampler& sampler, int n, std::uint64_t seed, std::uint64_t stream) {
    Vector v(n);
    Rng rng = make_rng(seed, stream);
    sampler.fill(rng, v);
    return v;
}

MeasurementMatrix sample_ensemble(const EnsembleSpec& spec) {
    if (spec.n < 1 || spec.m < 1) throw Error(ErrorCode::ConfigError, "n and m must be positive");
    const EntrySampler sampler(spec.field, spec.dist);
    Matrix rows(spec.m, spec.n);
    parallel_for(static_cast<std::size_t>(spec.m), [&](std::size_t k) {
        rows.row(static_cast<Eigen::Index>(k)) =
            sample_vector(sampler, spec.n, spec.seed, k).transpose();
    });
    return MeasurementMatrix(std::move(rows), spec.field, spec);
}

MomentReport estimate_moments(const EnsembleSpec& spec, std::size_t trials) {
    if (trials < 1000) throw Error(ErrorCode::ConfigError, "estimate_moments needs at least 1000 trials");
    const EntrySampler sampler(spec.field, spec.dist);
    Vector draws(static_cast<Eigen::Index>(trials));
    Rng rng = make_rng(spec.seed, kMomentStream);
    sampler.fill(rng, draws);

    const double count = static_cast<double>(trials);
    MomentReport r;
    r.trials = trials;
    r.mean = draws.mean();
    const Eigen::ArrayXd abs2 = draws.array().abs2();
    const Eigen::ArrayXd centered2 = (draws.array() - r.mean).abs2();
    const Eigen::ArrayXd abs4 = abs2.square();
    auto std_error = [count](const Eigen::ArrayXd& a) {
        const double mu = a.mean();
        return std::sqrt((a - mu).square().sum() / (count - 1.0) / count);
    };
    r.mean_se = std::sqrt(centered2.sum() / (count - 1.0) / count);
    r.variance = centered2.sum() / (count - 1.0);
    r.variance_se = std_error(centered2);
    r.fourth_moment = abs4.mean();
    r.fourth_moment_se = std_error(abs4);
    r.pseudo_second = draws.array().square().mean();
    const Eigen::ArrayXd absv = abs2.sqrt();
    for (int q : {2, 4, 6, 8}) {
        const double moment = absv.pow(q).mean();
        r.psi2_proxy = std::max(r.psi2_proxy, std::pow(moment, 1.0 / q) / std::sqrt(double(q)));
    }
    return r;
}

RealVector amplitude_op(const MeasurementMatrix& phi, const Vector& x) {
    return phi.inner(x).cwiseAbs();
}

RealVector intensity_op(const MeasurementMatrix& phi, const Vector& x) {
    return phi.inner(x).cwiseAbs2();
}

RealVector phaseless_op(const MeasurementMatrix& phi, const Vector& x, int ell) {
    if (ell == 1) return amplitude_op(phi, x);
    if (ell == 2) return intensity_op(phi, x);
    throw Error(ErrorCode::ConfigError, "ell must be 1 or 2");
}

RealVector lifting_op(const MeasurementMatrix& phi, const Matrix& x, double p) {
    if (!(p >= 0.5 && p <= 1.0)) {
        throw Error(ErrorCode::InvalidExponent, "p must lie in [1/2, 1], got " + std::to_string(p));
    }
    require_hermitian(x, phi.n());
    const RealVector q = phi.quadratic(x).cwiseAbs();
    const double inv_m = 1.0 / phi.m();
    if (p == 1.0) return inv_m * q;
    if (p == 0.5) return inv_m * q.cwiseSqrt();
    return inv_m * q.array().pow(p).matrix();
}

RealVector rank_one_op(const MeasurementMatrix& phi, const Matrix& x) {
    require_hermitian(x, phi.n());
    return phi.quadratic(x);
}

namespace {

static_assert(std::endian::native == std::endian::little, "binary export assumes a little-endian host");

constexpr std::array<char, 4> kMagic{'P', 'L', 'A', 'B'};
constexpr std::uint32_t kVersion = 1;

struct Header {
    std::array<char, 4> magic;
    std::uint32_t version;
    std::uint32_t field;
    std::uint32_t reserved;
    std::uint64_t n;
    std::uint64_t m;
};
static_assert(sizeof(Header) == 32);

}  // namespace

void write_binary(const MeasurementMatrix& phi, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    const Header h{kMagic, kVersion, phi.field() == Field::Real ? 0u : 1u, 0u,
                   static_cast<std::uint64_t>(phi.n()), static_cast<std::uint64_t>(phi.m())};
    out.write(reinterpret_cast<const char*>(&h), sizeof h);
    std::vector<double> row;
    for (int k = 0; k < phi.m(); ++k) {
        row.clear();
        for (int j = 0; j < phi.n(); ++j) {
            row.push_back(phi.rows()(k, j).real());
            if (phi.field() == Field::Complex) row.push_back(phi.rows()(k, j).imag());
        }
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size() * sizeof(double)));
    }
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

MeasurementMatrix read_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    Header h{};
    in.read(reinterpret_cast<char*>(&h), sizeof h);
    if (!in || h.magic != kMagic) throw Error(ErrorCode::IoError, "not a PLAB file: " + path.string());
    if (h.version != kVersion || h.field > 1) {
        throw Error(ErrorCode::IoError, "unsupported PLAB header in " + path.string());
    }
    const Field field = h.field == 0 ? Field::Real : Field::Complex;
    const auto n = static_cast<Eigen::Index>(h.n);
    const auto m = static_cast<Eigen::Index>(h.m);
    const std::size_t per_row = static_cast<std::size_t>(n) * (field == Field::Real ? 1 : 2);
    Matrix rows(m, n);
    std::vector<double> row(per_row);
    for (Eigen::Index k = 0; k < m; ++k) {
        in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(per_row * sizeof(double)));
        if (!in) throw Error(ErrorCode::IoError, "truncated PLAB file: " + path.string());
        for (Eigen::Index j = 0; j < n; ++j) {
            rows(k, j) = field == Field::Real ? Complex(row[j], 0.0) : Complex(row[2 * j], row[2 * j + 1]);
        }
    }
    return MeasurementMatrix(std::move(rows), field);
}

}  // namespace phaselab
