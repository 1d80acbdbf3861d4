#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "phaselab/rng.hpp"
#include "phaselab/types.hpp"

namespace phaselab {

struct Gaussian {};

/// Uniform on [-sqrt(3), sqrt(3)] (unit variance).
struct UniformSymmetric {};

/// Finite-support law; values are centered and scaled to unit variance on
/// construction of the sampler.
struct DiscreteSymmetric {
    std::vector<double> values;
    std::vector<double> probs;
};

using Distribution = std::variant<Gaussian, UniformSymmetric, DiscreteSymmetric>;

struct EnsembleSpec {
    Field field = Field::Real;
    int n = 1;
    int m = 1;
    Distribution dist = Gaussian{};
    std::uint64_t seed = 0;
};

void to_json(nlohmann::json& j, const EnsembleSpec& spec);
void from_json(const nlohmann::json& j, EnsembleSpec& spec);

/// Draws unit-variance scalar entries for one ensemble. For the Complex field
/// the real and imaginary parts are independent copies scaled by 1/sqrt(2),
/// so E[phi^2] = 0.
class EntrySampler {
public:
    /// Throws InvalidDistribution when the law cannot be normalized or its
    /// fourth moment is at most 1 + 1e-6.
    EntrySampler(Field field, const Distribution& dist);

    /// Overwrites every entry of `out` with fresh draws.
    void fill(Rng& rng, Eigen::Ref<Vector> out) const;

    /// E|phi|^4 of one entry, from the law itself.
    double fourth_moment() const { return fourth_moment_; }
    Field field() const { return field_; }

private:
    Field field_;
    int kind_;
    std::vector<double> values_;
    std::vector<double> cumulative_;
    double fourth_moment_;
};

/// Reported (beta) slack: E|phi|^4 - 1 of one entry.
double fourth_moment_excess(const EnsembleSpec& spec);

/// The measurement vectors phi_1..phi_m stored as rows of an m x n matrix.
class MeasurementMatrix {
public:
    MeasurementMatrix(Matrix rows, Field field, std::optional<EnsembleSpec> spec = std::nullopt);

    const Matrix& rows() const { return rows_; }
    Field field() const { return field_; }
    int n() const { return static_cast<int>(rows_.cols()); }
    int m() const { return static_cast<int>(rows_.rows()); }
    const std::optional<EnsembleSpec>& spec() const { return spec_; }

    /// (<phi_k, x>)_k with <phi, x> = phi^* x.
    Vector inner(const Vector& x) const;
    /// (phi_k^* X phi_k)_k, real for Hermitian X.
    RealVector quadratic(const Matrix& x) const;
    /// sum_k w_k phi_k phi_k^*.
    Matrix weighted_gram(const RealVector& w) const;
    /// sum_k y_k phi_k.
    Vector combine(const Vector& y) const;

    /// Real-field fast paths; only valid when field() == Real.
    const RealMatrix& real_rows() const { return real_rows_; }

private:
    Matrix rows_;
    RealMatrix real_rows_;
    Field field_;
    std::optional<EnsembleSpec> spec_;
};

/// m i.i.d. rows; row k is drawn from its own stream derive(seed, k).
MeasurementMatrix sample_ensemble(const EnsembleSpec& spec);

/// One measurement vector drawn from stream `stream` under spec.seed.
Vector sample_vector(const EntrySampler& sampler, int n, std::uint64_t seed, std::uint64_t stream);

struct MomentReport {
    std::size_t trials = 0;
    Complex mean{};
    double mean_se = 0;
    double variance = 0;
    double variance_se = 0;
    double fourth_moment = 0;
    double fourth_moment_se = 0;
    Complex pseudo_second{};  // E[phi^2]
    double psi2_proxy = 0;
};

/// Sample statistics of single entries. psi2_proxy is the largest
/// (E|phi|^q)^{1/q} / sqrt(q) over q in {2, 4, 6, 8}.
MomentReport estimate_moments(const EnsembleSpec& spec, std::size_t trials);

RealVector amplitude_op(const MeasurementMatrix& phi, const Vector& x);
RealVector intensity_op(const MeasurementMatrix& phi, const Vector& x);
/// ell = 1 amplitude, ell = 2 intensity.
RealVector phaseless_op(const MeasurementMatrix& phi, const Vector& x, int ell);
/// (1/m) |<phi_k phi_k^*, X>|^p, p in [1/2, 1].
RealVector lifting_op(const MeasurementMatrix& phi, const Matrix& x, double p);
/// <phi_k phi_k^*, X> = phi_k^* X phi_k.
RealVector rank_one_op(const MeasurementMatrix& phi, const Matrix& x);

/// 32-byte header {"PLAB", u32 version, u32 field, u32 reserved, u64 n, u64 m}
/// followed by row-major little-endian doubles (re/im pairs when complex).
void write_binary(const MeasurementMatrix& phi, const std::filesystem::path& path);
MeasurementMatrix read_binary(const std::filesystem::path& path);

}  // namespace phaselab
