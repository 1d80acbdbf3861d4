#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "phaselab/ensembles.hpp"
#include "phaselab/geometry.hpp"

namespace phaselab {

enum class CertificateKind {
    StabilityLower,
    InjectivityLower,
    EmbedLower,
    EmbedUpper,
    SmallBallQ,
    RademacherR,
    ChaosS,
};

std::string_view to_string(CertificateKind kind);
bool is_lower_kind(CertificateKind kind);

/// Monte Carlo statistic (min, max or mean of per-trial values) with
/// nearest-rank quantiles of the per-trial values.
struct CertificateEstimate {
    CertificateKind kind = CertificateKind::StabilityLower;
    double statistic = 0;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    double q01 = 0;
    double q50 = 0;
    double q99 = 0;
};

void to_json(nlohmann::json& j, const CertificateEstimate& c);

/// Nearest-rank quantile, p in [0, 1].
double nearest_rank_quantile(std::vector<double> values, double p);

enum class Reduction { Min, Max, Mean };
CertificateEstimate summarize(CertificateKind kind, const std::vector<double>& values, std::uint64_t seed,
                              Reduction reduction);

/// Pairs with d_ell below this are resampled.
inline constexpr double kDegeneratePairDistance = 1e-10;

/// ||A^ell(u) - A^ell(v)||_q / (m^{1/q} d_ell(u, v)); nullopt if d_ell < 1e-10.
std::optional<double> stability_ratio(const MeasurementMatrix& phi, const Vector& u, const Vector& v, int ell,
                                      double q);

/// Min of stability_ratio over `pairs` sampled pairs (pair i from stream i of
/// `seed`), plus any caller-supplied pairs.
CertificateEstimate stability_constant_lower(const MeasurementMatrix& phi, const VectorSetDescriptor& set, int ell,
                                             double q, std::size_t pairs, std::uint64_t seed,
                                             std::span<const std::pair<Vector, Vector>> extra_pairs = {});

/// Min over unit-Frobenius X in cone(M - M) of ||A(X)||_q / m^{1/q}.
CertificateEstimate injectivity_constant_lower(const MeasurementMatrix& phi, const MatrixSetDescriptor& set,
                                               double q, std::size_t samples, std::uint64_t seed);

/// (phi_k^* (uu^* - vv^*) phi_k)_k computed from inner products.
RealVector lifted_difference(const MeasurementMatrix& phi, const Vector& u, const Vector& v);

/// ||B^p(uu^* - vv^*)||_1 / d_2(u, v)^p; nullopt if d_2 < 1e-10.
std::optional<double> embed_ratio(const MeasurementMatrix& phi, double p, const Vector& u, const Vector& v);

struct EmbedBounds {
    CertificateEstimate lower;
    CertificateEstimate upper;
};

/// u drawn from T1, v from T2 (each a cone-sphere sample scaled by a
/// log-uniform radius in [0.1, 10]; Finite members are used as-is).
EmbedBounds embed_bounds(const MeasurementMatrix& phi, double p, const VectorSetDescriptor& t1,
                         const VectorSetDescriptor& t2, std::size_t samples, std::uint64_t seed);

struct CorollaryChecks {
    CertificateEstimate f2_upper;  // (1/m) sum |<phi_k, u>| / ||u||
    CertificateEstimate f3_lower;  // p = 1/2 embedding ratio
    CertificateEstimate f0_lower;  // p = 1 embedding ratio
};

CorollaryChecks corollary_checks(const MeasurementMatrix& phi, const VectorSetDescriptor& set, std::size_t samples,
                                 std::uint64_t seed);

/// Min over the given matrices of the empirical P(|phi^* X phi| >= xi), with
/// `trials` draws of phi shared across all X.
CertificateEstimate small_ball_Q(const EnsembleSpec& spec, std::span<const Matrix> xs, double xi,
                                 std::size_t trials, std::uint64_t seed);
/// Same, over `samples` (>= 50) draws from cone(M - M) on the unit sphere.
CertificateEstimate small_ball_Q(const EnsembleSpec& spec, const MatrixSetDescriptor& set, double xi,
                                 std::size_t trials, std::size_t samples, std::uint64_t seed);

/// Mean over outer draws of max over the given X of |(1/m) sum eps_k <phi_k phi_k^*, X>|.
CertificateEstimate rademacher_R(const EnsembleSpec& spec, std::span<const Matrix> xs, int m,
                                 std::size_t mc_outer, std::uint64_t seed);
/// Same, with mc_inner matrices drawn from cone(M - M) on the unit sphere.
CertificateEstimate rademacher_R(const EnsembleSpec& spec, const MatrixSetDescriptor& set, int m,
                                 std::size_t mc_outer, std::size_t mc_inner, std::uint64_t seed);

enum class ChaosVariant {
    S,       // <phi phi^* - E phi phi^*, X>, one vector
    Sbar,    // <sum phi_k phi_k^* - m E phi phi^*, X>
    Stilde,  // <sum eps_k phi_k phi_k^*, X>
};

/// E sup over the symmetric set {+-X : X in xs} of the selected process.
CertificateEstimate chaos_S(const EnsembleSpec& spec, std::span<const Matrix> xs, int m, ChaosVariant variant,
                            std::size_t trials, std::uint64_t seed);
/// Same, with the sup over inner_samples elements X1 - X2 of M - M, where
/// X1, X2 are unit-Frobenius members of M.
CertificateEstimate chaos_S(const EnsembleSpec& spec, const MatrixSetDescriptor& set, int m, ChaosVariant variant,
                            std::size_t trials, std::size_t inner_samples, std::uint64_t seed);

/// Sample of M - M as used by chaos_S.
std::vector<Matrix> sample_difference_set(const MatrixSetDescriptor& set, Field field, std::size_t count,
                                          std::uint64_t seed);

struct BoundComparison {
    double bound_K33 = 0;  // sqrt(m) gamma2 + gamma1 + sqrt(m) trace_sup
    double bound_K44 = 0;  // sqrt(m) sqrt(R0) gamma2 + gamma1
    double R0 = 0;
};

BoundComparison bound_compare(const MatrixSetDescriptor& set, int m);

}  // namespace phaselab
