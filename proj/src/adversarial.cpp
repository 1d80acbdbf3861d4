#include "phaselab/adversarial.hpp"

#include <cmath>

#include "phaselab/error.hpp"
#include "phaselab/parallel.hpp"
#include "phaselab/solvers.hpp"
#include "phaselab/stability.hpp"

namespace phaselab {

namespace {

constexpr double kEquivalenceThreshold = 1e-8;
constexpr double kStarSeparation = 0.1;
constexpr std::uint64_t kGammaStream = 0x67616d6d61ULL;
constexpr std::uint64_t kTargetStream = 0x746172676574ULL;

Vector random_unit(int n, Field field, Rng& rng) {
    Vector v = gaussian_vector(n, field, rng);
    return v / v.norm();
}

}  // namespace

AdversarialInstance make_phase_noise(const MeasurementMatrix& phi, int ell, const Vector& x0, const Vector& x_star,
                                     double q) {
    if (!(q >= 1.0) || !std::isfinite(q)) throw Error(ErrorCode::ConfigError, "q must satisfy 1 <= q < inf");
    if (dist_d1(x0, x_star, phi.field()) < kEquivalenceThreshold) {
        throw Error(ErrorCode::EquivalentTargets, "x_star is phase-equivalent to x0");
    }
    AdversarialInstance inst;
    inst.ell = ell;
    inst.q = q;
    inst.x0 = x0;
    inst.x_star = x_star;
    const RealVector a_star = phaseless_op(phi, x_star, ell);
    const RealVector a0 = phaseless_op(phi, x0, ell);
    inst.z = a_star - a0;
    inst.z_norm = lq_norm(inst.z, q);
    if (inst.z_norm == 0.0) {
        throw Error(ErrorCode::EquivalentTargets, "x_star and x0 produce identical measurements");
    }
    inst.d_error = dist_ell(x_star, x0, phi.field(), ell);
    inst.ratio = inst.d_error * std::pow(double(phi.m()), 1.0 / q) / inst.z_norm;
    inst.zero_residual = lq_norm(a_star - (a0 + inst.z), q);
    return inst;
}

AdversarialInstance make_matrix_noise(const MeasurementMatrix& phi, const Matrix& X0, const Vector& w, double t,
                                      double q) {
    if (!(q >= 1.0) || !std::isfinite(q)) throw Error(ErrorCode::ConfigError, "q must satisfy 1 <= q < inf");
    const double w_norm = w.norm();
    if (t == 0.0 || w_norm == 0.0) throw Error(ErrorCode::ZeroPerturbation, "perturbation t ww^* is zero");
    const Vector unit = w / w_norm;
    AdversarialInstance inst;
    inst.matrix = true;
    inst.q = q;
    inst.X0 = X0;
    inst.X_star = X0 + t * (unit * unit.adjoint());
    inst.z = rank_one_op(phi, inst.X_star - X0);
    inst.z_norm = lq_norm(inst.z, q);
    if (inst.z_norm == 0.0) throw Error(ErrorCode::ZeroPerturbation, "perturbation is invisible to the measurements");
    inst.d_error = (inst.X_star - X0).norm();
    inst.ratio = inst.d_error * std::pow(double(phi.m()), 1.0 / q) / inst.z_norm;
    const RealVector a_star = rank_one_op(phi, inst.X_star);
    const RealVector a0 = rank_one_op(phi, X0);
    inst.zero_residual = lq_norm(a_star - (a0 + inst.z), q);
    return inst;
}

GammaEstimate gamma_moment(const EnsembleSpec& spec, int ell, double q, const Vector& u, const Vector& v,
                           std::size_t trials, std::uint64_t seed) {
    if (trials < 10000) throw Error(ErrorCode::ConfigError, "gamma_moment needs at least 1e4 trials");
    if (!(q >= 1.0) || !std::isfinite(q)) throw Error(ErrorCode::ConfigError, "q must satisfy 1 <= q < inf");
    if (u.size() != v.size()) throw Error(ErrorCode::DimensionMismatch, "u and v differ in dimension");
    const double d = dist_ell(u, v, spec.field, ell);
    if (!(d > 0.0)) throw Error(ErrorCode::EquivalentTargets, "d_ell(u, v) = 0");
    EnsembleSpec draw_spec = spec;
    draw_spec.n = static_cast<int>(u.size());
    draw_spec.m = static_cast<int>(trials);
    draw_spec.seed = derive_seed(seed, kGammaStream);
    const MeasurementMatrix phi = sample_ensemble(draw_spec);
    const Eigen::ArrayXd diff = ((phaseless_op(phi, u, ell) - phaseless_op(phi, v, ell)) / d).array().abs();
    const Eigen::ArrayXd moments = q == 1.0 ? diff : diff.pow(q);
    GammaEstimate out;
    out.value = moments.mean();
    const double count = double(trials);
    out.std_error = std::sqrt((moments - out.value).square().sum() / (count - 1.0) / count);
    return out;
}

SharpnessResult sharpness_experiment(const SharpnessConfig& cfg) {
    if (!(cfg.q >= 1.0)) throw Error(ErrorCode::ConfigError, "q must be >= 1");
    if (!std::isfinite(cfg.q)) throw Error(ErrorCode::ConfigError, "q = inf is excluded (requires 1 <= q < inf)");
    if (!cfg.matrix && cfg.ell != 1 && cfg.ell != 2) throw Error(ErrorCode::ConfigError, "ell must be 1 or 2");
    if (cfg.trials < 1) throw Error(ErrorCode::ConfigError, "trials must be positive");
    const int n = cfg.ensemble.n;
    const Field field = cfg.ensemble.field;
    SharpnessResult result;
    result.rows.resize(cfg.trials);
    std::vector<double> relative_residual(cfg.trials);
    parallel_for(cfg.trials, [&](std::size_t t) {
        EnsembleSpec spec = cfg.ensemble;
        spec.seed = derive_seed(cfg.ensemble.seed, t);
        const MeasurementMatrix phi = sample_ensemble(spec);
        Rng rng = make_rng(derive_seed(cfg.ensemble.seed, kTargetStream), t);
        const Vector x0 = random_unit(n, field, rng);
        AdversarialInstance inst;
        double star_scale = 0;
        if (cfg.matrix) {
            const Vector w = random_unit(n, field, rng);
            inst = make_matrix_noise(phi, x0 * x0.adjoint(), w, 1.0, cfg.q);
            star_scale = lq_norm(rank_one_op(phi, inst.X_star), cfg.q);
        } else {
            Vector x_star = random_unit(n, field, rng);
            while (dist_d1(x0, x_star, field) < kStarSeparation * x0.norm()) x_star = random_unit(n, field, rng);
            inst = make_phase_noise(phi, cfg.ell, x0, x_star, cfg.q);
            star_scale = lq_norm(phaseless_op(phi, x_star, cfg.ell), cfg.q);
        }
        SharpnessRow& row = result.rows[t];
        row.trial = t;
        row.seed = spec.seed;
        row.n = n;
        row.m = spec.m;
        row.q = cfg.q;
        row.ell_or_matrix = cfg.matrix ? "matrix" : std::to_string(cfg.ell);
        row.d_error = inst.d_error;
        row.z_norm = inst.z_norm;
        row.ratio = inst.ratio;
        row.zero_residual = inst.zero_residual;
        relative_residual[t] = star_scale > 0 ? inst.zero_residual / star_scale : inst.zero_residual;
    });
    std::vector<double> ratios;
    for (const auto& row : result.rows) ratios.push_back(row.ratio);
    result.q01 = nearest_rank_quantile(ratios, 0.01);
    result.q50 = nearest_rank_quantile(ratios, 0.50);
    result.q99 = nearest_rank_quantile(ratios, 0.99);
    for (double r : relative_residual) result.max_relative_residual = std::max(result.max_relative_residual, r);
    return result;
}

}  // namespace phaselab
