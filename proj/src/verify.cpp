#include "phaselab/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "phaselab/adversarial.hpp"
#include "phaselab/ensembles.hpp"
#include "phaselab/error.hpp"
#include "phaselab/geometry.hpp"
#include "phaselab/harness.hpp"
#include "phaselab/parallel.hpp"
#include "phaselab/rng.hpp"
#include "phaselab/solvers.hpp"
#include "phaselab/stability.hpp"

namespace phaselab {

namespace {

// Pinned tolerances and floors.
constexpr double kD2RelTol = 1e-10;
constexpr double kSandwichSlack = 1e-12;
constexpr double kSymNormSlack = 1e-9;
constexpr double kMomentSigmas = 3.0;
constexpr double kLiftTol = 1e-12;
constexpr double kStabilityFloor = 0.05;
constexpr double kInjectivityFloor = 0.05;
constexpr double kEmbedCeiling = 4.0;
constexpr double kOracleTol = 1e-9;
constexpr double kRecoverySuccessFloor = 0.8;
constexpr double kSharpnessFloor = 0.25;
constexpr double kSharpnessSpread = 2.0;
constexpr double kZeroResidualTol = 1e-12;
constexpr double kChaosRatioLo = 0.5;
constexpr double kChaosRatioHi = 2.0;
constexpr double kChaosBoundFactor = 10.0;

constexpr double kBudgetAc1 = 10.0;
constexpr double kBudgetAc2 = 5.0;
constexpr double kBudgetAc4 = 120.0;
constexpr double kBudgetAc8 = 600.0;

constexpr std::uint64_t kRootSeed = 20240601;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

double median(std::vector<double> v) { return nearest_rank_quantile(std::move(v), 0.5); }

EnsembleSpec gaussian(Field field, int n, int m, std::uint64_t seed) {
    EnsembleSpec s;
    s.field = field;
    s.n = n;
    s.m = m;
    s.dist = Gaussian{};
    s.seed = seed;
    return s;
}

struct Outcome {
    bool passed = true;
    std::ostringstream measured;
    void check(bool ok, const std::string& what) {
        if (!ok) {
            passed = false;
            measured << "FAILED[" << what << "] ";
        }
    }
};

void ac1(Outcome& o, const VerifyOptions& opts) {
    Rng rng = make_rng(kRootSeed, 1);
    std::uniform_int_distribution<int> dim(1, 32);
    double worst_d2 = 0, worst_sandwich = 0;
    for (int i = 0; i < 10000; ++i) {
        const Field field = i % 2 == 0 ? Field::Real : Field::Complex;
        const int n = dim(rng);
        const Vector u = gaussian_vector(n, field, rng);
        const Vector v = gaussian_vector(n, field, rng);
        const double closed = opts.d2(u, v);
        const double direct = dist_d2_materialized(u, v);
        worst_d2 = std::max(worst_d2, std::abs(closed - direct) / std::max(direct, 1e-300));
        const double d1 = dist_d1(u, v, field);
        const double gap = (u.norm() + v.norm()) * d1 - 2 * closed;
        worst_sandwich = std::max(worst_sandwich, gap / std::max(2 * direct, 1e-300));
    }
    o.check(worst_d2 <= kD2RelTol, "d2 closed form vs materialized");
    o.check(worst_sandwich <= kSandwichSlack, "2 d2 >= (|u|+|v|) d1");

    double lo = 2, hi = 0, worst_general = 0;
    for (int i = 0; i < 1000; ++i) {
        const Field field = i % 2 == 0 ? Field::Real : Field::Complex;
        const int n = dim(rng) + 1;
        Vector h = gaussian_vector(n, field, rng).normalized();
        Vector g = gaussian_vector(n, field, rng).normalized();
        const Matrix sym_raw = h * g.adjoint() + g * h.adjoint();
        const Complex hg = h.dot(g);
        const double general = std::sqrt(std::max(0.0, 2 + 2 * (hg * hg).real()));
        worst_general = std::max(worst_general, std::abs(sym_raw.norm() - general));
        // Rotate g so that h^* g is real before checking the range.
        if (field == Field::Complex && std::abs(hg) > 0) g *= std::conj(hg) / std::abs(hg);
        const double s = (h * g.adjoint() + g * h.adjoint()).norm();
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    o.check(worst_general <= kSymNormSlack, "||hg*+gh*|| general formula");
    o.check(lo >= std::sqrt(2.0) - kSymNormSlack && hi <= 2 + kSymNormSlack, "||hg*+gh*|| in [sqrt2, 2]");
    o.measured << "max_rel_d2=" << fmt(worst_d2) << " max_sandwich_gap=" << fmt(worst_sandwich)
               << " sym_range=[" << fmt(lo) << "," << fmt(hi) << "]";
}

void ac2(Outcome& o) {
    const MomentReport real = estimate_moments(gaussian(Field::Real, 1, 1, derive_seed(kRootSeed, 2)), 100000);
    const MomentReport cplx = estimate_moments(gaussian(Field::Complex, 1, 1, derive_seed(kRootSeed, 3)), 100000);
    const double zr = std::abs(real.fourth_moment - 3.0) / real.fourth_moment_se;
    const double zc = std::abs(cplx.fourth_moment - 2.0) / cplx.fourth_moment_se;
    o.check(zr <= kMomentSigmas, "real Gaussian fourth moment");
    o.check(zc <= kMomentSigmas, "complex Gaussian fourth moment");
    bool rejected = false;
    try {
        EntrySampler(Field::Real, DiscreteSymmetric{{-1.0, 1.0}, {0.5, 0.5}});
    } catch (const Error& e) {
        rejected = e.code() == ErrorCode::InvalidDistribution;
    }
    o.check(rejected, "Rademacher rejected");
    o.measured << "real_m4=" << fmt(real.fourth_moment) << " (" << fmt(zr) << " se) complex_m4="
               << fmt(cplx.fourth_moment) << " (" << fmt(zc) << " se) rademacher_rejected=" << rejected;
}

void ac3(Outcome& o) {
    double worst = 0;
    Rng rng = make_rng(kRootSeed, 4);
    for (int i = 0; i < 100; ++i) {
        const Field field = i % 2 == 0 ? Field::Real : Field::Complex;
        const MeasurementMatrix phi = sample_ensemble(gaussian(field, 12, 40, derive_seed(kRootSeed, 400 + i)));
        const Vector u = gaussian_vector(12, field, rng);
        const Matrix uu = u * u.adjoint();
        const double m = phi.m();
        const RealVector inten = intensity_op(phi, u);
        const RealVector amp = amplitude_op(phi, u);
        const double e1 = (m * lifting_op(phi, uu, 1.0) - inten).cwiseAbs().maxCoeff() / inten.cwiseAbs().maxCoeff();
        const double e2 = (m * lifting_op(phi, uu, 0.5) - amp).cwiseAbs().maxCoeff() / amp.cwiseAbs().maxCoeff();
        worst = std::max({worst, e1, e2});
    }
    o.check(worst <= kLiftTol, "m B^p(uu*) vs direct operators");
    o.measured << "max_rel_err=" << fmt(worst);
}

void ac4(Outcome& o) {
    const std::vector<VectorSetDescriptor> sets{{FullSet{32}}, {SparseSet{128, 4}}};
    double worst = 1e300;
    const int m = 16 * 32;
    for (std::size_t si = 0; si < sets.size(); ++si) {
        const MeasurementMatrix phi =
            sample_ensemble(gaussian(Field::Real, sets[si].dim(), m, derive_seed(kRootSeed, 40 + si)));
        for (int ell : {1, 2}) {
            for (double q : {1.0, 2.0}) {
                const auto c = stability_constant_lower(phi, sets[si], ell, q, 1000, derive_seed(kRootSeed, 41));
                o.measured << sets[si].describe() << "/l" << ell << "/q" << q << "=" << fmt(c.statistic) << " ";
                worst = std::min(worst, c.statistic);
            }
        }
    }
    o.check(worst >= kStabilityFloor, "stability floor");
}

void ac5(Outcome& o) {
    const MatrixSetDescriptor set{LowRank{32, 1}};
    const double budget = matrix_budget(set).m_budget;
    const int m_hi = oversampled_m(8.0, budget);
    const int m_lo = std::max(1, static_cast<int>(std::floor(budget / 4)));
    std::vector<double> hi(20), lo(20);
    parallel_for(20, [&](std::size_t s) {
        const std::uint64_t seed = derive_seed(kRootSeed, 500 + s);
        hi[s] = injectivity_constant_lower(sample_ensemble(gaussian(Field::Real, 32, m_hi, seed)), set, 2.0, 200,
                                           derive_seed(seed, 1))
                    .statistic;
        lo[s] = injectivity_constant_lower(sample_ensemble(gaussian(Field::Real, 32, m_lo, seed)), set, 2.0, 200,
                                           derive_seed(seed, 1))
                    .statistic;
    });
    const double floor_hi = *std::min_element(hi.begin(), hi.end());
    o.check(floor_hi >= kInjectivityFloor, "injectivity floor");
    o.check(median(lo) < median(hi), "below-budget median smaller");
    o.measured << "m=" << m_hi << " min=" << fmt(floor_hi) << " median=" << fmt(median(hi)) << "; m=" << m_lo
               << " median=" << fmt(median(lo));
}

void ac6(Outcome& o) {
    const VectorSetDescriptor set{FullSet{32}};
    double lo = 1e300, hi = 0;
    bool ordered = true;
    for (double p : {0.5, 1.0}) {
        for (int s = 0; s < 20; ++s) {
            const std::uint64_t seed = derive_seed(kRootSeed, 600 + s);
            const MeasurementMatrix phi = sample_ensemble(gaussian(Field::Real, 32, 512, seed));
            const EmbedBounds b = embed_bounds(phi, p, set, set, 500, derive_seed(seed, 1));
            lo = std::min(lo, b.lower.statistic);
            hi = std::max(hi, b.upper.statistic);
            ordered = ordered && b.lower.statistic <= b.upper.statistic;
        }
    }
    o.check(lo > 0, "EmbedLower > 0");
    o.check(ordered, "EmbedLower <= EmbedUpper");
    o.check(hi <= kEmbedCeiling, "EmbedUpper <= 4");
    o.measured << "min_lower=" << fmt(lo) << " max_upper=" << fmt(hi);
}

void ac7(Outcome& o) {
    double worst = 0;
    for (int i = 0; i < 50; ++i) {
        const std::uint64_t seed = derive_seed(kRootSeed, 700 + i);
        Rng rng = make_rng(seed, 0);
        const Field field = i % 2 == 0 ? Field::Real : Field::Complex;
        const std::size_t size = 8 + std::size_t(i) % 57;
        FiniteSet finite;
        for (std::size_t k = 0; k < size; ++k) finite.members.push_back(gaussian_vector(8, field, rng).normalized());
        const int ell = 1 + i % 2;
        const double q = i % 4 < 2 ? 2.0 : 1.0;
        const MeasurementMatrix phi = sample_ensemble(gaussian(field, 8, 24, derive_seed(seed, 1)));
        RealVector b = phaseless_op(phi, finite.members[std::size_t(i) % size], ell);
        std::normal_distribution<double> noise(0.0, 0.1);
        for (Eigen::Index k = 0; k < b.size(); ++k) b[k] += noise(rng);
        SolverConfig cfg;
        cfg.q = q;
        cfg.seed = derive_seed(seed, 2);
        const VectorSetDescriptor set{finite};
        const PhaseReport a = solve_phase(ell, phi, b, set, cfg, std::nullopt);
        const PhaseReport ref = solve_finite_oracle(ell, phi, b, finite, q, std::nullopt);
        worst = std::max(worst, std::abs(a.objective_final - ref.objective_final) /
                                    std::max(1.0, ref.objective_final));
    }
    o.check(worst <= kOracleTol, "solve_phase vs oracle");
    o.measured << "max_objective_gap=" << fmt(worst);
}

void ac8(Outcome& o) {
    const VectorSetDescriptor set{SparseSet{128, 4}};
    const double budget = std::pow(gamma2_budget(set), 2.0);
    SolverConfig cfg;
    cfg.restarts = 5;
    cfg.seed = 0;
    std::vector<double> rates;
    for (double f : {1.0, 2.0, 4.0, 8.0, 16.0}) {
        const int m = oversampled_m(f, budget);
        std::vector<int> success(50);
        parallel_for(50, [&](std::size_t t) {
            success[t] = run_vector_recovery(gaussian(Field::Real, 128, m, 0), set, 2, cfg, NoiseModel{},
                                             derive_seed(kRootSeed + 8, t), 1e-2)
                             .success;
        });
        double rate = 0;
        for (int s : success) rate += s;
        rates.push_back(rate / 50);
        o.measured << "m=" << m << ":" << fmt(rates.back()) << " ";
    }
    o.check(std::is_sorted(rates.begin(), rates.end()), "monotone success rate");
    o.check(rates.back() >= kRecoverySuccessFloor, "success at oversample 16");
}

void ac9(Outcome& o) {
    double worst_residual = 0;
    for (double q : {1.0, 2.0}) {
        std::vector<double> medians;
        for (int m : {256, 1024}) {
            SharpnessConfig sc;
            sc.ensemble = gaussian(Field::Real, 32, m, derive_seed(kRootSeed, 900 + m));
            sc.ell = 2;
            sc.q = q;
            sc.trials = 100;
            const SharpnessResult r = sharpness_experiment(sc);
            medians.push_back(r.q50);
            worst_residual = std::max(worst_residual, r.max_relative_residual);
            o.measured << "q" << q << "/m" << m << " median=" << fmt(r.q50) << " ";
        }
        const double lo = std::min(medians[0], medians[1]);
        const double hi = std::max(medians[0], medians[1]);
        o.check(lo >= kSharpnessFloor, "median ratio floor");
        o.check(hi <= kSharpnessSpread * lo, "median stable across m");
    }
    o.check(worst_residual <= kZeroResidualTol, "zero residual");
    o.measured << "max_rel_residual=" << fmt(worst_residual);
}

void ac10(Outcome& o) {
    for (int n : {16, 64, 256}) {
        const std::vector<Matrix> xs{Matrix::Identity(n, n) / std::sqrt(double(n))};
        const auto c = chaos_S(gaussian(Field::Real, n, 1, 0), xs, 1, ChaosVariant::Stilde, 2000,
                               derive_seed(kRootSeed, 1000 + n));
        const double ratio = c.statistic / std::sqrt(double(n));
        o.check(ratio >= kChaosRatioLo && ratio <= kChaosRatioHi, "S~/sqrt(n) at n=" + std::to_string(n));
        o.measured << "n" << n << ":" << fmt(ratio) << " ";
    }
    bool ordered = true;
    for (const auto& [n, r] : {std::pair{16, 2}, {32, 2}, {32, 4}, {64, 3}}) {
        for (int m : {1, 16, 64, 256, 1024, 4096}) {
            const BoundComparison b = bound_compare(MatrixSetDescriptor{LowRank{n, r}}, m);
            ordered = ordered && b.bound_K33 < b.bound_K44;
        }
    }
    o.check(ordered, "K33 < K44 for R >= 2");
    const MatrixSetDescriptor set{LowRank{16, 1}};
    for (int m : {64, 256}) {
        const auto c = chaos_S(gaussian(Field::Real, 16, m, 0), set, m, ChaosVariant::Stilde, 200, 200,
                               derive_seed(kRootSeed, 1100 + m));
        const double bound = bound_compare(set, m).bound_K33;
        o.check(c.statistic <= kChaosBoundFactor * bound, "S~ <= 10 K33 at m=" + std::to_string(m));
        o.measured << "m" << m << " S~=" << fmt(c.statistic) << " K33=" << fmt(bound) << " ";
    }
}

void ac11(Outcome& o) {
    const MatrixSetDescriptor set{LowRank{32, 1}};
    NoiseModel noise;
    noise.outlier_fraction = 0.05;
    SolverConfig base;
    base.seed = 0;
    std::vector<double> e1(50), e2(50);
    parallel_for(50, [&](std::size_t t) {
        const std::uint64_t seed = derive_seed(kRootSeed + 11, t);
        SolverConfig c1 = base, c2 = base;
        c1.q = 1;
        c2.q = 2;
        const EnsembleSpec ens = gaussian(Field::Real, 32, 320, 0);
        e1[t] = run_matrix_recovery(ens, set, c1, noise, seed, 1e-2).relative_error;
        e2[t] = run_matrix_recovery(ens, set, c2, noise, seed, 1e-2).relative_error;
    });
    o.check(median(e1) < median(e2), "q=1 median below q=2");
    o.measured << "median_q1=" << fmt(median(e1)) << " median_q2=" << fmt(median(e2));
}

const char* kNames[kCriterionCount] = {
    "metric/identity suite", "ensemble moments",        "lifting consistency",   "stability certificate",
    "injectivity certificate", "embedding sandwich",    "oracle equivalence",    "recovery phase transition",
    "adversarial sharpness",   "chaos bound comparison", "robustness ordering",
};

}  // namespace

VerifyOptions::VerifyOptions() : d2([](const Vector& u, const Vector& v) { return dist_d2(u, v); }) {}

Suite suite_from_string(std::string_view name) {
    if (name == "fast") return Suite::Fast;
    if (name == "full") return Suite::Full;
    throw Error(ErrorCode::ConfigError, "suite must be fast or full");
}

std::string_view to_string(Suite suite) { return suite == Suite::Fast ? "fast" : "full"; }

bool VerifyReport::all_passed() const {
    return std::all_of(criteria.begin(), criteria.end(), [](const CriterionResult& c) { return c.passed; });
}

void to_json(nlohmann::json& j, const CriterionResult& r) {
    j = {{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"measured", r.measured}, {"seconds", r.seconds}};
}

void to_json(nlohmann::json& j, const VerifyReport& r) {
    j = {{"suite", std::string(to_string(r.suite))}, {"all_passed", r.all_passed()}, {"criteria", r.criteria}};
}

std::vector<int> suite_criteria(Suite suite) {
    if (suite == Suite::Fast) return {1, 2, 3, 6, 7, 10};
    std::vector<int> all(kCriterionCount);
    for (int i = 0; i < kCriterionCount; ++i) all[std::size_t(i)] = i + 1;
    return all;
}

CriterionResult run_criterion(int id, const VerifyOptions& opts) {
    CriterionResult r;
    r.id = id;
    if (id < 1 || id > kCriterionCount) {
        r.name = "unknown";
        r.measured = "no such criterion";
        return r;
    }
    r.name = kNames[id - 1];
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
        switch (id) {
            case 1: ac1(o, opts); break;
            case 2: ac2(o); break;
            case 3: ac3(o); break;
            case 4: ac4(o); break;
            case 5: ac5(o); break;
            case 6: ac6(o); break;
            case 7: ac7(o); break;
            case 8: ac8(o); break;
            case 9: ac9(o); break;
            case 10: ac10(o); break;
            case 11: ac11(o); break;
        }
    } catch (const std::exception& e) {
        o.check(false, std::string("exception: ") + e.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double budget = id == 1 ? kBudgetAc1 : id == 2 ? kBudgetAc2 : id == 4 ? kBudgetAc4 : id == 8 ? kBudgetAc8 : 0;
    if (budget > 0) o.check(r.seconds < budget, "runtime budget " + fmt(budget) + " s");
    r.passed = o.passed;
    r.measured = o.measured.str();
    return r;
}

VerifyReport verify(Suite suite, const VerifyOptions& opts) {
    VerifyReport report;
    report.suite = suite;
    for (int id : suite_criteria(suite)) report.criteria.push_back(run_criterion(id, opts));
    return report;
}

std::string format_line(const CriterionResult& r) {
    std::ostringstream out;
    out << (r.passed ? "PASS" : "FAIL") << "  AC" << r.id << " " << r.name << "  " << r.measured << " ("
        << fmt(r.seconds) << " s)";
    return out.str();
}

}  // namespace phaselab
