#include "qkd/coverage.hpp"

#include <cmath>
#include <stdexcept>

#include "qkd/estimator.hpp"

namespace qkd::mc {

// five gain bounds + kappa1 + e0n0; the default budget splits eps_decoy by 7
static_assert(kBoundCount == 7);

std::string_view bound_name(Bound b) {
    switch (b) {
        case Bound::q_mu_upper: return "Qmu_upper";
        case Bound::q_nu_lower: return "Qnu_lower";
        case Bound::q_nu_upper: return "Qnu_upper";
        case Bound::q_lambda_lower: return "Qlambda_lower";
        case Bound::q_lambda_upper: return "Qlambda_upper";
        case Bound::kappa1: return "kappa1";
        case Bound::e0n0: return "e0n0";
    }
    return "?";
}

WilsonInterval wilson_interval(count_t k, count_t n, double z) {
    if (n < 1) throw std::invalid_argument("wilson_interval: n must be >= 1");
    const double nd = static_cast<double>(n);
    const double kd = static_cast<double>(k);
    const double z2 = z * z;
    const double center = (kd + z2 / 2.0) / (nd + z2);
    const double half =
        z * std::sqrt(kd * (nd - kd) / nd + z2 / 4.0) / (nd + z2);
    return WilsonInterval{std::max(center - half, 0.0), std::min(center + half, 1.0)};
}

double CoverageReport::rate(Bound b) const {
    return static_cast<double>(violations[static_cast<int>(b)]) /
           static_cast<double>(trials);
}

double CoverageReport::joint_rate() const {
    return static_cast<double>(joint_violations) / static_cast<double>(trials);
}

WilsonInterval CoverageReport::interval(Bound b) const {
    return wilson_interval(violations[static_cast<int>(b)], trials);
}

WilsonInterval CoverageReport::joint_interval() const {
    return wilson_interval(joint_violations, trials);
}

TrialOutcome run_trial(const IntensityConfig& cfg, const ChannelExpectation& truth,
                       count_t n_pulses, const SecurityParams& sec, std::uint64_t seed) {
    TrialLatents latents;
    const ObservedCounts counts = sample_trial(cfg, truth, n_pulses, seed, latents);

    TrialOutcome out;
    out.estimate = process_decoy_statistics(counts, cfg, sec);
    out.aborted = out.estimate.aborted;
    const EstimateResult& est = out.estimate;

    auto mark = [&out](Bound b, bool violated) {
        if (violated) out.violations |= 1u << static_cast<int>(b);
    };

    mark(Bound::q_mu_upper, est.q_mu_u < truth.q_mu);
    mark(Bound::q_nu_lower, est.q_nu_l > truth.q_nu);
    mark(Bound::q_nu_upper, est.q_nu_u < truth.q_nu);
    mark(Bound::q_lambda_lower, est.q_lambda_l > truth.q_lambda);
    mark(Bound::q_lambda_upper, est.q_lambda_u < truth.q_lambda);

    const double phi = compute_phi(sec.eps_decoy, sec.a);

    // kappa1: the realized single-photon fraction must clear the one-sided
    // bound built from the true theta1 (true variance, no plug-in).
    if (counts.l_ver >= 1) {
        const double lv = static_cast<double>(counts.l_ver);
        const double bound =
            truth.theta1 - phi * std::sqrt(truth.theta1 * (1.0 - truth.theta1) / lv);
        mark(Bound::kappa1, static_cast<double>(latents.n1) / lv < bound);
    }

    // e0n0: the realized vacuum-error count against the bound from the true
    // zero-photon yield; the clamp at zero makes the bound trivially valid
    // whenever the fluctuation term dominates.
    {
        const double q_vac = std::exp(-cfg.mu) * truth.y0 / 4.0;
        const double nd = static_cast<double>(counts.N_mu);
        const double bound =
            std::max(nd * q_vac - phi * std::sqrt(nd * q_vac * (1.0 - q_vac)), 0.0);
        mark(Bound::e0n0, static_cast<double>(latents.e0n0) < bound);
    }

    return out;
}

CoverageReport coverage_experiment(const IntensityConfig& cfg,
                                   const ChannelExpectation& truth, count_t n_pulses,
                                   const SecurityParams& sec, count_t trials,
                                   std::uint64_t seed, bool parallel) {
    if (trials < 1) throw std::invalid_argument("coverage_experiment: trials must be >= 1");
    cfg.validate();
    sec.validate();

    CoverageReport report;
    report.trials = trials;

    count_t viol[kBoundCount] = {};
    count_t joint = 0, aborts = 0;

#pragma omp parallel for schedule(static) if (parallel) \
    reduction(+ : joint, aborts, viol)
    for (count_t t = 0; t < trials; ++t) {
        const TrialOutcome o = run_trial(cfg, truth, n_pulses, sec, derive_seed(seed, t));
        for (int b = 0; b < kBoundCount; ++b)
            viol[b] += (o.violations >> b) & 1u;
        joint += o.violations != 0 ? 1 : 0;
        aborts += o.aborted ? 1 : 0;
    }

    for (int b = 0; b < kBoundCount; ++b) report.violations[b] = viol[b];
    report.joint_violations = joint;
    report.aborts = aborts;
    return report;
}

}  // namespace qkd::mc
