#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "qkd/sampling.hpp"
#include "qkd/types.hpp"

// Monte Carlo coverage experiments: sample sessions from known truth, run
// the estimator, and count how often each of the seven one-sided bounds
// fails against the truth. Empirically validates the failure-probability
// accounting at confidence levels where violations are actually observable.

namespace qkd::mc {

/// The seven one-sided bound events consumed per pipeline run.
enum class Bound : int {
    q_mu_upper = 0,
    q_nu_lower,
    q_nu_upper,
    q_lambda_lower,
    q_lambda_upper,
    kappa1,
    e0n0,
};
inline constexpr int kBoundCount = 7;

std::string_view bound_name(Bound b);

/// One simulated session compared against the truth.
struct TrialOutcome {
    EstimateResult estimate;
    std::uint32_t violations = 0;  // bit i set <=> Bound(i) failed
    bool aborted = false;

    bool violated(Bound b) const { return (violations >> static_cast<int>(b)) & 1u; }
};

struct WilsonInterval {
    double low;
    double high;
};

/// Wilson score interval for k successes in n trials at normal quantile z.
WilsonInterval wilson_interval(count_t k, count_t n, double z = 1.959963984540054);

struct CoverageReport {
    count_t trials = 0;
    std::array<count_t, kBoundCount> violations{};
    count_t joint_violations = 0;
    count_t aborts = 0;

    double rate(Bound b) const;
    double joint_rate() const;
    WilsonInterval interval(Bound b) const;
    WilsonInterval joint_interval() const;
};

/// Runs one trial: sample a session, process it, and compare every bound
/// against the truth values (true gains, true theta1 for the realized
/// single-photon fraction, true vacuum-error rate for the realized e0*n0).
TrialOutcome run_trial(const IntensityConfig& cfg, const ChannelExpectation& truth,
                       count_t n_pulses, const SecurityParams& sec, std::uint64_t seed);

/// Aggregates `trials` independent trials with per-trial derived seeds.
/// The parallel path distributes trials across OpenMP threads; the serial
/// path is the reference implementation and produces the identical report.
CoverageReport coverage_experiment(const IntensityConfig& cfg,
                                   const ChannelExpectation& truth, count_t n_pulses,
                                   const SecurityParams& sec, count_t trials,
                                   std::uint64_t seed, bool parallel = true);

}  // namespace qkd::mc
