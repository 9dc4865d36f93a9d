#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "qkd/channel.hpp"
#include "qkd/coverage.hpp"

using namespace qkd;
using namespace qkd::mc;

namespace {

// Wide-intensity configuration that keeps every per-intensity detection
// expectation in the hundreds at 25 km with only 1e6 pulses per trial, so
// violation rates are measurable without drifting far from their nominal
// level.
IntensityConfig wide_intensity() {
    IntensityConfig cfg;
    cfg.mu = 1.5;
    cfg.nu = 0.9;
    cfg.lambda = 0.44;
    cfg.p_mu = 0.35;
    cfg.p_nu = 0.25;
    cfg.p_lambda = 0.40;
    return cfg;
}

ChannelExpectation truth_at_25km(const IntensityConfig& cfg) {
    return session_expectation(cfg, 25.0, SetupParams{}, 1'000'000).channel;
}

}  // namespace

TEST_CASE("wilson interval: brackets the point estimate, clamps to [0,1]") {
    const WilsonInterval iv = wilson_interval(10, 100);
    CHECK(iv.low < 0.1);
    CHECK(iv.high > 0.1);
    CHECK(iv.low > 0.0);
    const WilsonInterval zero = wilson_interval(0, 50);
    CHECK(zero.low == 0.0);
    CHECK(zero.high > 0.0);
    const WilsonInterval one = wilson_interval(50, 50);
    CHECK(one.high == 1.0);
    CHECK_THROWS_AS(wilson_interval(0, 0), std::invalid_argument);
}

TEST_CASE("single trial: joint outcome is binary and reproducible") {
    const IntensityConfig cfg = wide_intensity();
    const ChannelExpectation truth = truth_at_25km(cfg);
    SecurityParams sec;
    sec.eps_decoy = 0.07;

    const CoverageReport rep = coverage_experiment(cfg, truth, 1'000'000, sec, 1, 5);
    CHECK(rep.trials == 1);
    CHECK((rep.joint_violations == 0 || rep.joint_violations == 1));

    const TrialOutcome a = run_trial(cfg, truth, 1'000'000, sec, 5);
    const TrialOutcome b = run_trial(cfg, truth, 1'000'000, sec, 5);
    CHECK(a.violations == b.violations);
    CHECK(a.estimate.l_sec == b.estimate.l_sec);
    CHECK_THROWS_AS(coverage_experiment(cfg, truth, 1'000'000, sec, 0, 5),
                    std::invalid_argument);
}

TEST_CASE("coverage: serial and parallel paths produce the identical report") {
    const IntensityConfig cfg = wide_intensity();
    const ChannelExpectation truth = truth_at_25km(cfg);
    SecurityParams sec;
    sec.eps_decoy = 0.07;

    const CoverageReport serial =
        coverage_experiment(cfg, truth, 1'000'000, sec, 500, 17, /*parallel=*/false);
    const CoverageReport parallel =
        coverage_experiment(cfg, truth, 1'000'000, sec, 500, 17, /*parallel=*/true);
    CHECK(serial.joint_violations == parallel.joint_violations);
    CHECK(serial.aborts == parallel.aborts);
    for (int b = 0; b < kBoundCount; ++b)
        CHECK(serial.violations[b] == parallel.violations[b]);
}

TEST_CASE("coverage: phi = 0 puts every CLT-regime bound near a coin flip") {
    const IntensityConfig cfg = wide_intensity();
    const ChannelExpectation truth = truth_at_25km(cfg);
    SecurityParams sec;
    sec.eps_decoy = 3.5;  // eps/a = 0.5 -> phi = 0

    const CoverageReport rep = coverage_experiment(cfg, truth, 1'000'000, sec, 4000, 11);
    for (Bound b : {Bound::q_mu_upper, Bound::q_nu_lower, Bound::q_nu_upper,
                    Bound::q_lambda_lower, Bound::q_lambda_upper, Bound::kappa1}) {
        CHECK(rep.rate(b) == doctest::Approx(0.5).epsilon(0.12));
    }
    // The vacuum-error expectation is far below one count here, so its
    // point-estimate bound is not in the CLT regime and fails almost surely.
    CHECK(rep.rate(Bound::e0n0) > 0.9);
}

TEST_CASE("coverage: per-bound rates stay near the budget at eps' = 0.01") {
    const IntensityConfig cfg = wide_intensity();
    const ChannelExpectation truth = truth_at_25km(cfg);
    SecurityParams sec;
    sec.eps_decoy = 0.07;  // per-bound 0.01
    sec.a = 7;

    const CoverageReport rep = coverage_experiment(cfg, truth, 1'000'000, sec, 10'000, 2);
    for (int b = 0; b < kBoundCount; ++b)
        CHECK(rep.rate(static_cast<Bound>(b)) <= 0.015);
    CHECK(rep.joint_rate() <= 0.07);
    // union bound, observed empirically
    double sum = 0.0;
    for (int b = 0; b < kBoundCount; ++b) sum += rep.rate(static_cast<Bound>(b));
    CHECK(rep.joint_rate() <= sum + 1e-12);
}

TEST_CASE("coverage: conservative at a looser budget too") {
    const IntensityConfig cfg = wide_intensity();
    const ChannelExpectation truth = truth_at_25km(cfg);
    SecurityParams sec;
    sec.eps_decoy = 0.35;  // per-bound 0.05
    sec.a = 7;

    const CoverageReport rep = coverage_experiment(cfg, truth, 1'000'000, sec, 4000, 3);
    for (int b = 0; b < kBoundCount; ++b)
        CHECK(rep.rate(static_cast<Bound>(b)) <= 1.5 * 0.05);
}
