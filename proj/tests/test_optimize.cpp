#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "qkd/channel.hpp"
#include "qkd/optimize.hpp"

using namespace qkd;
using namespace qkd::opt;

TEST_CASE("differential evolution: unimodal objective converges") {
    DeConfig cfg;
    cfg.bounds = {{0.0, 1.0}};
    cfg.generations = 200;
    cfg.seed = 7;
    const OptimizationResult res = differential_evolution(
        [](std::span<const double> x) { return -(x[0] - 0.3) * (x[0] - 0.3); }, cfg);
    CHECK(res.best_params[0] == doctest::Approx(0.3).epsilon(1e-3));
    CHECK(res.best_objective > -1e-6);
}

TEST_CASE("differential evolution: constant landscape keeps the exact value") {
    DeConfig cfg;
    cfg.bounds = {{-2.0, 5.0}, {0.0, 1.0}};
    cfg.generations = 20;
    const OptimizationResult res =
        differential_evolution([](std::span<const double>) { return 4.25; }, cfg);
    CHECK(res.best_objective == 4.25);
    CHECK(res.best_params[0] >= -2.0);
    CHECK(res.best_params[0] <= 5.0);
}

TEST_CASE("differential evolution: four-dimensional quadratic bowl") {
    DeConfig cfg;
    cfg.bounds = {{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}};
    cfg.generations = 300;
    cfg.seed = 3;
    const double target[4] = {0.1, 0.9, 0.4, 0.6};
    const OptimizationResult res = differential_evolution(
        [&](std::span<const double> x) {
            double s = 0.0;
            for (int i = 0; i < 4; ++i) s -= (x[i] - target[i]) * (x[i] - target[i]);
            return s;
        },
        cfg);
    for (int i = 0; i < 4; ++i)
        CHECK(res.best_params[i] == doctest::Approx(target[i]).epsilon(5e-3));
}

TEST_CASE("differential evolution: seeded determinism, serial == parallel") {
    DeConfig cfg;
    cfg.bounds = {{0.0, 2.0}, {0.0, 2.0}};
    cfg.generations = 60;
    cfg.seed = 99;
    auto objective = [](std::span<const double> x) {
        return std::sin(5.0 * x[0]) * std::cos(3.0 * x[1]) - 0.1 * x[0];
    };
    cfg.parallel = false;
    const OptimizationResult serial = differential_evolution(objective, cfg);
    cfg.parallel = true;
    const OptimizationResult parallel = differential_evolution(objective, cfg);
    CHECK(serial.best_objective == parallel.best_objective);
    CHECK(serial.best_params == parallel.best_params);
    CHECK(serial.history == parallel.history);

    const OptimizationResult again = differential_evolution(objective, cfg);
    CHECK(again.best_objective == parallel.best_objective);
    CHECK(again.best_params == parallel.best_params);
}

TEST_CASE("differential evolution: history is nondecreasing (elitist selection)") {
    DeConfig cfg;
    cfg.bounds = {{-3.0, 3.0}};
    cfg.generations = 100;
    cfg.seed = 5;
    const OptimizationResult res = differential_evolution(
        [](std::span<const double> x) { return -std::abs(x[0] - 1.7); }, cfg);
    for (std::size_t i = 1; i < res.history.size(); ++i)
        CHECK(res.history[i] >= res.history[i - 1]);
    CHECK(res.history.back() == res.best_objective);
}

TEST_CASE("differential evolution: configuration validation") {
    DeConfig cfg;
    cfg.bounds = {{0.0, 1.0}};
    cfg.population = 3;
    CHECK_THROWS_AS(differential_evolution([](std::span<const double>) { return 0.0; }, cfg),
                    std::invalid_argument);
    cfg.population = 40;
    cfg.bounds = {{1.0, 0.0}};
    CHECK_THROWS_AS(differential_evolution([](std::span<const double>) { return 0.0; }, cfg),
                    std::invalid_argument);
    cfg.bounds.clear();
    CHECK_THROWS_AS(differential_evolution([](std::span<const double>) { return 0.0; }, cfg),
                    std::invalid_argument);
}

TEST_CASE("optimize_intensities: 50 km optimum is feasible and dominated by the limit") {
    const SetupParams setup;
    const SecurityParams sec;
    DeConfig de;
    de.seed = 1;
    const IntensityOptimum o = optimize_intensities(50.0, setup, sec, BlockRule{}, de);

    CHECK_FALSE(o.aborted);
    CHECK(o.l_sec > 0);
    CHECK_NOTHROW(o.config.validate());
    CHECK(o.config.lambda == 0.01);
    CHECK(o.config.lambda < o.config.nu / 2.0);
    CHECK(o.config.lambda + o.config.nu < o.config.mu);

    const SignalOptimum star = optimize_signal_only(50.0, setup, sec.f_ec);
    CHECK(star.r_sec_star > o.r_sec);

    // the optimal decoy budget is a small slice of the emissions
    CHECK(o.config.p_nu + o.config.p_lambda < 0.10);
}

TEST_CASE("optimize_intensities: no key far past the cutoff") {
    const SetupParams setup;
    const SecurityParams sec;
    DeConfig de;
    de.seed = 2;
    de.generations = 60;  // the landscape is all-negative, no need to polish
    const IntensityOptimum o = optimize_intensities(300.0, setup, sec, BlockRule{}, de);
    CHECK(o.aborted);
    CHECK(o.l_sec <= 0);
}

TEST_CASE("optimize_signal_only: ideal channel peaks where mu e^-mu does") {
    SetupParams ideal;
    ideal.det_eff = 1.0;
    ideal.extra_loss_db = 0.0;
    ideal.dark_count = 0.0;
    ideal.visibility = 1.0;
    ideal.dead_time_s = 0.0;
    const SignalOptimum s = optimize_signal_only(0.0, ideal);
    CHECK(s.r_sec_star > 0.0);
    CHECK(s.mu_star == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("optimize_signal_only: negative best rate past the cutoff") {
    SetupParams noisy;
    noisy.visibility = 0.80;
    const SignalOptimum s = optimize_signal_only(250.0, noisy);
    CHECK(s.r_sec_star <= 0.0);
}

TEST_CASE("limit-case signal intensity sits above the finite-key optimum") {
    const SetupParams setup;
    const SecurityParams sec;
    for (double d : {10.0, 75.0, 140.0}) {
        DeConfig de;
        de.seed = 21;
        const IntensityOptimum o = optimize_intensities(d, setup, sec, BlockRule{}, de);
        const SignalOptimum star = optimize_signal_only(d, setup, sec.f_ec);
        CHECK(star.mu_star > o.config.mu);
    }
}

TEST_CASE("optimized rate degrades with distance") {
    const SetupParams setup;
    const SecurityParams sec;
    double prev = std::numeric_limits<double>::infinity();
    for (double d : {25.0, 50.0, 100.0}) {
        DeConfig de;
        de.seed = 11;
        const IntensityOptimum o = optimize_intensities(d, setup, sec, BlockRule{}, de);
        CHECK(o.r_sec < prev * 1.01);  // 1% numerical slack per step
        prev = o.r_sec;
    }
}
