#include "qkd/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qkd/estimator.hpp"
#include "qkd/sampling.hpp"

namespace qkd::opt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void DeConfig::validate() const {
    check(population >= 4, "DeConfig: population must be >= 4");
    check(differential_weight > 0.0 && differential_weight <= 2.0,
          "DeConfig: differential_weight outside (0,2]");
    check(crossover_rate >= 0.0 && crossover_rate <= 1.0,
          "DeConfig: crossover_rate outside [0,1]");
    check(generations >= 1, "DeConfig: generations must be >= 1");
    check(!bounds.empty(), "DeConfig: empty search box");
    for (const auto& [lo, hi] : bounds)
        check(lo < hi, "DeConfig: ill-ordered bound pair");
}

OptimizationResult differential_evolution(
    const std::function<double(std::span<const double>)>& objective,
    const DeConfig& cfg) {
    cfg.validate();
    const int dim = static_cast<int>(cfg.bounds.size());
    const int np = cfg.population;
    mc::Rng rng(cfg.seed);

    auto clip = [&](double v, int d) {
        return std::clamp(v, cfg.bounds[d].first, cfg.bounds[d].second);
    };

    std::vector<std::vector<double>> pop(np, std::vector<double>(dim));
    std::vector<double> fitness(np);
    for (auto& member : pop)
        for (int d = 0; d < dim; ++d)
            member[d] = cfg.bounds[d].first +
                        rng.next_double() * (cfg.bounds[d].second - cfg.bounds[d].first);

#pragma omp parallel for schedule(static) if (cfg.parallel)
    for (int i = 0; i < np; ++i) fitness[i] = objective(pop[i]);

    OptimizationResult result;
    result.history.reserve(cfg.generations);

    std::vector<std::vector<double>> trial(np, std::vector<double>(dim));
    std::vector<double> trial_fitness(np);

    for (int gen = 0; gen < cfg.generations; ++gen) {
        // Mutation and crossover draws stay serial so the stream of random
        // numbers (and hence the run) is identical with or without threads.
        for (int i = 0; i < np; ++i) {
            int r1, r2, r3;
            do { r1 = static_cast<int>(rng.next_u64() % np); } while (r1 == i);
            do { r2 = static_cast<int>(rng.next_u64() % np); } while (r2 == i || r2 == r1);
            do { r3 = static_cast<int>(rng.next_u64() % np); } while (r3 == i || r3 == r1 || r3 == r2);
            const int forced = static_cast<int>(rng.next_u64() % dim);
            for (int d = 0; d < dim; ++d) {
                const bool cross = rng.next_double() < cfg.crossover_rate || d == forced;
                trial[i][d] = cross
                                  ? clip(pop[r1][d] + cfg.differential_weight *
                                                          (pop[r2][d] - pop[r3][d]),
                                         d)
                                  : pop[i][d];
            }
        }

#pragma omp parallel for schedule(static) if (cfg.parallel)
        for (int i = 0; i < np; ++i) trial_fitness[i] = objective(trial[i]);

        for (int i = 0; i < np; ++i) {
            if (trial_fitness[i] >= fitness[i]) {
                pop[i] = trial[i];
                fitness[i] = trial_fitness[i];
            }
        }

        const auto best = std::max_element(fitness.begin(), fitness.end());
        result.history.push_back(*best);
    }

    const auto best = std::max_element(fitness.begin(), fitness.end());
    result.best_objective = *best;
    result.best_params = pop[static_cast<std::size_t>(best - fitness.begin())];
    return result;
}

namespace {

constexpr double kVacuumIntensity = 0.01;

// Feasibility of an (mu, nu, p_mu, p_nu) point against the intensity
// constraints and the probability simplex.
bool feasible_point(std::span<const double> x) {
    const double mu = x[0], nu = x[1], p_mu = x[2], p_nu = x[3];
    const double p_lam = 1.0 - p_mu - p_nu;
    return kVacuumIntensity < nu / 2.0 && kVacuumIntensity + nu < mu &&
           p_mu > 0.0 && p_mu < 1.0 && p_nu > 0.0 && p_nu < 1.0 && p_lam >= 1e-6;
}

IntensityConfig config_from_point(std::span<const double> x) {
    IntensityConfig cfg;
    cfg.mu = x[0];
    cfg.nu = x[1];
    cfg.lambda = kVacuumIntensity;
    cfg.p_mu = x[2];
    cfg.p_nu = x[3];
    cfg.p_lambda = 1.0 - x[2] - x[3];
    return cfg;
}

}  // namespace

IntensityOptimum optimize_intensities(double distance_km, const SetupParams& setup,
                                      const SecurityParams& sec, const BlockRule& block,
                                      const DeConfig& de) {
    setup.validate();
    sec.validate();
    check(distance_km >= 0.0, "optimize_intensities: negative distance");

    auto objective = [&](std::span<const double> x) -> double {
        if (!feasible_point(x)) return kNegInf;
        const IntensityConfig cfg = config_from_point(x);
        const count_t n =
            block_rule_pulses(cfg, distance_km, setup, block.max_l_ver, block.max_seconds);
        const SessionExpectation sess = session_expectation(cfg, distance_km, setup, n);
        if (sess.counts.N_mu < 1 || sess.counts.N_nu < 1 || sess.counts.N_lambda < 1)
            return kNegInf;
        const EstimateResult est = process_decoy_statistics(sess.counts, cfg, sec);
        return static_cast<double>(est.l_sec) / sess.channel.session_time;
    };

    DeConfig cfg = de;
    if (cfg.bounds.empty())
        cfg.bounds = {{0.05, 1.5}, {0.021, 1.5}, {0.5, 0.999}, {1e-6, 0.5}};

    const OptimizationResult res = differential_evolution(objective, cfg);

    IntensityOptimum out;
    if (!std::isfinite(res.best_objective) || !feasible_point(res.best_params)) {
        out.aborted = true;
        return out;
    }
    out.config = config_from_point(res.best_params);
    out.n_pulses = block_rule_pulses(out.config, distance_km, setup, block.max_l_ver,
                                     block.max_seconds);
    const SessionExpectation sess =
        session_expectation(out.config, distance_km, setup, out.n_pulses);
    const EstimateResult est = process_decoy_statistics(sess.counts, out.config, sec);
    out.l_sec = est.l_sec;
    out.r_sec = static_cast<double>(est.l_sec) / sess.channel.session_time;
    out.l_ver = sess.counts.l_ver;
    out.qber = sess.channel.e_mu;
    out.sifted_rate = sess.channel.sifted_rate;
    out.session_time = sess.channel.session_time;
    out.aborted = est.aborted || est.l_sec <= 0;
    return out;
}

SignalOptimum optimize_signal_only(double distance_km, const SetupParams& setup,
                                   double f_ec) {
    setup.validate();
    check(distance_km >= 0.0, "optimize_signal_only: negative distance");

    constexpr double kMuLow = 1e-3;
    constexpr double kMuHigh = 1.5;
    auto rate = [&](double mu) {
        return theoretical_limit_rate(distance_km, setup, mu, f_ec);
    };

    // Coarse scan, then golden-section refinement inside the best bracket.
    constexpr int kGrid = 256;
    double best_mu = kMuLow, best_rate = rate(kMuLow);
    for (int i = 1; i <= kGrid; ++i) {
        const double mu = kMuLow + (kMuHigh - kMuLow) * i / kGrid;
        const double r = rate(mu);
        if (r > best_rate) {
            best_rate = r;
            best_mu = mu;
        }
    }
    const double step = (kMuHigh - kMuLow) / kGrid;
    double lo = std::max(kMuLow, best_mu - step);
    double hi = std::min(kMuHigh, best_mu + step);
    constexpr double kGolden = 0.61803398874989484820;
    double x1 = hi - kGolden * (hi - lo);
    double x2 = lo + kGolden * (hi - lo);
    double f1 = rate(x1), f2 = rate(x2);
    for (int it = 0; it < 80; ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kGolden * (hi - lo);
            f2 = rate(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kGolden * (hi - lo);
            f1 = rate(x1);
        }
    }
    const double mu_star = 0.5 * (lo + hi);
    return SignalOptimum{mu_star, rate(mu_star)};
}

}  // namespace qkd::opt
