#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "qkd/channel.hpp"
#include "qkd/types.hpp"

// Differential-evolution search over (mu, nu, p_mu, p_nu) maximizing the
// finite-key secret key rate at a given distance, plus the one-dimensional
// signal-intensity optimization for the no-fluctuation limit.

namespace qkd::opt {

struct DeConfig {
    int population = 40;
    double differential_weight = 0.7;
    double crossover_rate = 0.9;
    int generations = 300;
    std::uint64_t seed = 1;
    std::vector<std::pair<double, double>> bounds;  // box, one (low, high) per dim
    bool parallel = true;  // evaluate each generation's candidates with OpenMP

    void validate() const;
};

struct OptimizationResult {
    std::vector<double> best_params;
    double best_objective = 0.0;
    std::vector<double> history;  // best objective after each generation; nondecreasing
};

/// Classic rand/1/bin differential evolution, maximizing. Candidates are
/// clipped to the box; deterministic for a fixed seed regardless of the
/// parallel flag (mutation draws happen serially, evaluations are pure).
OptimizationResult differential_evolution(
    const std::function<double(std::span<const double>)>& objective, const DeConfig& cfg);

/// Session block rule: stop at max_l_ver verified bits or max_seconds of
/// operation, whichever comes first.
struct BlockRule {
    count_t max_l_ver = 16'000'000;  // 16 Mbit
    double max_seconds = 1800.0;     // 30 min
};

struct IntensityOptimum {
    IntensityConfig config;
    long long l_sec = 0;
    double r_sec = 0.0;  // bits/s
    count_t n_pulses = 0;
    count_t l_ver = 0;
    double qber = 0.0;
    double sifted_rate = 0.0;
    double session_time = 0.0;
    bool aborted = false;  // no feasible point yielded a positive key
};

/// Maximizes l_sec / session_time over (mu, nu, p_mu, p_nu) with the vacuum
/// intensity fixed at 0.01. Counts come from the deterministic channel
/// expectations under the block rule; infeasible points score -infinity.
IntensityOptimum optimize_intensities(double distance_km, const SetupParams& setup,
                                      const SecurityParams& sec, const BlockRule& block,
                                      const DeConfig& de);

struct SignalOptimum {
    double mu_star = 0.0;
    double r_sec_star = 0.0;  // bits/s
};

/// Maximizes the no-fluctuation limit rate over mu in (0, 1.5].
SignalOptimum optimize_signal_only(double distance_km, const SetupParams& setup,
                                   double f_ec = 1.15);

}  // namespace qkd::opt
