#pragma once

#include <string_view>

#include "qkd/types.hpp"

// Quantifies how far the exact binomial tail is from the Gaussian tail used
// by the estimator, at the working confidence point phi. Three evaluators:
// a second-order Taylor expansion of the Zubkov-Serov bound (continuous
// threshold), the rigorous sandwich itself, and exact binomial summation.

namespace qkd::dev {

enum class Method { taylor, sandwich, exact };

std::string_view method_name(Method m);
Method method_from_name(std::string_view name);  // throws on unknown name

/// Taylor corrections to the Gaussian CDF value at the threshold
/// k = n p + phi sqrt(n p (1-p)):
///   lower_corr = C(k)   - Phi(phi) = -phi^2 (1-2p) e^{-phi^2/2} / (6 sqrt(2 pi n p(1-p)))
///   upper_corr = C(k+1) - Phi(phi) = lower_corr + e^{-phi^2/2} / sqrt(2 pi n p(1-p))
struct TaylorCorrections {
    double lower_corr;
    double upper_corr;
};
TaylorCorrections taylor_deviation(count_t n, double p, double phi);

struct DeviationReport {
    count_t n = 0;
    double p = 0.0;
    double phi = 0.0;
    double eps_target = 0.0;          // the budgeted eps_decoy
    double eps_prime_minus_eps = 0.0; // achieved minus budgeted failure probability
    Method method = Method::taylor;
};

/// Failure-probability excess for the upper-tail bound at
/// phi = Phi^{-1}(1 - eps_decoy/a), scaled back to the full a-bound budget:
/// eps' = a * Pr[X > k]. The taylor method uses the continuity-corrected
/// expansion at the continuous threshold; sandwich reports the conservative
/// end of the rigorous bracket at k = floor(np + phi*sigma); exact sums the
/// binomial tail at the same integer threshold (n <= 1e6 only).
DeviationReport deviation_report(count_t n, double p, const SecurityParams& sec,
                                 Method method);

}  // namespace qkd::dev
