#pragma once

#include <cstdint>

// Scalar statistics primitives used throughout the estimator: binary
// entropy, standard normal CDF/quantile with far-tail accuracy, an exact
// binomial CDF, the Bernoulli relative entropy, and the Zubkov-Serov
// sandwich bounds on binomial tails.
//
// All functions here are pure and safe for unrestricted concurrent use.

namespace qkd::stats {

/// Two-sided bound on a binomial CDF value: lower <= Pr[X <= k] <= upper.
struct CdfSandwich {
    double lower;
    double upper;
};

/// Binary entropy h(x) = -x log2 x - (1-x) log2(1-x), in bits.
/// Conventions: 0*log2(0) = 0. Throws std::invalid_argument outside [0,1].
double binary_entropy(double x);

/// Standard normal CDF. Absolute error below 1e-15 for |x| <= 8;
/// saturates to 0/1 for extreme arguments.
double std_normal_cdf(double x);

/// Upper tail 1 - Phi(x), computed directly so tiny tail masses keep full
/// relative precision.
double std_normal_tail(double x);

/// Standard normal quantile for p in (0,1). Relative tail accuracy of
/// about 1e-15 down to p = 1e-300 (rational start, Halley-refined against
/// std_normal_cdf). Throws std::invalid_argument for p outside (0,1).
double std_normal_quantile(double p);

/// Phi^{-1}(1 - q) evaluated without forming 1-q, so tiny tail masses q
/// keep full precision. Equivalent to -std_normal_quantile(q).
double std_normal_upper_quantile(double q);

/// Exact lower-tail binomial CDF Pr[X <= k], X ~ Bi(n, p). Sums the
/// smaller tail with a term recurrence anchored at a saddle-point pmf
/// evaluation; relative error <= 1e-12 for n up to ~1e6.
double binomial_cdf_exact(std::int64_t n, double p, std::int64_t k);

/// Binomial point mass Pr[X = k], evaluated in log space (saddle-point
/// method), accurate to ~1e-13 relative even for large n.
double binomial_pmf(std::int64_t n, double p, std::int64_t k);

/// Upper tail Pr[X > k], summed directly so tiny tail masses keep full
/// relative precision (same contract as binomial_cdf_exact otherwise).
double binomial_upper_tail_exact(std::int64_t n, double p, std::int64_t k);

/// Bernoulli relative entropy H(x, p) = x ln(x/p) + (1-x) ln((1-x)/(1-p)),
/// in nats. Nonnegative, zero iff x == p. Throws for p in {0,1} with x != p.
double kl_bernoulli(double x, double p);

/// Zubkov-Serov bounds: C(k) <= Pr[X <= k] <= C(k+1) with
/// C(k) = Phi(sgn(k/n - p) sqrt(2 n H(k/n, p))) for 1 <= k <= n-1,
/// C(0) = (1-p)^n, C(n) = 1 - p^n, and C(n+1) := 1 so the upper bound
/// stays total at k = n.
CdfSandwich zubkov_serov_sandwich(std::int64_t n, double p, std::int64_t k);

}  // namespace qkd::stats
