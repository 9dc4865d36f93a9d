#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qkd/stats.hpp"

using namespace qkd::stats;

namespace {

// Independent quantile oracle: bisection on std_normal_cdf.
double quantile_by_bisection(double p) {
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (std_normal_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Independent small-n binomial CDF: direct sum with exact double binomials.
double binom_cdf_direct(int n, double p, int k) {
    double choose = 1.0;  // C(n, 0)
    double sum = 0.0;
    for (int i = 0; i <= k; ++i) {
        sum += choose * std::pow(p, i) * std::pow(1.0 - p, n - i);
        choose = choose * (n - i) / (i + 1.0);
    }
    return sum;
}

}  // namespace

TEST_CASE("binary entropy: pinned values and domain") {
    CHECK(binary_entropy(0.5) == 1.0);
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    CHECK(binary_entropy(0.11) == doctest::Approx(0.49991595816452800).epsilon(1e-13));
    CHECK_THROWS_AS(binary_entropy(-0.01), std::invalid_argument);
    CHECK_THROWS_AS(binary_entropy(1.01), std::invalid_argument);
}

TEST_CASE("binary entropy: concavity and symmetry on a grid") {
    for (double x = 0.02; x < 1.0; x += 0.07) {
        CHECK(binary_entropy(x) == doctest::Approx(binary_entropy(1.0 - x)).epsilon(1e-14));
        for (double y = 0.01; y < 1.0; y += 0.13) {
            const double mid = binary_entropy(0.5 * (x + y));
            const double avg = 0.5 * (binary_entropy(x) + binary_entropy(y));
            CHECK(mid >= avg - 1e-12);
        }
    }
}

TEST_CASE("normal cdf: pinned values, symmetry, saturation") {
    CHECK(std_normal_cdf(0.0) == 0.5);
    CHECK(std_normal_cdf(40.0) == 1.0);
    CHECK(std_normal_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-15));
    CHECK(std_normal_cdf(-1.0) == doctest::Approx(0.15865525393145705).epsilon(1e-15));
    for (double x = -8.0; x <= 8.0; x += 0.37) {
        CHECK(std_normal_cdf(-x) == doctest::Approx(1.0 - std_normal_cdf(x)).epsilon(1e-14));
        CHECK(std_normal_tail(x) == doctest::Approx(std_normal_cdf(-x)).epsilon(1e-14));
    }
    double prev = 0.0;
    for (double x = -10.0; x <= 10.0; x += 0.05) {
        const double c = std_normal_cdf(x);
        CHECK(c >= prev);
        prev = c;
    }
}

TEST_CASE("normal quantile: pinned values against the bisection oracle") {
    CHECK(std_normal_quantile(0.5) == 0.0);
    CHECK(std_normal_quantile(0.95) == doctest::Approx(1.6448536269514722).epsilon(1e-12));
    CHECK(std_normal_quantile(0.95) ==
          doctest::Approx(quantile_by_bisection(0.95)).epsilon(1e-12));
    CHECK(std_normal_quantile(0.025) ==
          doctest::Approx(-1.959963984540054).epsilon(1e-12));
    CHECK(std_normal_quantile(0.31) ==
          doctest::Approx(quantile_by_bisection(0.31)).epsilon(1e-12));
    CHECK_THROWS_AS(std_normal_quantile(0.0), std::invalid_argument);
    CHECK_THROWS_AS(std_normal_quantile(1.0), std::invalid_argument);
    CHECK_THROWS_AS(std_normal_quantile(-0.5), std::invalid_argument);
}

TEST_CASE("normal quantile: far-tail round trip down to 1e-300") {
    // |Phi(Phi^-1(p)) - p| / p <= 1e-9 across the whole lower tail.
    for (double lg = -300.0; lg <= -0.31; lg += 2.43) {
        const double p = std::pow(10.0, lg);
        const double x = std_normal_quantile(p);
        const double back = std_normal_cdf(x);
        CHECK(std::abs(back - p) / p <= 1e-9);
    }
    // Upper-tail variant used by the estimator.
    const double q = 1e-13;
    const double x = std_normal_upper_quantile(q);
    CHECK(x == -std_normal_quantile(q));
    CHECK(std::abs(std_normal_tail(x) - q) / q <= 1e-9);
}

TEST_CASE("binomial cdf: pinned values") {
    CHECK(binomial_cdf_exact(1, 0.5, 0) == 0.5);
    CHECK(binomial_cdf_exact(57, 0.123, 57) == 1.0);
    CHECK(binomial_cdf_exact(10, 0.5, 5) == doctest::Approx(0.623046875).epsilon(1e-14));
    CHECK_THROWS_AS(binomial_cdf_exact(10, 0.5, 11), std::invalid_argument);
    CHECK_THROWS_AS(binomial_cdf_exact(10, 0.5, -1), std::invalid_argument);
    CHECK_THROWS_AS(binomial_cdf_exact(10, 1.5, 5), std::invalid_argument);
}

TEST_CASE("binomial cdf: agrees with direct summation for small n") {
    for (int n : {1, 2, 7, 19, 30}) {
        for (double p : {0.03, 0.25, 0.5, 0.77, 0.98}) {
            for (int k = 0; k <= n; ++k) {
                const double expect = binom_cdf_direct(n, p, k);
                CHECK(binomial_cdf_exact(n, p, k) ==
                      doctest::Approx(expect).epsilon(1e-11));
            }
        }
    }
}

TEST_CASE("binomial upper tail: complements the cdf with full tail precision") {
    CHECK(binomial_upper_tail_exact(10, 0.5, 5) ==
          doctest::Approx(1.0 - 0.623046875).epsilon(1e-14));
    CHECK(binomial_upper_tail_exact(10, 0.5, 10) == 0.0);
    // far tail stays relatively accurate
    const double t = binomial_upper_tail_exact(1000, 0.01, 60);
    const double direct = 1.0 - binomial_cdf_exact(1000, 0.01, 60);
    CHECK(t > 0.0);
    CHECK(t == doctest::Approx(direct).epsilon(1e-4));  // 1-x loses digits, t does not
}

TEST_CASE("kl divergence: pinned values, domain, nonnegativity") {
    CHECK(kl_bernoulli(0.5, 0.5) == 0.0);
    CHECK(kl_bernoulli(1.0, 0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(kl_bernoulli(0.6, 0.5) == doctest::Approx(0.020135513550688873).epsilon(1e-13));
    CHECK(kl_bernoulli(0.0, 0.0) == 0.0);
    CHECK(kl_bernoulli(1.0, 1.0) == 0.0);
    CHECK_THROWS_AS(kl_bernoulli(0.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(kl_bernoulli(0.5, 1.0), std::invalid_argument);
    for (double x = 0.0; x <= 1.0; x += 0.1)
        for (double p = 0.05; p < 1.0; p += 0.17)
            CHECK(kl_bernoulli(x, p) >= 0.0);
}

TEST_CASE("sandwich: pinned endpoint and midpoint values") {
    const CdfSandwich mid = zubkov_serov_sandwich(10, 0.5, 5);
    CHECK(mid.lower == 0.5);  // k/n == p, sgn(0) = 0
    CHECK(mid.upper == doctest::Approx(0.7371535654440744).epsilon(1e-13));
    CHECK(mid.lower <= 0.623046875);
    CHECK(mid.upper >= 0.623046875);

    const CdfSandwich zero = zubkov_serov_sandwich(10, 0.5, 0);
    CHECK(zero.lower == doctest::Approx(0.0009765625).epsilon(1e-14));

    const CdfSandwich top = zubkov_serov_sandwich(10, 0.5, 10);
    CHECK(top.upper == 1.0);
    CHECK(top.lower == doctest::Approx(1.0 - std::pow(0.5, 10)).epsilon(1e-14));

    CHECK_THROWS_AS(zubkov_serov_sandwich(0, 0.5, 0), std::invalid_argument);
    CHECK_THROWS_AS(zubkov_serov_sandwich(10, 0.0, 5), std::invalid_argument);
}

TEST_CASE("sandwich: brackets the exact cdf and is monotone in k") {
    // Smaller grid here; the full n in [1,500] scan runs in the acceptance suite.
    const std::vector<double> ps = {0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99};
    for (int n = 1; n <= 80; ++n) {
        for (double p : ps) {
            double prev_lower = -1.0;
            for (int k = 0; k <= n; ++k) {
                const CdfSandwich s = zubkov_serov_sandwich(n, p, k);
                const double exact = binomial_cdf_exact(n, p, k);
                CHECK(s.lower <= exact * (1.0 + 5e-12) + 1e-300);
                CHECK(exact <= s.upper * (1.0 + 5e-12) + 1e-300);
                CHECK(s.lower >= prev_lower - 1e-15);
                prev_lower = s.lower;
            }
        }
    }
}
