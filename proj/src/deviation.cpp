#include "qkd/deviation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qkd/estimator.hpp"
#include "qkd/stats.hpp"

namespace qkd::dev {

namespace {

constexpr double k2Pi = 6.28318530717958647693;
constexpr count_t kExactLimit = 1'000'000;

// 1 - C_{n,p}(k), evaluated directly in the tail.
double zubkov_serov_upper_tail(count_t n, double p, count_t k) {
    const double nd = static_cast<double>(n);
    if (k <= 0) return -std::expm1(nd * std::log1p(-p));  // 1 - (1-p)^n
    if (k == n) return std::exp(nd * std::log(p));        // p^n
    if (k > n) return 0.0;
    const double x = static_cast<double>(k) / nd;
    const double h = stats::kl_bernoulli(x, p);
    const double sgn = (x > p) ? 1.0 : (x < p ? -1.0 : 0.0);
    return stats::std_normal_tail(sgn * std::sqrt(2.0 * nd * h));
}

}  // namespace

std::string_view method_name(Method m) {
    switch (m) {
        case Method::taylor: return "taylor";
        case Method::sandwich: return "sandwich";
        case Method::exact: return "exact";
    }
    return "?";
}

Method method_from_name(std::string_view name) {
    if (name == "taylor") return Method::taylor;
    if (name == "sandwich") return Method::sandwich;
    if (name == "exact") return Method::exact;
    throw std::invalid_argument("unknown deviation method: " + std::string(name));
}

TaylorCorrections taylor_deviation(count_t n, double p, double phi) {
    if (n < 1) throw std::invalid_argument("taylor_deviation: need n >= 1");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("taylor_deviation: need 0 < p < 1");
    const double npq = static_cast<double>(n) * p * (1.0 - p);
    const double gauss = std::exp(-0.5 * phi * phi) / std::sqrt(k2Pi * npq);
    const double skew = phi * phi * (1.0 - 2.0 * p) * gauss / 6.0;
    return TaylorCorrections{-skew, -skew + gauss};
}

DeviationReport deviation_report(count_t n, double p, const SecurityParams& sec,
                                 Method method) {
    sec.validate();
    if (n < 1) throw std::invalid_argument("deviation_report: need n >= 1");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("deviation_report: need 0 < p < 1");
    if (method == Method::exact && n > kExactLimit)
        throw std::invalid_argument("deviation_report: exact method limited to n <= 1e6");

    DeviationReport rep;
    rep.n = n;
    rep.p = p;
    rep.method = method;
    rep.eps_target = sec.eps_decoy;
    rep.phi = compute_phi(sec.eps_decoy, sec.a);

    const double a = static_cast<double>(sec.a);
    const double gauss_tail = stats::std_normal_tail(rep.phi);

    if (method == Method::taylor) {
        // Continuity-corrected expansion: the CDF estimate is the midpoint of
        // the C(k)/C(k+1) bracket at the continuous threshold.
        const TaylorCorrections c = taylor_deviation(n, p, rep.phi);
        const double cdf_corr = 0.5 * (c.lower_corr + c.upper_corr);
        rep.eps_prime_minus_eps = a * (gauss_tail - cdf_corr) - sec.eps_decoy;
        return rep;
    }

    const double sigma = std::sqrt(static_cast<double>(n) * p * (1.0 - p));
    const count_t k = static_cast<count_t>(
        std::floor(static_cast<double>(n) * p + rep.phi * sigma));
    const count_t k_clamped = std::min(std::max<count_t>(k, 0), n);

    double tail;
    if (method == Method::sandwich) {
        tail = zubkov_serov_upper_tail(n, p, k_clamped);  // conservative end: 1 - C(k)
    } else {
        tail = stats::binomial_upper_tail_exact(n, p, k_clamped);
    }
    rep.eps_prime_minus_eps = a * tail - sec.eps_decoy;
    return rep;
}

}  // namespace qkd::dev
