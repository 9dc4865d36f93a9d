#include "qkd/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace qkd::mc {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

inline double lgamma_safe(double x) {
#if defined(__GLIBC__) || defined(__APPLE__)
    int sign = 0;
    return ::lgamma_r(x, &sign);
#else
    return std::lgamma(x);
#endif
}

// Inversion by sequential search from k = 0; efficient when n*p is small.
count_t binomial_inversion(Rng& rng, count_t n, double p) {
    const double q = 1.0 - p;
    const double log_q = std::log1p(-p);
    const double r = p / q;
    double pmf = std::exp(static_cast<double>(n) * log_q);
    double cdf = pmf;
    const double u = rng.next_double();
    count_t k = 0;
    while (u > cdf && k < n) {
        ++k;
        pmf *= r * static_cast<double>(n - k + 1) / static_cast<double>(k);
        cdf += pmf;
    }
    return k;
}

// BTRS transformed rejection (Hormann); requires p <= 0.5 and n*p >= 10.
count_t binomial_btrs(Rng& rng, count_t n, double p) {
    const double nd = static_cast<double>(n);
    const double q = 1.0 - p;
    const double spq = std::sqrt(nd * p * q);
    const double b = 1.15 + 2.53 * spq;
    const double a = -0.0873 + 0.0248 * b + 0.01 * p;
    const double c = nd * p + 0.5;
    const double v_r = 0.92 - 4.2 / b;
    const double alpha = (2.83 + 5.1 / b) * spq;
    const double lpq = std::log(p / q);
    const double m = std::floor((nd + 1.0) * p);
    const double h = lgamma_safe(m + 1.0) + lgamma_safe(nd - m + 1.0);

    for (;;) {
        const double u = rng.next_double() - 0.5;
        double v = rng.next_double();
        const double us = 0.5 - std::abs(u);
        const double kd = std::floor((2.0 * a / us + b) * u + c);
        if (kd < 0.0 || kd > nd) continue;
        if (us >= 0.07 && v <= v_r) return static_cast<count_t>(kd);
        v = std::log(v * alpha / (a / (us * us) + b));
        if (v <= h - lgamma_safe(kd + 1.0) - lgamma_safe(nd - kd + 1.0) +
                     (kd - m) * lpq)
            return static_cast<count_t>(kd);
    }
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t state = base ^ (0xA0761D6478BD642FULL + index * 0xE7037ED1A0B428DBULL);
    return splitmix64(state);
}

count_t binomial_sample(Rng& rng, count_t n, double p) {
    if (n < 0) throw std::invalid_argument("binomial_sample: negative n");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binomial_sample: p outside [0,1]");
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    const bool flipped = p > 0.5;
    const double ps = flipped ? 1.0 - p : p;
    const count_t k = (static_cast<double>(n) * ps < 10.0)
                          ? binomial_inversion(rng, n, ps)
                          : binomial_btrs(rng, n, ps);
    return flipped ? n - k : k;
}

namespace {

ObservedCounts sample_counts_impl(const IntensityConfig& cfg,
                                  const ChannelExpectation& truth, count_t n_pulses,
                                  Rng& rng) {
    ObservedCounts c;
    c.N = n_pulses;
    c.N_mu = binomial_sample(rng, n_pulses, cfg.p_mu);
    const double p_nu_rest = cfg.p_nu / (1.0 - cfg.p_mu);
    c.N_nu = binomial_sample(rng, n_pulses - c.N_mu, std::min(p_nu_rest, 1.0));
    c.N_lambda = n_pulses - c.N_mu - c.N_nu;
    c.n_mu = binomial_sample(rng, c.N_mu, truth.q_mu);
    c.n_nu = binomial_sample(rng, c.N_nu, truth.q_nu);
    c.n_lambda = binomial_sample(rng, c.N_lambda, truth.q_lambda);
    c.l_ver = binomial_sample(rng, c.n_mu, 0.5);
    c.n_err = binomial_sample(rng, c.l_ver, truth.e_mu);
    return c;
}

}  // namespace

ObservedCounts sample_counts(const IntensityConfig& cfg, const ChannelExpectation& truth,
                             count_t n_pulses, std::uint64_t seed) {
    cfg.validate();
    if (n_pulses < 1) throw std::invalid_argument("sample_counts: need at least one pulse");
    Rng rng(seed);
    return sample_counts_impl(cfg, truth, n_pulses, rng);
}

ObservedCounts sample_trial(const IntensityConfig& cfg, const ChannelExpectation& truth,
                            count_t n_pulses, std::uint64_t seed, TrialLatents& latents) {
    cfg.validate();
    if (n_pulses < 1) throw std::invalid_argument("sample_trial: need at least one pulse");
    Rng rng(seed);
    ObservedCounts c = sample_counts_impl(cfg, truth, n_pulses, rng);
    latents.n1 = binomial_sample(rng, c.l_ver, truth.theta1);
    const double q_vac = std::exp(-cfg.mu) * truth.y0 / 4.0;
    latents.e0n0 = binomial_sample(rng, c.N_mu, q_vac);
    return c;
}

}  // namespace qkd::mc
