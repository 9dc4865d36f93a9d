#include "qkd/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qkd/stats.hpp"

namespace qkd {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

void check(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void IntensityConfig::validate() const {
    check(lambda >= 0.0, "IntensityConfig: lambda < 0");
    check(lambda < nu / 2.0, "IntensityConfig: requires lambda < nu/2");
    check(lambda + nu < mu, "IntensityConfig: requires lambda + nu < mu");
    check(p_mu > 0.0 && p_mu < 1.0, "IntensityConfig: p_mu outside (0,1)");
    check(p_nu > 0.0 && p_nu < 1.0, "IntensityConfig: p_nu outside (0,1)");
    check(p_lambda > 0.0 && p_lambda < 1.0, "IntensityConfig: p_lambda outside (0,1)");
    check(std::abs(p_mu + p_nu + p_lambda - 1.0) <= 1e-9,
          "IntensityConfig: emission probabilities must sum to 1");
}

void SecurityParams::validate() const {
    for (double e : {eps_ver, eps_aut, eps_pa})
        check(e > 0.0 && e < 1.0, "SecurityParams: each eps must lie in (0,1)");
    check(a >= 1, "SecurityParams: a must be >= 1");
    // The decoy budget only enters through eps_decoy / a; the degenerate
    // phi = 0 point (eps_decoy / a == 1/2) is a legal no-fluctuation run.
    check(eps_decoy > 0.0 && eps_decoy / static_cast<double>(a) < 1.0,
          "SecurityParams: eps_decoy/a must lie in (0,1)");
    check(f_ec >= 1.0, "SecurityParams: f_ec must be >= 1");
}

void ObservedCounts::validate() const {
    check(N >= 1, "ObservedCounts: N must be >= 1");
    check(N_mu >= 0 && N_nu >= 0 && N_lambda >= 0, "ObservedCounts: negative sent count");
    check(N_mu + N_nu + N_lambda == N, "ObservedCounts: sent counts must sum to N");
    check(n_mu >= 0 && n_mu <= N_mu, "ObservedCounts: n_mu outside [0, N_mu]");
    check(n_nu >= 0 && n_nu <= N_nu, "ObservedCounts: n_nu outside [0, N_nu]");
    check(n_lambda >= 0 && n_lambda <= N_lambda, "ObservedCounts: n_lambda outside [0, N_lambda]");
    check(l_ver >= 0 && l_ver <= n_mu, "ObservedCounts: l_ver outside [0, n_mu]");
    check(n_err >= 0 && n_err <= l_ver, "ObservedCounts: n_err outside [0, l_ver]");
}

double compute_phi(double eps_decoy, count_t a) {
    check(a >= 1, "compute_phi: a must be >= 1");
    const double q = eps_decoy / static_cast<double>(a);
    check(q > 0.0 && q < 1.0, "compute_phi: eps_decoy/a outside (0,1)");
    return stats::std_normal_upper_quantile(q);
}

GainBounds gain_bounds(count_t n_det, count_t n_sent, double phi) {
    check(n_sent >= 1, "gain_bounds: N_sent must be >= 1");
    check(n_det >= 0 && n_det <= n_sent, "gain_bounds: n_det outside [0, N_sent]");
    check(phi >= 0.0, "gain_bounds: phi must be >= 0");
    const double q = static_cast<double>(n_det) / static_cast<double>(n_sent);
    const double fluct = phi * std::sqrt(q * (1.0 - q) / static_cast<double>(n_sent));
    return GainBounds{clamp01(q - fluct), clamp01(q + fluct)};
}

double y0_lower(double q_lambda_l, double q_nu_u, const IntensityConfig& cfg) {
    check(cfg.nu > cfg.lambda, "y0_lower: requires nu > lambda");
    const double num =
        cfg.nu * q_lambda_l * std::exp(cfg.lambda) - cfg.lambda * q_nu_u * std::exp(cfg.nu);
    return std::max(num / (cfg.nu - cfg.lambda), 0.0);
}

double q1_lower(double q_nu_l, double q_lambda_u, double q_mu_u, double y0_l,
                const IntensityConfig& cfg) {
    const double mu = cfg.mu, nu = cfg.nu, lam = cfg.lambda;
    const double denom = nu * (1.0 - nu / mu) - lam * (1.0 - lam / mu);
    check(denom > 0.0, "q1_lower: nonpositive denominator (intensity constraints violated)");
    const double pref = mu * std::exp(-mu) / denom;
    const double bracket = q_nu_l * std::exp(nu) - q_lambda_u * std::exp(lam) -
                           (nu * nu - lam * lam) / (mu * mu) * (q_mu_u * std::exp(mu) - y0_l);
    return std::max(pref * bracket, 0.0);
}

double kappa1_lower(double theta1_l, count_t l_ver, double phi) {
    check(theta1_l >= 0.0 && theta1_l <= 1.0, "kappa1_lower: theta1 outside [0,1]");
    check(l_ver >= 1, "kappa1_lower: l_ver must be >= 1");
    const double fluct =
        phi * std::sqrt(theta1_l * (1.0 - theta1_l) / static_cast<double>(l_ver));
    return clamp01(theta1_l - fluct);
}

double vacuum_error_lower(count_t n_mu_sent, double mu, double y0_l, double phi) {
    check(n_mu_sent >= 1, "vacuum_error_lower: N_mu must be >= 1");
    check(y0_l >= 0.0 && y0_l <= 1.0, "vacuum_error_lower: y0 outside [0,1]");
    const double nd = static_cast<double>(n_mu_sent);
    const double q = std::exp(-mu) * y0_l / 4.0;
    const double v = nd * q - phi * std::sqrt(nd * q * (1.0 - q));
    return std::max(v, 0.0);  // e0*n0 >= 0 is always a valid lower bound
}

double e1_upper(count_t n_err, count_t l_ver, double upsilon, double kappa1_l) {
    check(l_ver >= 1, "e1_upper: l_ver must be >= 1");
    check(n_err >= 0 && n_err <= l_ver, "e1_upper: n_err outside [0, l_ver]");
    if (kappa1_l <= 0.0)
        throw std::domain_error("e1_upper: kappa1 == 0, single-photon fraction uncertifiable");
    const double e_mu = static_cast<double>(n_err) / static_cast<double>(l_ver);
    return clamp01((e_mu - upsilon / static_cast<double>(l_ver)) / kappa1_l);
}

long long secret_key_length(double kappa1_l, double e1_u, count_t l_ver, double leak_ec,
                            double eps_pa) {
    check(kappa1_l >= 0.0 && kappa1_l <= 1.0, "secret_key_length: kappa1 outside [0,1]");
    check(e1_u >= 0.0 && e1_u <= 1.0, "secret_key_length: e1 outside [0,1]");
    check(l_ver >= 0, "secret_key_length: negative l_ver");
    check(eps_pa > 0.0 && eps_pa <= 1.0, "secret_key_length: eps_pa outside (0,1]");
    const double e_capped = std::min(e1_u, 0.5);
    const double v = kappa1_l * static_cast<double>(l_ver) *
                         (1.0 - stats::binary_entropy(e_capped)) -
                     leak_ec + 5.0 * std::log2(eps_pa);
    return static_cast<long long>(std::floor(v));
}

double epsilon_total(const SecurityParams& sec) {
    return sec.eps_ver + sec.eps_aut + sec.eps_pa + sec.eps_decoy;
}

EstimateResult process_decoy_statistics(const ObservedCounts& counts,
                                        const IntensityConfig& cfg,
                                        const SecurityParams& sec) {
    counts.validate();
    if (counts.l_ver < 1) {
        // No verified key; leak is zero and the pipeline aborts below.
        EstimateResult r = process_decoy_statistics(counts, cfg, sec, 0.0);
        return r;
    }
    const double e_mu =
        static_cast<double>(counts.n_err) / static_cast<double>(counts.l_ver);
    const double leak =
        sec.f_ec * stats::binary_entropy(e_mu) * static_cast<double>(counts.l_ver);
    return process_decoy_statistics(counts, cfg, sec, leak);
}

EstimateResult process_decoy_statistics(const ObservedCounts& counts,
                                        const IntensityConfig& cfg,
                                        const SecurityParams& sec, double leak_ec) {
    counts.validate();
    cfg.validate();
    sec.validate();

    EstimateResult r;
    r.eps_qkd = epsilon_total(sec);
    const double phi = compute_phi(sec.eps_decoy, sec.a);

    r.q_mu_u = gain_bounds(counts.n_mu, counts.N_mu, phi).upper;
    const GainBounds qnu = gain_bounds(counts.n_nu, counts.N_nu, phi);
    const GainBounds qlam = gain_bounds(counts.n_lambda, counts.N_lambda, phi);
    r.q_nu_l = qnu.lower;
    r.q_nu_u = qnu.upper;
    r.q_lambda_l = qlam.lower;
    r.q_lambda_u = qlam.upper;

    r.y0_l = y0_lower(r.q_lambda_l, r.q_nu_u, cfg);
    r.q1_l = q1_lower(r.q_nu_l, r.q_lambda_u, r.q_mu_u, r.y0_l, cfg);
    r.theta1_l = r.q_mu_u > 0.0 ? clamp01(r.q1_l / r.q_mu_u) : 0.0;

    if (counts.l_ver < 1) {
        r.aborted = true;
        r.abort_reason = "no verif key";
        r.l_sec = static_cast<long long>(std::floor(5.0 * std::log2(sec.eps_pa)));
        r.e1_u = 1.0;
        return r;
    }

    r.kappa1_l = kappa1_lower(r.theta1_l, counts.l_ver, phi);
    r.upsilon = vacuum_error_lower(counts.N_mu, cfg.mu, r.y0_l, phi);

    if (r.kappa1_l <= 0.0) {
        r.aborted = true;
        r.abort_reason = "kappa1 == 0";
        r.e1_u = 1.0;
        r.l_sec = static_cast<long long>(
            std::floor(-leak_ec + 5.0 * std::log2(sec.eps_pa)));
        return r;
    }

    r.e1_u = e1_upper(counts.n_err, counts.l_ver, r.upsilon, r.kappa1_l);
    r.l_sec = secret_key_length(r.kappa1_l, r.e1_u, counts.l_ver, leak_ec, sec.eps_pa);
    if (r.l_sec <= 0) {
        r.aborted = true;
        r.abort_reason = "l_sec <= 0";
    }
    return r;
}

}  // namespace qkd
