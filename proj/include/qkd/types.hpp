#pragma once

#include <cstdint>
#include <string>

namespace qkd {

using count_t = std::int64_t;

/// Signal/decoy/vacuum intensities and their emission probabilities.
/// The vacuum intensity is a second (weaker) decoy; it must satisfy
/// lambda < nu/2 and lambda + nu < mu for the single-photon bound to hold.
struct IntensityConfig {
    double mu = 0.5;
    double nu = 0.2;
    double lambda = 0.01;
    double p_mu = 0.9;
    double p_nu = 0.07;
    double p_lambda = 0.03;

    void validate() const;  // throws std::invalid_argument on violation
};

/// Failure-probability budget and post-processing constants.
struct SecurityParams {
    double eps_ver = 1e-12;
    double eps_aut = 1e-12;
    double eps_pa = 1e-12;
    double eps_decoy = 1e-12;
    count_t a = 7;       // number of simultaneous one-sided bounds
    double f_ec = 1.15;  // reconciliation inefficiency

    void validate() const;
};

/// Per-session observed statistics: pulses sent and detected per intensity,
/// verified-key length and the error count found during reconciliation.
struct ObservedCounts {
    count_t N = 0;
    count_t N_mu = 0, N_nu = 0, N_lambda = 0;
    count_t n_mu = 0, n_nu = 0, n_lambda = 0;
    count_t l_ver = 0;
    count_t n_err = 0;

    void validate() const;
};

/// Everything the estimator pipeline produces: the gain bounds, the
/// intermediate single-photon bounds, the secret key length and the total
/// failure probability. A non-positive l_sec (or aborted == true) means
/// the session yields no key.
struct EstimateResult {
    double q_mu_u = 0.0;
    double q_nu_l = 0.0, q_nu_u = 0.0;
    double q_lambda_l = 0.0, q_lambda_u = 0.0;
    double y0_l = 0.0;
    double q1_l = 0.0;
    double theta1_l = 0.0;
    double kappa1_l = 0.0;
    double upsilon = 0.0;  // lower bound on e0*n0, in counts
    double e1_u = 0.0;
    long long l_sec = 0;  // bits; <= 0 means abort
    double eps_qkd = 0.0;
    bool aborted = false;
    std::string abort_reason;
};

}  // namespace qkd
