#pragma once

#include "qkd/types.hpp"

// Decoy statistics pipeline: from per-intensity counts to the certified
// single-photon fraction, single-photon error bound, secret key length and
// total failure probability. All statistical terms use the normal
// approximation at confidence phi = Phi^{-1}(1 - eps_decoy / a); exactly
// a = 7 one-sided bounds are consumed per run (five gain bounds, the
// kappa_1 bound and the e0*n0 bound).

namespace qkd {

struct GainBounds {
    double lower;
    double upper;
};

/// phi = Phi^{-1}(1 - eps_decoy / a), the one-sided confidence multiplier.
double compute_phi(double eps_decoy, count_t a);

/// Wald bounds on a detection probability: Qhat -+ phi*sqrt(Qhat(1-Qhat)/N),
/// clamped into [0,1]. Throws on N_sent == 0.
GainBounds gain_bounds(count_t n_det, count_t n_sent, double phi);

/// Lower bound on the zero-photon yield from the two decoy gains:
/// max{ (nu Ql_lambda e^lambda - lambda Qu_nu e^nu) / (nu - lambda), 0 }.
double y0_lower(double q_lambda_l, double q_nu_u, const IntensityConfig& cfg);

/// Lower bound on the single-photon gain Q1 (clamped at 0).
double q1_lower(double q_nu_l, double q_lambda_u, double q_mu_u, double y0_l,
                const IntensityConfig& cfg);

/// Fluctuation-corrected lower bound on the realized single-photon fraction
/// of the verified key, clamped into [0,1].
double kappa1_lower(double theta1_l, count_t l_ver, double phi);

/// Lower bound (in counts) on the number of errors contributed by vacuum
/// signal pulses, clamped at 0; vacuum pulses err with probability 1/2.
double vacuum_error_lower(count_t n_mu_sent, double mu, double y0_l, double phi);

/// Upper bound on the single-photon error rate:
/// (n_err/l_ver - upsilon/l_ver) / kappa1_l, clamped into [0,1].
/// Throws std::domain_error when kappa1_l == 0 (nothing certifiable).
double e1_upper(count_t n_err, count_t l_ver, double upsilon, double kappa1_l);

/// Extractable key length, floored to an integer:
/// kappa1_l * l_ver * [1 - h(e1_u)] - leak_ec + 5*log2(eps_pa).
/// e1_u is capped at 1/2 before the entropy evaluation so an uncertifiable
/// error rate cannot produce a spuriously positive length.
long long secret_key_length(double kappa1_l, double e1_u, count_t l_ver,
                            double leak_ec, double eps_pa);

/// eps_qkd = eps_ver + eps_aut + eps_pa + eps_decoy.
double epsilon_total(const SecurityParams& sec);

/// Full pipeline. leak_ec defaults to f_ec * h(e_mu) * l_ver; the overload
/// accepts a measured leak instead. Abort (kappa1 == 0, l_ver == 0 or
/// l_sec <= 0) is reported through the result flags, not an exception.
EstimateResult process_decoy_statistics(const ObservedCounts& counts,
                                        const IntensityConfig& cfg,
                                        const SecurityParams& sec);
EstimateResult process_decoy_statistics(const ObservedCounts& counts,
                                        const IntensityConfig& cfg,
                                        const SecurityParams& sec,
                                        double leak_ec);

}  // namespace qkd
