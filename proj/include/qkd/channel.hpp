#pragma once

#include "qkd/types.hpp"

// Deterministic expectation model of a plug-and-play fiber setup: gains and
// error rates per intensity, session timing with train/storage-line duty and
// detector dead time, and the no-fluctuation secret key rate limit.

namespace qkd {

/// Physical channel and device parameters. Defaults describe the reference
/// setup: 50k-pulse trains at 300 MHz, 17 km storage line, 10% detectors with
/// 1 us dead time and 3e-7 dark counts per gate, 5 dB receiver loss,
/// 0.2 dB/km fiber, 97% interference visibility.
struct SetupParams {
    double train_size = 5e4;
    double rep_rate_hz = 3e8;
    double storage_line_km = 17.0;
    double det_eff = 0.10;
    double dead_time_s = 1e-6;
    double dark_count = 3e-7;
    double extra_loss_db = 5.0;
    double atten_db_per_km = 0.2;
    double visibility = 0.97;

    void validate() const;
};

/// True per-session channel parameters: dead-time-corrected gains and QBERs
/// per intensity, the single-photon fraction of signal detections, the
/// zero-photon yield, and the session timing. These are the "truth" values
/// that Monte Carlo sampling and coverage checks consume.
struct ChannelExpectation {
    double q_mu = 0.0, q_nu = 0.0, q_lambda = 0.0;
    double e_mu = 0.5, e_nu = 0.5, e_lambda = 0.5;
    double theta1 = 0.0;      // P(bit of verified key came from a 1-photon pulse)
    double y0 = 0.0;          // zero-photon yield after dead-time correction
    double sifted_rate = 0.0; // bits/s
    double session_time = 0.0;
};

struct SessionExpectation {
    ChannelExpectation channel;
    ObservedCounts counts;  // expected counts, rounded to integers
};

/// End-to-end transmittance including detector efficiency and receiver loss:
/// eta = det_eff * 10^(-(atten*distance + extra_loss)/10).
double transmittance(double distance_km, const SetupParams& setup);

/// Expected gain of a Poisson pulse of the given mean photon number,
/// Q = Y0 + (1 - Y0)(1 - e^(-eta*intensity)), Y0 = 2*dark_count.
/// No dead-time correction; that is applied at session level.
double expected_gain(double intensity, double distance_km, const SetupParams& setup);

/// Expected QBER: (Y0/2 + e_det (1 - e^(-eta*intensity))) / Q with
/// e_det = (1 - visibility)/2. Returns 1/2 when the gain vanishes.
double expected_qber(double intensity, double distance_km, const SetupParams& setup);

/// Pulse rate averaged over the train/storage-line duty cycle; trains cannot
/// be emitted while the previous train is returning through the line.
double effective_pulse_rate(const SetupParams& setup);

/// Expected session statistics for n_pulses sent: expected ObservedCounts
/// (rounded), dead-time-corrected truth values and timing.
SessionExpectation session_expectation(const IntensityConfig& cfg, double distance_km,
                                       const SetupParams& setup, count_t n_pulses);

/// Number of pulses the block rule allows: the session stops at max_l_ver
/// verified bits or after max_seconds, whichever comes first.
count_t block_rule_pulses(const IntensityConfig& cfg, double distance_km,
                          const SetupParams& setup, count_t max_l_ver,
                          double max_seconds);

/// Secret key rate with exact single-photon knowledge (no decoys, no
/// statistical penalty): R* = R_sift * { kappa1 [1 - h(e1)] - f_ec h(e_mu) }.
double theoretical_limit_rate(double distance_km, const SetupParams& setup,
                              double mu_star, double f_ec = 1.15);

}  // namespace qkd
