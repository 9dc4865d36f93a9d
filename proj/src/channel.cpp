#include "qkd/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qkd/stats.hpp"

namespace qkd {

namespace {

void check(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

constexpr double kFiberLightSpeed = 2e8;  // m/s

struct RawModel {
    double eta;
    double y0;     // 2 * dark_count, before dead-time correction
    double e_det;  // (1 - visibility) / 2
};

RawModel raw_model(double distance_km, const SetupParams& s) {
    return RawModel{transmittance(distance_km, s), 2.0 * s.dark_count,
                    (1.0 - s.visibility) / 2.0};
}

double raw_gain(double intensity, const RawModel& m) {
    return m.y0 + (1.0 - m.y0) * (-std::expm1(-m.eta * intensity));
}

double raw_qber(double intensity, const RawModel& m) {
    const double q = raw_gain(intensity, m);
    if (q <= 0.0) return 0.5;
    const double bad = 0.5 * m.y0 + m.e_det * (-std::expm1(-m.eta * intensity));
    return std::min(bad / q, 0.5);
}

}  // namespace

void SetupParams::validate() const {
    check(train_size >= 1.0, "SetupParams: train_size must be >= 1");
    check(rep_rate_hz > 0.0, "SetupParams: rep_rate must be positive");
    check(storage_line_km >= 0.0, "SetupParams: negative storage line");
    check(det_eff > 0.0 && det_eff <= 1.0, "SetupParams: det_eff outside (0,1]");
    check(dead_time_s >= 0.0, "SetupParams: negative dead time");
    check(dark_count >= 0.0 && dark_count <= 1.0, "SetupParams: dark_count outside [0,1]");
    check(extra_loss_db >= 0.0 && atten_db_per_km >= 0.0, "SetupParams: negative loss");
    check(visibility >= 0.0 && visibility <= 1.0, "SetupParams: visibility outside [0,1]");
}

double transmittance(double distance_km, const SetupParams& setup) {
    check(distance_km >= 0.0, "transmittance: negative distance");
    const double loss_db = setup.atten_db_per_km * distance_km + setup.extra_loss_db;
    return setup.det_eff * std::pow(10.0, -loss_db / 10.0);
}

double expected_gain(double intensity, double distance_km, const SetupParams& setup) {
    check(intensity >= 0.0, "expected_gain: negative intensity");
    return raw_gain(intensity, raw_model(distance_km, setup));
}

double expected_qber(double intensity, double distance_km, const SetupParams& setup) {
    check(intensity >= 0.0, "expected_qber: negative intensity");
    return raw_qber(intensity, raw_model(distance_km, setup));
}

double effective_pulse_rate(const SetupParams& setup) {
    const double t_train = setup.train_size / setup.rep_rate_hz;
    const double t_line = 2.0 * setup.storage_line_km * 1000.0 / kFiberLightSpeed;
    return setup.rep_rate_hz * t_train / (t_train + t_line);
}

SessionExpectation session_expectation(const IntensityConfig& cfg, double distance_km,
                                       const SetupParams& setup, count_t n_pulses) {
    cfg.validate();
    setup.validate();
    check(n_pulses >= 1, "session_expectation: need at least one pulse");

    const RawModel m = raw_model(distance_km, setup);
    const double q_raw[3] = {raw_gain(cfg.mu, m), raw_gain(cfg.nu, m),
                             raw_gain(cfg.lambda, m)};
    const double p[3] = {cfg.p_mu, cfg.p_nu, cfg.p_lambda};

    const double rate = effective_pulse_rate(setup);
    const double mean_gain = p[0] * q_raw[0] + p[1] * q_raw[1] + p[2] * q_raw[2];
    const double detection_rate = mean_gain * rate;
    const double thin = 1.0 / (1.0 + detection_rate * setup.dead_time_s);

    SessionExpectation out;
    ChannelExpectation& ch = out.channel;
    ch.q_mu = q_raw[0] * thin;
    ch.q_nu = q_raw[1] * thin;
    ch.q_lambda = q_raw[2] * thin;
    ch.e_mu = raw_qber(cfg.mu, m);
    ch.e_nu = raw_qber(cfg.nu, m);
    ch.e_lambda = raw_qber(cfg.lambda, m);
    ch.y0 = m.y0 * thin;

    // Single-photon fraction of signal detections; thinning cancels in the
    // ratio. Y1 = Y0 + (1 - Y0) * eta for exactly one photon.
    const double y1 = m.y0 + (1.0 - m.y0) * m.eta;
    ch.theta1 = q_raw[0] > 0.0
                    ? cfg.mu * std::exp(-cfg.mu) * y1 / q_raw[0]
                    : 0.0;

    ObservedCounts& c = out.counts;
    c.N = n_pulses;
    c.N_nu = std::llround(p[1] * static_cast<double>(n_pulses));
    c.N_lambda = std::llround(p[2] * static_cast<double>(n_pulses));
    c.N_mu = n_pulses - c.N_nu - c.N_lambda;
    c.n_mu = std::llround(static_cast<double>(c.N_mu) * ch.q_mu);
    c.n_nu = std::llround(static_cast<double>(c.N_nu) * ch.q_nu);
    c.n_lambda = std::llround(static_cast<double>(c.N_lambda) * ch.q_lambda);
    c.l_ver = c.n_mu / 2;  // basis sifting keeps half the detections
    c.n_err = std::llround(static_cast<double>(c.l_ver) * ch.e_mu);

    ch.session_time = static_cast<double>(n_pulses) / rate;
    ch.sifted_rate =
        ch.session_time > 0.0 ? static_cast<double>(c.l_ver) / ch.session_time : 0.0;
    return out;
}

count_t block_rule_pulses(const IntensityConfig& cfg, double distance_km,
                          const SetupParams& setup, count_t max_l_ver,
                          double max_seconds) {
    cfg.validate();
    setup.validate();
    check(max_l_ver >= 1 && max_seconds > 0.0, "block_rule_pulses: empty block rule");

    const RawModel m = raw_model(distance_km, setup);
    const double q_raw[3] = {raw_gain(cfg.mu, m), raw_gain(cfg.nu, m),
                             raw_gain(cfg.lambda, m)};
    const double rate = effective_pulse_rate(setup);
    const double mean_gain =
        cfg.p_mu * q_raw[0] + cfg.p_nu * q_raw[1] + cfg.p_lambda * q_raw[2];
    const double thin = 1.0 / (1.0 + mean_gain * rate * setup.dead_time_s);
    const double q_mu_eff = q_raw[0] * thin;

    const double n_time = max_seconds * rate;
    double n = n_time;
    if (q_mu_eff > 0.0) {
        const double n_bits =
            2.0 * static_cast<double>(max_l_ver) / (cfg.p_mu * q_mu_eff);
        n = std::min(n_time, n_bits);
    }
    return std::max<count_t>(1, static_cast<count_t>(std::llround(n)));
}

double theoretical_limit_rate(double distance_km, const SetupParams& setup,
                              double mu_star, double f_ec) {
    setup.validate();
    check(mu_star > 0.0, "theoretical_limit_rate: mu must be positive");
    check(f_ec >= 1.0, "theoretical_limit_rate: f_ec must be >= 1");

    const RawModel m = raw_model(distance_km, setup);
    const double q_mu = raw_gain(mu_star, m);
    if (q_mu <= 0.0) return 0.0;
    const double e_mu = raw_qber(mu_star, m);
    const double y1 = m.y0 + (1.0 - m.y0) * m.eta;
    const double kappa1 = std::min(mu_star * std::exp(-mu_star) * y1 / q_mu, 1.0);
    const double e1 =
        y1 > 0.0 ? std::min((0.5 * m.y0 + m.e_det * (1.0 - m.y0) * m.eta) / y1, 0.5) : 0.5;

    const double rate = effective_pulse_rate(setup);
    const double thin = 1.0 / (1.0 + q_mu * rate * setup.dead_time_s);
    const double r_sift = 0.5 * rate * q_mu * thin;
    return r_sift * (kappa1 * (1.0 - stats::binary_entropy(e1)) -
                     f_ec * stats::binary_entropy(e_mu));
}

}  // namespace qkd
