// decoystats: finite-key decoy-state statistics CLI.
//
// Subcommands:
//   estimate   process a counts file into key-length estimates
//   sweep      optimize intensities over a distance grid, emit CSV
//   deviation  Gaussian-vs-binomial tail deviation reports, emit CSV
//   coverage   seeded Monte Carlo bound-violation rates, emit CSV
//
// Exit codes: 0 success (positive key), 2 clean abort (no key), 1 error.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qkd/channel.hpp"
#include "qkd/config.hpp"
#include "qkd/coverage.hpp"
#include "qkd/deviation.hpp"
#include "qkd/estimator.hpp"
#include "qkd/optimize.hpp"
#include "qkd/stats.hpp"
#include "qkd/types.hpp"

namespace {

using qkd::io::format_double;
using qkd::io::format_int;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitAbort = 2;

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file: " + path);
    out << content;
}

std::string estimate_csv(const qkd::EstimateResult& r) {
    std::string csv =
        "q_mu_u,q_nu_l,q_nu_u,q_lambda_l,q_lambda_u,y0_l,q1_l,theta1_l,kappa1_l,"
        "upsilon,e1_u,l_sec,eps_qkd,aborted\n";
    csv += format_double(r.q_mu_u) + "," + format_double(r.q_nu_l) + "," +
           format_double(r.q_nu_u) + "," + format_double(r.q_lambda_l) + "," +
           format_double(r.q_lambda_u) + "," + format_double(r.y0_l) + "," +
           format_double(r.q1_l) + "," + format_double(r.theta1_l) + "," +
           format_double(r.kappa1_l) + "," + format_double(r.upsilon) + "," +
           format_double(r.e1_u) + "," + format_int(r.l_sec) + "," +
           format_double(r.eps_qkd) + "," + (r.aborted ? "1" : "0") + "\n";
    return csv;
}

int cmd_estimate(const std::string& counts_path, const std::string& config_path,
                 const std::string& out_path) {
    const qkd::io::RunConfig cfg = qkd::io::load_config(config_path);
    if (!cfg.intensity)
        throw std::runtime_error("estimate requires an [intensity] section in the config");
    const qkd::ObservedCounts counts = qkd::io::load_counts(counts_path);

    const qkd::EstimateResult r =
        qkd::process_decoy_statistics(counts, *cfg.intensity, cfg.security);

    std::cout << "q_mu_u = " << format_double(r.q_mu_u) << "\n"
              << "q_nu_l = " << format_double(r.q_nu_l) << "\n"
              << "q_nu_u = " << format_double(r.q_nu_u) << "\n"
              << "q_lambda_l = " << format_double(r.q_lambda_l) << "\n"
              << "q_lambda_u = " << format_double(r.q_lambda_u) << "\n"
              << "y0_l = " << format_double(r.y0_l) << "\n"
              << "q1_l = " << format_double(r.q1_l) << "\n"
              << "theta1_l = " << format_double(r.theta1_l) << "\n"
              << "kappa1_l = " << format_double(r.kappa1_l) << "\n"
              << "upsilon = " << format_double(r.upsilon) << "\n"
              << "e1_u = " << format_double(r.e1_u) << "\n"
              << "l_sec = " << format_int(r.l_sec) << "\n"
              << "eps_qkd = " << format_double(r.eps_qkd) << "\n";
    if (r.aborted) std::cout << "abort_reason = " << r.abort_reason << "\n";

    if (!out_path.empty()) write_file(out_path, estimate_csv(r));
    return r.aborted ? kExitAbort : kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::vector<double>& distances,
              const std::string& out_path, std::uint64_t seed) {
    const qkd::io::RunConfig cfg = config_path.empty() ? qkd::io::RunConfig{}
                                                       : qkd::io::load_config(config_path);
    std::string csv =
        "distance_km,mu,nu,p_mu,p_nu,p_lambda,qber,N,l_ver,l_sec,R_sift,R_sec,"
        "mu_star,R_sec_star\n";

    const qkd::opt::BlockRule block;
    for (std::size_t i = 0; i < distances.size(); ++i) {
        const double d = distances[i];
        qkd::opt::IntensityOptimum opt;
        if (cfg.intensity) {
            opt.config = *cfg.intensity;
            opt.n_pulses = qkd::block_rule_pulses(opt.config, d, cfg.setup,
                                                  block.max_l_ver, block.max_seconds);
            const qkd::SessionExpectation sess =
                qkd::session_expectation(opt.config, d, cfg.setup, opt.n_pulses);
            const qkd::EstimateResult est =
                qkd::process_decoy_statistics(sess.counts, opt.config, cfg.security);
            opt.l_sec = est.l_sec;
            opt.r_sec = static_cast<double>(est.l_sec) / sess.channel.session_time;
            opt.l_ver = sess.counts.l_ver;
            opt.qber = sess.channel.e_mu;
            opt.sifted_rate = sess.channel.sifted_rate;
            opt.session_time = sess.channel.session_time;
            opt.aborted = est.aborted || est.l_sec <= 0;
        } else {
            qkd::opt::DeConfig de;
            de.seed = qkd::mc::derive_seed(seed, i);
            opt = qkd::opt::optimize_intensities(d, cfg.setup, cfg.security, block, de);
        }
        const qkd::opt::SignalOptimum star =
            qkd::opt::optimize_signal_only(d, cfg.setup, cfg.security.f_ec);

        const double r_sec = opt.aborted || opt.l_sec <= 0 ? 0.0 : opt.r_sec;
        csv += format_double(d) + "," + format_double(opt.config.mu) + "," +
               format_double(opt.config.nu) + "," + format_double(opt.config.p_mu) + "," +
               format_double(opt.config.p_nu) + "," +
               format_double(opt.config.p_lambda) + "," + format_double(opt.qber) + "," +
               format_int(opt.n_pulses) + "," + format_int(opt.l_ver) + "," +
               format_int(opt.l_sec) + "," + format_double(opt.sifted_rate) + "," +
               format_double(r_sec) + "," + format_double(star.mu_star) + "," +
               format_double(star.r_sec_star) + "\n";
    }

    if (out_path.empty())
        std::cout << csv;
    else
        write_file(out_path, csv);
    return kExitOk;
}

int cmd_deviation(const std::string& config_path, const std::vector<double>& ns,
                  const std::vector<double>& ps, const std::string& method_arg,
                  const std::string& out_path) {
    const qkd::io::RunConfig cfg = config_path.empty() ? qkd::io::RunConfig{}
                                                       : qkd::io::load_config(config_path);
    if (ns.size() != ps.size())
        throw std::runtime_error("--n and --p lists must have the same length");
    if (ns.empty()) throw std::runtime_error("empty --n/--p lists");

    std::vector<qkd::dev::Method> methods;
    if (method_arg == "all") {
        methods = {qkd::dev::Method::taylor, qkd::dev::Method::sandwich,
                   qkd::dev::Method::exact};
    } else {
        methods = {qkd::dev::method_from_name(method_arg)};
    }

    std::string csv = "n,p,method,phi,eps_target,eps_prime_minus_eps,skew_corr,disc_corr\n";
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (ns[i] < 1 || std::floor(ns[i]) != ns[i])
            throw std::runtime_error("--n entries must be positive integers");
        if (!(ps[i] > 0.0 && ps[i] < 1.0))
            throw std::runtime_error("--p entries must lie in (0,1)");
        const auto n = static_cast<qkd::count_t>(ns[i]);
        for (const auto method : methods) {
            const qkd::dev::DeviationReport rep =
                qkd::dev::deviation_report(n, ps[i], cfg.security, method);
            const qkd::dev::TaylorCorrections corr =
                qkd::dev::taylor_deviation(n, ps[i], rep.phi);
            csv += format_int(n) + "," + format_double(ps[i]) + "," +
                   std::string(qkd::dev::method_name(method)) + "," +
                   format_double(rep.phi) + "," + format_double(rep.eps_target) + "," +
                   format_double(rep.eps_prime_minus_eps) + "," +
                   format_double(corr.lower_corr) + "," +
                   format_double(corr.upper_corr - corr.lower_corr) + "\n";
        }
    }

    if (out_path.empty())
        std::cout << csv;
    else
        write_file(out_path, csv);
    return kExitOk;
}

int cmd_coverage(const std::string& config_path, qkd::count_t trials, std::uint64_t seed,
                 const std::vector<double>& distances, qkd::count_t pulses,
                 const std::string& out_path) {
    const qkd::io::RunConfig cfg = qkd::io::load_config(config_path);
    if (!cfg.intensity)
        throw std::runtime_error("coverage requires an [intensity] section in the config");
    if (trials < 1) throw std::runtime_error("--trials must be >= 1");
    const double distance = distances.empty() ? 25.0 : distances.front();

    const qkd::SessionExpectation sess =
        qkd::session_expectation(*cfg.intensity, distance, cfg.setup, pulses);
    const qkd::mc::CoverageReport report = qkd::mc::coverage_experiment(
        *cfg.intensity, sess.channel, pulses, cfg.security, trials, seed);

    std::string csv = "bound,violations,trials,rate,wilson_low,wilson_high\n";
    for (int b = 0; b < qkd::mc::kBoundCount; ++b) {
        const auto bound = static_cast<qkd::mc::Bound>(b);
        const auto iv = report.interval(bound);
        csv += std::string(qkd::mc::bound_name(bound)) + "," +
               format_int(report.violations[b]) + "," + format_int(report.trials) + "," +
               format_double(report.rate(bound)) + "," + format_double(iv.low) + "," +
               format_double(iv.high) + "\n";
    }
    const auto joint_iv = report.joint_interval();
    csv += "joint," + format_int(report.joint_violations) + "," +
           format_int(report.trials) + "," + format_double(report.joint_rate()) + "," +
           format_double(joint_iv.low) + "," + format_double(joint_iv.high) + "\n";

    if (out_path.empty())
        std::cout << csv;
    else
        write_file(out_path, csv);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-key decoy-state QKD statistics"};
    app.require_subcommand(1);

    std::string config_path, counts_path, out_path;
    std::string distances_arg, n_arg, p_arg, method_arg = "taylor";
    std::uint64_t seed = 1;
    qkd::count_t trials = 0;
    qkd::count_t pulses = 1'000'000;

    auto* estimate = app.add_subcommand("estimate", "Process a counts file");
    estimate->add_option("--counts", counts_path, "Counts file")->required();
    estimate->add_option("--config", config_path, "Config file")->required();
    estimate->add_option("--out", out_path, "Optional CSV output path");

    auto* sweep = app.add_subcommand("sweep", "Distance sweep with optimization");
    sweep->add_option("--config", config_path, "Config file");
    sweep->add_option("--distances", distances_arg, "Comma-separated distances in km")
        ->required();
    sweep->add_option("--out", out_path, "CSV output path");
    sweep->add_option("--seed", seed, "Optimizer seed");

    auto* deviation = app.add_subcommand("deviation", "Tail deviation reports");
    deviation->add_option("--config", config_path, "Config file");
    deviation->add_option("--n", n_arg, "Comma-separated trial counts")->required();
    deviation->add_option("--p", p_arg, "Comma-separated success probabilities")
        ->required();
    deviation->add_option("--method", method_arg, "taylor|sandwich|exact|all");
    deviation->add_option("--out", out_path, "CSV output path");

    auto* coverage = app.add_subcommand("coverage", "Monte Carlo coverage rates");
    coverage->add_option("--config", config_path, "Config file")->required();
    coverage->add_option("--trials", trials, "Number of trials")->required();
    coverage->add_option("--seed", seed, "Base seed");
    coverage->add_option("--distances", distances_arg, "Distance in km (first used)");
    coverage->add_option("--pulses", pulses, "Pulses per trial");
    coverage->add_option("--out", out_path, "CSV output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitError;
    }

    try {
        if (estimate->parsed()) return cmd_estimate(counts_path, config_path, out_path);
        if (sweep->parsed())
            return cmd_sweep(config_path, qkd::io::parse_double_list(distances_arg),
                             out_path, seed);
        if (deviation->parsed())
            return cmd_deviation(config_path, qkd::io::parse_double_list(n_arg),
                                 qkd::io::parse_double_list(p_arg), method_arg, out_path);
        if (coverage->parsed()) {
            const auto distances = distances_arg.empty()
                                       ? std::vector<double>{}
                                       : qkd::io::parse_double_list(distances_arg);
            return cmd_coverage(config_path, trials, seed, distances, pulses, out_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
