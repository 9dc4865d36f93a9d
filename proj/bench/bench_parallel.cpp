// Compares the serial reference implementations against the OpenMP paths
// for the two data-parallel kernels: Monte Carlo coverage trials and
// differential-evolution population evaluation.
//
//   ./bench_parallel [trials] [generations]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <span>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qkd/channel.hpp"
#include "qkd/coverage.hpp"
#include "qkd/optimize.hpp"

using namespace qkd;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    const count_t trials = argc > 1 ? std::atoll(argv[1]) : 20'000;
    const int generations = argc > 2 ? std::atoi(argv[2]) : 300;

#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both paths run serially\n");
#endif

    // coverage kernel
    IntensityConfig cfg;
    cfg.mu = 1.5;
    cfg.nu = 0.9;
    cfg.lambda = 0.44;
    cfg.p_mu = 0.35;
    cfg.p_nu = 0.25;
    cfg.p_lambda = 0.40;
    SecurityParams sec;
    sec.eps_decoy = 0.07;
    const count_t n_pulses = 1'000'000;
    const ChannelExpectation truth =
        session_expectation(cfg, 25.0, SetupParams{}, n_pulses).channel;

    auto t0 = std::chrono::steady_clock::now();
    const mc::CoverageReport serial =
        mc::coverage_experiment(cfg, truth, n_pulses, sec, trials, 1, /*parallel=*/false);
    const double t_serial = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const mc::CoverageReport parallel =
        mc::coverage_experiment(cfg, truth, n_pulses, sec, trials, 1, /*parallel=*/true);
    const double t_parallel = seconds_since(t0);

    bool same = serial.joint_violations == parallel.joint_violations;
    for (int b = 0; b < mc::kBoundCount; ++b)
        same = same && serial.violations[b] == parallel.violations[b];
    std::printf("coverage  %8lld trials   serial %.3fs   parallel %.3fs   x%.2f   %s\n",
                static_cast<long long>(trials), t_serial, t_parallel,
                t_serial / t_parallel, same ? "identical" : "MISMATCH");

    // DE kernel on the 50 km finite-key objective
    opt::DeConfig de;
    de.generations = generations;
    de.seed = 1;

    de.parallel = false;
    t0 = std::chrono::steady_clock::now();
    const opt::IntensityOptimum o_serial =
        opt::optimize_intensities(50.0, SetupParams{}, SecurityParams{}, opt::BlockRule{}, de);
    const double d_serial = seconds_since(t0);

    de.parallel = true;
    t0 = std::chrono::steady_clock::now();
    const opt::IntensityOptimum o_parallel =
        opt::optimize_intensities(50.0, SetupParams{}, SecurityParams{}, opt::BlockRule{}, de);
    const double d_parallel = seconds_since(t0);

    std::printf("de-50km   %8d gens     serial %.3fs   parallel %.3fs   x%.2f   %s\n",
                generations, d_serial, d_parallel, d_serial / d_parallel,
                o_serial.l_sec == o_parallel.l_sec ? "identical" : "MISMATCH");
    return (same && o_serial.l_sec == o_parallel.l_sec) ? 0 : 1;
}
