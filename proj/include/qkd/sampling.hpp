#pragma once

#include <array>
#include <cstdint>

#include "qkd/channel.hpp"
#include "qkd/types.hpp"

// Seeded sampling of session statistics. The generator and the binomial
// sampler are implemented here (not taken from <random>) so that a given
// seed produces the same stream on every platform and standard library.

namespace qkd::mc {

/// xoshiro256** seeded through splitmix64.
class Rng {
  public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double();

  private:
    std::array<std::uint64_t, 4> s_;
};

/// Derives an independent per-trial seed from a base seed and an index, so
/// trials can be generated in any order (or in parallel) reproducibly.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// One draw from Bi(n, p). Inversion for small n*p, BTRS (transformed
/// rejection) for the bulk regime; O(1) expected time even for n = 1e8.
count_t binomial_sample(Rng& rng, count_t n, double p);

/// Latent per-trial quantities needed by coverage checks but not visible in
/// ObservedCounts: the realized single-photon count of the verified key and
/// the realized vacuum-pulse error count.
struct TrialLatents {
    count_t n1 = 0;
    count_t e0n0 = 0;
};

/// Samples one session: N_alpha jointly multinomial, n_alpha binomial given
/// the true gains, l_ver from sifting, n_err from the true QBER.
/// Deterministic for a fixed seed.
ObservedCounts sample_counts(const IntensityConfig& cfg, const ChannelExpectation& truth,
                             count_t n_pulses, std::uint64_t seed);

/// Same draws as sample_counts from the same seed, then additionally samples
/// the latent single-photon and vacuum-error counts.
ObservedCounts sample_trial(const IntensityConfig& cfg, const ChannelExpectation& truth,
                            count_t n_pulses, std::uint64_t seed, TrialLatents& latents);

}  // namespace qkd::mc
