#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qkd/channel.hpp"
#include "qkd/types.hpp"

// Flat key = value configuration and counts files, plus locale-independent
// number formatting for CSV output. Keys are section-qualified
// (setup.det_eff, security.eps_pa, intensity.mu, ...); a [section] header
// sets the prefix for the lines that follow, and fully qualified keys are
// accepted anywhere.

namespace qkd::io {

struct RunConfig {
    SetupParams setup;
    SecurityParams security;
    std::optional<IntensityConfig> intensity;  // optimized per distance when absent
    std::vector<double> distances_km;          // sweep grid (from CLI flags)
    std::string output_path;

    bool operator==(const RunConfig& other) const;
};

RunConfig parse_config(std::string_view text);       // throws std::runtime_error
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);
void save_config(const RunConfig& cfg, const std::string& path);

ObservedCounts parse_counts(std::string_view text);
ObservedCounts load_counts(const std::string& path);
std::string serialize_counts(const ObservedCounts& counts);
void save_counts(const ObservedCounts& counts, const std::string& path);

/// Shortest round-trip decimal form of a double (std::to_chars): stable,
/// locale-free, parses back to the identical bits.
std::string format_double(double v);
std::string format_int(long long v);

/// Parses a comma-separated list of numbers ("10,25.5,50"). Throws on junk.
std::vector<double> parse_double_list(std::string_view text);

}  // namespace qkd::io
