// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "z3sim/experiments.hpp"

namespace z3sim::cli {

/// Flags shared by all subcommands. Thread count never changes results.
struct CommonOptions {
    std::filesystem::path config_path;
    std::filesystem::path out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<Eigen::Index> ensemble_size;
    std::optional<SaturatedSelection> selection;
    int threads = 0;
};

/// What a finished run produced; serialized into summary.json. Every listed
/// output exists on disk when the command returns.
struct RunManifest {
    std::string command;
    std::map<std::string, std::string> config_echo;
    std::string version;
    double duration_seconds = 0.0;
    std::vector<std::string> outputs;
    std::map<std::string, int> clamp_counts;
};

enum class SweepAxis { Noise, Backoff };

struct PatternOptions {
    Eigen::Index antenna_count = 32;
    double user_angle_deg = 0.0;
    std::string grid_spec;  // degrees, "start:stop:points"
    Eigen::Index saturated_count = 2;
};

/// "start:stop:points" with start <= stop; points == 1 requires start == stop.
std::vector<double> parse_grid_spec(const std::string& spec);

/// Location scan: ECDF tables, the configured placement's heatmap, summary.json.
RunManifest cmd_scan(const CommonOptions& options, int users);

/// Rate table over a noise (p*M*||h||^2/sigma_v^2, dB) or back-off grid.
RunManifest cmd_sweep(const CommonOptions& options, SweepAxis axis, const std::string& grid_spec);

/// Angular third-order distortion pattern for a LOS ULA user. The config file
/// is optional here; it supplies the PA model and ensemble settings.
RunManifest cmd_pattern(const CommonOptions& options, const PatternOptions& pattern);

}  // namespace z3sim::cli
