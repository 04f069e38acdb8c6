// SPDX-License-Identifier: Apache-2.0
//
// z3rosim: link-level simulator comparing MRT and Z3RO precoding under
// nonlinear power amplifiers on measured or synthetic channels.

#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "commands.hpp"
#include "z3sim/errors.hpp"
#include "z3sim/version.hpp"

namespace {

void add_common(CLI::App* cmd, z3sim::cli::CommonOptions& options, bool config_required) {
    auto* config = cmd->add_option("--config", options.config_path, "Scenario config file");
    if (config_required) {
        config->required();
    }
    cmd->add_option("--out", options.out_dir, "Output directory")->required();
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&options](std::uint64_t v) { options.seed = v; },
        "Override the config master seed");
    cmd->add_option_function<long long>(
        "--ensemble-size",
        [&options](long long v) { options.ensemble_size = static_cast<Eigen::Index>(v); },
        "Override the Monte-Carlo ensemble size");
    cmd->add_option_function<std::string>(
        "--selection",
        [&options](const std::string& v) {
            if (v == "first") {
                options.selection = z3sim::SaturatedSelection::FirstIndices;
            } else if (v == "smallest") {
                options.selection = z3sim::SaturatedSelection::SmallestGains;
            } else {
                throw CLI::ValidationError("--selection", "must be 'first' or 'smallest'");
            }
        },
        "Saturated antenna selection: first|smallest");
    cmd->add_option("--threads", options.threads, "Worker thread cap (0 = all hardware threads)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MRT vs. Z3RO precoding distortion assessment"};
    app.set_version_flag("--version", std::string("z3rosim ") + z3sim::kVersion);
    app.require_subcommand(1);

    z3sim::cli::CommonOptions scan_options;
    int scan_users = 1;
    auto* scan = app.add_subcommand("scan", "Place user(s) at every location and compare precoders");
    add_common(scan, scan_options, /*config_required=*/true);
    scan->add_option("--users", scan_users, "Number of simultaneous users")
        ->check(CLI::IsMember({1, 2}));

    z3sim::cli::CommonOptions sweep_options;
    std::string sweep_axis = "noise";
    std::string sweep_grid;
    auto* sweep = app.add_subcommand("sweep", "Rate table over a noise or back-off grid");
    add_common(sweep, sweep_options, /*config_required=*/true);
    sweep->add_option("--axis", sweep_axis, "Sweep axis: noise|backoff")
        ->check(CLI::IsMember({"noise", "backoff"}));
    sweep->add_option("--grid", sweep_grid, "Grid spec start:stop:points in dB")->required();

    z3sim::cli::CommonOptions pattern_options;
    z3sim::cli::PatternOptions pattern;
    auto* pattern_cmd =
        app.add_subcommand("pattern", "Angular third-order distortion pattern for a LOS ULA");
    add_common(pattern_cmd, pattern_options, /*config_required=*/false);
    pattern_cmd->add_option("--m", pattern.antenna_count, "Number of array antennas");
    pattern_cmd->add_option("--user-angle", pattern.user_angle_deg, "User angle in degrees");
    pattern_cmd->add_option("--grid", pattern.grid_spec, "Angle grid start:stop:points in degrees")
        ->required();
    pattern_cmd->add_option("--ms", pattern.saturated_count, "Saturated antenna count M_s");

    CLI11_PARSE(app, argc, argv);

    try {
        if (scan->parsed()) {
            z3sim::cli::cmd_scan(scan_options, scan_users);
        } else if (sweep->parsed()) {
            const auto axis = sweep_axis == "noise" ? z3sim::cli::SweepAxis::Noise
                                                    : z3sim::cli::SweepAxis::Backoff;
            z3sim::cli::cmd_sweep(sweep_options, axis, sweep_grid);
        } else if (pattern_cmd->parsed()) {
            z3sim::cli::cmd_pattern(pattern_options, pattern);
        }
    } catch (const z3sim::Error& e) {
        std::cerr << "z3rosim: error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "z3rosim: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
