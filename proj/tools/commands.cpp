// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "z3sim/errors.hpp"
#include "z3sim/version.hpp"

namespace z3sim::cli {

namespace {

using nlohmann::json;

std::string fmt_fixed(double v, int decimals = 6) {
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

/// JSON has no inf; encode non-finite gap values as strings.
json json_number(double v) {
    if (std::isfinite(v)) {
        return v;
    }
    return std::isnan(v) ? json("nan") : json(v > 0 ? "inf" : "-inf");
}

void ensure_out_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw IoError("cannot create output directory: " + dir.string());
    }
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    return out;
}

void finish_output(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out.good()) {
        throw IoError("write failed: " + path.string());
    }
}

ScenarioConfig load_config_with_overrides(const CommonOptions& options) {
    ScenarioConfig config = load_scenario_config(options.config_path);
    if (options.seed) {
        config.master_seed = *options.seed;
    }
    if (options.ensemble_size) {
        if (*options.ensemble_size < 1) {
            throw ValidationError("--ensemble-size must be positive");
        }
        config.ensemble_size = *options.ensemble_size;
    }
    if (options.selection) {
        config.selection = *options.selection;
    }
    return config;
}

json gaps_to_json(const GapStatistics& stats) {
    json j;
    j["mean_db_gap"] = json_number(stats.mean_db_gap);
    j["mean_power_ratio_db_gap"] = json_number(stats.mean_power_ratio_db_gap);
    j["tail_db_gap_p95"] = json_number(stats.tail_db_gap_p95);
    j["max_db_gap"] = json_number(stats.max_db_gap);
    j["finite_pairs"] = stats.finite_pairs;
    j["clamped_pairs"] = stats.clamped_pairs;
    return j;
}

void write_summary(const std::filesystem::path& out_dir, const RunManifest& manifest,
                   const json& extra) {
    json j;
    j["tool"] = "z3rosim";
    j["version"] = manifest.version;
    j["command"] = manifest.command;
    j["duration_seconds"] = manifest.duration_seconds;
    j["config"] = manifest.config_echo;
    j["outputs"] = manifest.outputs;
    j["clamp_counts"] = manifest.clamp_counts;
    for (const auto& [key, value] : extra.items()) {
        j[key] = value;
    }
    const auto path = out_dir / "summary.json";
    auto out = open_output(path);
    out << j.dump(2) << '\n';
    finish_output(out, path);
}

void check_outputs_exist(const std::filesystem::path& out_dir, const RunManifest& manifest) {
    for (const std::string& name : manifest.outputs) {
        if (!std::filesystem::exists(out_dir / name)) {
            throw IoError("expected output missing after run: " + name);
        }
    }
}

void write_ecdf_csv(const std::filesystem::path& path, const std::vector<double>& mrt_values,
                    const std::vector<double>& z3ro_values) {
    auto out = open_output(path);
    out << "precoder,distortion_db,cum_fraction\n";
    for (const auto& [name, values] :
         {std::pair{"mrt", &mrt_values}, std::pair{"z3ro", &z3ro_values}}) {
        for (const auto& [value, fraction] : ecdf(*values)) {
            out << name << ',' << fmt_fixed(value) << ',' << fmt_fixed(fraction) << '\n';
        }
    }
    finish_output(out, path);
}

const PlacementReports& find_configured_placement(const ScanResult& scan,
                                                  const ScenarioConfig& config) {
    std::vector<Eigen::Index> wanted = config.user_locations;
    std::sort(wanted.begin(), wanted.end());
    for (const PlacementReports& placement : scan.placements) {
        if (placement.user_locations == wanted) {
            return placement;
        }
    }
    throw InconsistencyError("configured placement not present in the scan");
}

}  // namespace

std::vector<double> parse_grid_spec(const std::string& spec) {
    double start = 0.0, stop = 0.0;
    long long points = 0;
    const char* begin = spec.data();
    const char* end = spec.data() + spec.size();
    auto r1 = std::from_chars(begin, end, start);
    if (r1.ec != std::errc{} || r1.ptr == end || *r1.ptr != ':') {
        throw ParseError("grid spec must be 'start:stop:points', got '" + spec + "'");
    }
    auto r2 = std::from_chars(r1.ptr + 1, end, stop);
    if (r2.ec != std::errc{} || r2.ptr == end || *r2.ptr != ':') {
        throw ParseError("grid spec must be 'start:stop:points', got '" + spec + "'");
    }
    auto r3 = std::from_chars(r2.ptr + 1, end, points);
    if (r3.ec != std::errc{} || r3.ptr != end) {
        throw ParseError("grid spec must be 'start:stop:points', got '" + spec + "'");
    }
    if (points < 1) {
        throw ParseError("grid needs at least one point");
    }
    if (start > stop) {
        throw ParseError("grid start exceeds stop (reversed grid): '" + spec + "'");
    }
    if (points == 1) {
        if (start != stop) {
            throw ParseError("a single-point grid needs start == stop");
        }
        return {start};
    }
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (long long i = 0; i < points; ++i) {
        grid[static_cast<std::size_t>(i)] =
            start + (stop - start) * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    return grid;
}

RunManifest cmd_scan(const CommonOptions& options, int users) {
    const auto t0 = std::chrono::steady_clock::now();
    ScenarioConfig config = load_config_with_overrides(options);
    if (config.user_count() != users) {
        throw ValidationError("--users " + std::to_string(users) + " requires a " +
                              std::to_string(users) + "-entry user_locations list, config has " +
                              std::to_string(config.user_count()));
    }
    const ChannelSet channels = resolve_channel_set(config);
    validate(config, channels);
    ensure_out_dir(options.out_dir);

    const ScanResult scan = users == 1 ? single_user_scan(config, channels, options.threads)
                                       : two_user_scan(config, channels, options.threads);
    const GapStatistics at_user = reduction_statistics(scan, GapMode::AtUser);
    const GapStatistics all_locations = reduction_statistics(scan, GapMode::AllLocations);

    RunManifest manifest;
    manifest.command = "scan";
    manifest.version = kVersion;
    manifest.config_echo = scenario_to_key_values(config);

    // Pooled at-user and all-location distortion levels, both precoders.
    std::vector<double> at_mrt, at_z3ro, all_mrt, all_z3ro;
    int clamp_mrt = 0, clamp_z3ro = 0;
    for (const PlacementReports& placement : scan.placements) {
        clamp_mrt += placement.mrt.clamp_count;
        clamp_z3ro += placement.z3ro.clamp_count;
        const Eigen::Index user_count = placement.mrt.distortion_db.cols();
        for (Eigen::Index k = 0; k < user_count; ++k) {
            at_mrt.push_back(placement.mrt.at_user_distortion_db(k));
            at_z3ro.push_back(placement.z3ro.at_user_distortion_db(k));
            for (Eigen::Index l = 0; l < placement.mrt.distortion_db.rows(); ++l) {
                all_mrt.push_back(placement.mrt.distortion_db(l, k));
                all_z3ro.push_back(placement.z3ro.distortion_db(l, k));
            }
        }
    }
    write_ecdf_csv(options.out_dir / "at_user_ecdf.csv", at_mrt, at_z3ro);
    manifest.outputs.push_back("at_user_ecdf.csv");
    write_ecdf_csv(options.out_dir / "all_locations_ecdf.csv", all_mrt, all_z3ro);
    manifest.outputs.push_back("all_locations_ecdf.csv");

    const PlacementReports& highlighted = find_configured_placement(scan, config);
    for (const Eigen::Index user_index : config.user_locations) {
        const auto pos = std::find(highlighted.user_locations.begin(),
                                   highlighted.user_locations.end(), user_index);
        const Eigen::Index k = pos - highlighted.user_locations.begin();
        const std::string name = "heatmap_user" + std::to_string(user_index) + ".csv";
        const auto path = options.out_dir / name;
        auto out = open_output(path);
        out << "location_index,location_id,mrt_distortion_db,z3ro_distortion_db\n";
        for (Eigen::Index l = 0; l < channels.location_count(); ++l) {
            out << l << ',' << channels.location_ids[static_cast<std::size_t>(l)] << ','
                << fmt_fixed(highlighted.mrt.distortion_db(l, k)) << ','
                << fmt_fixed(highlighted.z3ro.distortion_db(l, k)) << '\n';
        }
        finish_output(out, path);
        manifest.outputs.push_back(name);
    }

    manifest.clamp_counts = {{"mrt", clamp_mrt}, {"z3ro", clamp_z3ro}};
    manifest.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    json extra;
    extra["users"] = users;
    extra["placements"] = scan.placements.size();
    extra["gaps"] = {{"at_user", gaps_to_json(at_user)},
                     {"all_locations", gaps_to_json(all_locations)}};
    write_summary(options.out_dir, manifest, extra);
    check_outputs_exist(options.out_dir, manifest);

    std::cout << "scan: " << scan.placements.size() << " placement(s), mean at-user reduction "
              << fmt_fixed(at_user.mean_db_gap, 2) << " dB, 95th-percentile tail gap "
              << fmt_fixed(at_user.tail_db_gap_p95, 2) << " dB\n";
    return manifest;
}

RunManifest cmd_sweep(const CommonOptions& options, SweepAxis axis, const std::string& grid_spec) {
    const auto t0 = std::chrono::steady_clock::now();
    ScenarioConfig config = load_config_with_overrides(options);
    const ChannelSet channels = resolve_channel_set(config);
    validate(config, channels);
    ensure_out_dir(options.out_dir);

    const std::vector<double> grid_db = parse_grid_spec(grid_spec);
    std::vector<NoiseSweepRow> rows;
    if (axis == SweepAxis::Noise) {
        // Axis is p*M*||h||^2/sigma_v^2 in dB for the first user; convert to a
        // sigma grid (descending in axis order) and evaluate once.
        const UserChannel user0 = select_user_channel(channels, config.user_locations.front());
        const double numerator = config.budget().per_user_power(0) *
                                 static_cast<double>(channels.antenna_count()) *
                                 user0.gains.squaredNorm();
        std::vector<double> sigma_grid;
        sigma_grid.reserve(grid_db.size());
        for (auto it = grid_db.rbegin(); it != grid_db.rend(); ++it) {
            sigma_grid.push_back(numerator / from_db(*it));
        }
        rows = noise_sweep(config, channels, sigma_grid);
        std::reverse(rows.begin(), rows.end());  // ascending axis order
    } else {
        rows = backoff_sweep(config, channels, grid_db, options.threads);
    }

    const Eigen::Index user_count = config.user_count();
    const auto path = options.out_dir / "sweep.csv";
    auto out = open_output(path);
    out << "axis_db";
    if (user_count == 1) {
        out << ",rate_mrt,rate_z3ro";
    } else {
        for (Eigen::Index k = 0; k < user_count; ++k) {
            out << ",rate_mrt_user" << k << ",rate_z3ro_user" << k;
        }
    }
    out << '\n';
    for (const NoiseSweepRow& row : rows) {
        out << fmt_fixed(row.axis_db);
        for (Eigen::Index k = 0; k < user_count; ++k) {
            out << ',' << fmt_fixed(row.rate_mrt(k)) << ',' << fmt_fixed(row.rate_z3ro(k));
        }
        out << '\n';
    }
    finish_output(out, path);

    RunManifest manifest;
    manifest.command = "sweep";
    manifest.version = kVersion;
    manifest.config_echo = scenario_to_key_values(config);
    manifest.outputs.push_back("sweep.csv");
    manifest.clamp_counts = {};
    manifest.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    json extra;
    extra["axis"] = axis == SweepAxis::Noise ? "noise" : "backoff";
    extra["grid"] = grid_spec;
    write_summary(options.out_dir, manifest, extra);
    check_outputs_exist(options.out_dir, manifest);

    std::cout << "sweep: " << rows.size() << " grid point(s) written to sweep.csv\n";
    return manifest;
}

RunManifest cmd_pattern(const CommonOptions& options, const PatternOptions& pattern) {
    const auto t0 = std::chrono::steady_clock::now();
    if (std::abs(pattern.user_angle_deg) > 90.0) {
        throw ValidationError("user angle must lie in [-90, 90] degrees");
    }
    const std::vector<double> grid_deg = parse_grid_spec(pattern.grid_spec);
    if (std::abs(grid_deg.front()) > 90.0 || std::abs(grid_deg.back()) > 90.0) {
        throw ValidationError("pattern grid must lie in [-90, 90] degrees");
    }

    AngularPatternOptions angular;
    std::map<std::string, std::string> config_echo;
    if (!options.config_path.empty()) {
        const ScenarioConfig config = load_config_with_overrides(options);
        angular.pa = config.pa;
        angular.ensemble_size = config.ensemble_size;
        angular.master_seed = config.master_seed;
        angular.selection = config.selection;
        angular.user_power = equal_power_budget(1, config.backoff_db,
                                                config.reference_saturation_power())
                                 .per_user_power(0);
        config_echo = scenario_to_key_values(config);
    } else {
        if (options.seed) {
            angular.master_seed = *options.seed;
        }
        if (options.ensemble_size) {
            angular.ensemble_size = *options.ensemble_size;
        }
        if (options.selection) {
            angular.selection = *options.selection;
        }
        config_echo["pa_model"] = "poly3";
        config_echo["pa_a1"] = "1";
        config_echo["pa_a3"] = "-1";
        config_echo["ensemble_size"] = std::to_string(angular.ensemble_size);
        config_echo["seed"] = std::to_string(angular.master_seed);
        config_echo["selection"] = to_string(angular.selection);
    }
    config_echo["pattern_m"] = std::to_string(pattern.antenna_count);
    config_echo["pattern_user_angle_deg"] = fmt_fixed(pattern.user_angle_deg);
    config_echo["pattern_m_s"] = std::to_string(pattern.saturated_count);
    config_echo["pattern_grid"] = pattern.grid_spec;

    std::vector<double> grid_rad;
    grid_rad.reserve(grid_deg.size());
    for (const double deg : grid_deg) {
        grid_rad.push_back(deg_to_rad(deg));
    }
    const auto rows = angular_pattern(pattern.antenna_count, deg_to_rad(pattern.user_angle_deg),
                                      grid_rad, pattern.saturated_count, angular);

    ensure_out_dir(options.out_dir);
    const auto path = options.out_dir / "pattern.csv";
    auto out = open_output(path);
    out << "angle_deg,mrt_distortion_db,z3ro_distortion_db\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out << fmt_fixed(grid_deg[i]) << ',' << fmt_fixed(rows[i].mrt_db) << ','
            << fmt_fixed(rows[i].z3ro_db) << '\n';
    }
    finish_output(out, path);

    RunManifest manifest;
    manifest.command = "pattern";
    manifest.version = kVersion;
    manifest.config_echo = std::move(config_echo);
    manifest.outputs.push_back("pattern.csv");
    manifest.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    write_summary(options.out_dir, manifest, json::object());
    check_outputs_exist(options.out_dir, manifest);

    std::cout << "pattern: " << rows.size() << " angle(s) written to pattern.csv\n";
    return manifest;
}

}  // namespace z3sim::cli
