// SPDX-License-Identifier: Apache-2.0
#include "z3sim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "z3sim/errors.hpp"
#include "z3sim/parallel.hpp"
#include "z3sim/rng.hpp"

namespace z3sim {

namespace {

double guarded_sndr(double signal_var, double distortion_var, double noise_var) {
    const double denom = distortion_var + noise_var;
    if (denom == 0.0) {
        // Clamped distortion estimate and zero configured noise: unbounded.
        return std::numeric_limits<double>::infinity();
    }
    return signal_var / denom;
}

double guarded_rate(double sndr_linear) {
    if (std::isinf(sndr_linear)) {
        return std::numeric_limits<double>::infinity();
    }
    return std::log2(1.0 + sndr_linear);
}

DistortionReport make_report(PrecoderKind kind, const std::vector<Eigen::Index>& user_locations,
                             const BussgangResult& bussgang, const std::string& echo) {
    DistortionReport report;
    report.precoder = kind;
    report.user_locations = user_locations;
    report.bussgang_gain = bussgang.gain;
    report.signal_var = bussgang.signal_var;
    report.distortion_var = bussgang.distortion_var;
    report.distortion_db = bussgang.distortion_var.unaryExpr([](double v) { return to_db(v); });
    report.scenario_echo = echo;
    report.clamp_count = bussgang.clamp_count;

    const Eigen::Index user_count = static_cast<Eigen::Index>(user_locations.size());
    report.user_sndr.resize(user_count);
    report.user_rate_bits.resize(user_count);
    for (Eigen::Index k = 0; k < user_count; ++k) {
        const Eigen::Index at = user_locations[static_cast<std::size_t>(k)];
        const double s = guarded_sndr(bussgang.signal_var(at, k), bussgang.distortion_var(at, k),
                                      bussgang.noise_var);
        report.user_sndr(k) = s;
        report.user_rate_bits(k) = guarded_rate(s);
    }
    return report;
}

void require_users(const ScenarioConfig& config, Eigen::Index expected, const char* what) {
    if (config.user_count() != expected) {
        throw ValidationError(std::string(what) + " needs exactly " + std::to_string(expected) +
                              " configured user location(s), got " +
                              std::to_string(config.user_count()));
    }
}

}  // namespace

PlacementReports evaluate_placement(const ScenarioConfig& config, const ChannelSet& channels,
                                    const std::vector<Eigen::Index>& user_locations,
                                    std::uint64_t task_seed, const std::string& scenario_echo) {
    if (user_locations.size() != static_cast<std::size_t>(config.user_count())) {
        throw ValidationError("placement size does not match the configured user count");
    }
    std::vector<UserChannel> users;
    users.reserve(user_locations.size());
    for (const Eigen::Index idx : user_locations) {
        users.push_back(select_user_channel(channels, idx));
    }
    const PowerBudget budget = config.budget();
    const PrecoderWeights mrt = mrt_weights(users);
    const PrecoderWeights z3ro =
        z3ro_weights(users, config.resolved_saturated_count(), config.selection);

    // Both precoders see the same symbol ensemble: identical seed, identical draws.
    const BussgangResult mrt_result =
        bussgang_analysis(channels, mrt, config.pa, budget.per_user_power, config.ensemble_size,
                          task_seed, config.noise_var);
    const BussgangResult z3ro_result =
        bussgang_analysis(channels, z3ro, config.pa, budget.per_user_power, config.ensemble_size,
                          task_seed, config.noise_var);

    PlacementReports out;
    out.user_locations = user_locations;
    out.mrt = make_report(PrecoderKind::Mrt, user_locations, mrt_result, scenario_echo);
    out.z3ro = make_report(PrecoderKind::Z3ro, user_locations, z3ro_result, scenario_echo);
    return out;
}

ScanResult single_user_scan(const ScenarioConfig& config, const ChannelSet& channels,
                            int threads) {
    validate(config, channels);
    require_users(config, 1, "single-user scan");

    const Eigen::Index location_count = channels.location_count();
    ScanResult result;
    result.scenario_echo = config.echo();
    result.placements.resize(static_cast<std::size_t>(location_count));
    parallel_for(static_cast<std::size_t>(location_count), threads, [&](std::size_t i) {
        const auto placement = static_cast<Eigen::Index>(i);
        result.placements[i] =
            evaluate_placement(config, channels, {placement},
                               derive_stream_seed(config.master_seed, i), result.scenario_echo);
    });
    return result;
}

ScanResult two_user_scan(const ScenarioConfig& config, const ChannelSet& channels, int threads) {
    validate(config, channels);
    require_users(config, 2, "two-user scan");
    const Eigen::Index location_count = channels.location_count();
    if (location_count < 2) {
        throw ValidationError("two-user scan needs at least two locations");
    }

    std::vector<std::vector<Eigen::Index>> pairs;
    pairs.reserve(static_cast<std::size_t>(location_count * (location_count - 1) / 2));
    for (Eigen::Index i = 0; i < location_count; ++i) {
        for (Eigen::Index j = i + 1; j < location_count; ++j) {
            pairs.push_back({i, j});
        }
    }

    ScanResult result;
    result.scenario_echo = config.echo();
    result.placements.resize(pairs.size());
    parallel_for(pairs.size(), threads, [&](std::size_t i) {
        result.placements[i] =
            evaluate_placement(config, channels, pairs[i],
                               derive_stream_seed(config.master_seed, i), result.scenario_echo);
    });
    return result;
}

std::vector<NoiseSweepRow> noise_sweep(const ScenarioConfig& config, const ChannelSet& channels,
                                       const std::vector<double>& sigma_grid) {
    validate(config, channels);
    if (sigma_grid.empty()) {
        throw ValidationError("noise sweep needs a non-empty grid");
    }
    for (std::size_t i = 0; i < sigma_grid.size(); ++i) {
        if (!(sigma_grid[i] > 0.0) || !std::isfinite(sigma_grid[i])) {
            throw ValidationError("noise grid entries must be positive and finite");
        }
        if (i > 0 && sigma_grid[i] <= sigma_grid[i - 1]) {
            throw ValidationError("noise grid must be strictly increasing");
        }
    }

    const std::string echo = config.echo();
    const PlacementReports placement = evaluate_placement(
        config, channels, config.user_locations, derive_stream_seed(config.master_seed, 0), echo);

    const Eigen::Index user_count = config.user_count();
    const UserChannel user0 = select_user_channel(channels, config.user_locations.front());
    const double p0 = config.budget().per_user_power(0);
    const double axis_numerator =
        p0 * static_cast<double>(channels.antenna_count()) * user0.gains.squaredNorm();

    std::vector<NoiseSweepRow> rows;
    rows.reserve(sigma_grid.size());
    for (const double sigma_v2 : sigma_grid) {
        NoiseSweepRow row;
        row.sigma_v2 = sigma_v2;
        row.axis_db = to_db(axis_numerator / sigma_v2);
        row.rate_mrt.resize(user_count);
        row.rate_z3ro.resize(user_count);
        for (Eigen::Index k = 0; k < user_count; ++k) {
            const Eigen::Index at = config.user_locations[static_cast<std::size_t>(k)];
            row.rate_mrt(k) = guarded_rate(guarded_sndr(placement.mrt.signal_var(at, k),
                                                        placement.mrt.distortion_var(at, k),
                                                        sigma_v2));
            row.rate_z3ro(k) = guarded_rate(guarded_sndr(placement.z3ro.signal_var(at, k),
                                                         placement.z3ro.distortion_var(at, k),
                                                         sigma_v2));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<NoiseSweepRow> backoff_sweep(const ScenarioConfig& config, const ChannelSet& channels,
                                         const std::vector<double>& backoff_db_grid, int threads) {
    validate(config, channels);
    if (backoff_db_grid.empty()) {
        throw ValidationError("back-off sweep needs a non-empty grid");
    }
    for (std::size_t i = 0; i < backoff_db_grid.size(); ++i) {
        if (!std::isfinite(backoff_db_grid[i])) {
            throw ValidationError("back-off grid entries must be finite");
        }
        if (i > 0 && backoff_db_grid[i] <= backoff_db_grid[i - 1]) {
            throw ValidationError("back-off grid must be strictly increasing");
        }
    }

    const std::string echo = config.echo();
    const Eigen::Index user_count = config.user_count();
    std::vector<NoiseSweepRow> rows(backoff_db_grid.size());
    parallel_for(backoff_db_grid.size(), threads, [&](std::size_t i) {
        ScenarioConfig point = config;
        point.backoff_db = backoff_db_grid[i];
        const PlacementReports placement =
            evaluate_placement(point, channels, point.user_locations,
                               derive_stream_seed(config.master_seed, i), echo);
        NoiseSweepRow row;
        row.sigma_v2 = config.noise_var;
        row.axis_db = backoff_db_grid[i];
        row.rate_mrt.resize(user_count);
        row.rate_z3ro.resize(user_count);
        for (Eigen::Index k = 0; k < user_count; ++k) {
            row.rate_mrt(k) = placement.mrt.user_rate_bits(k);
            row.rate_z3ro(k) = placement.z3ro.user_rate_bits(k);
        }
        rows[i] = std::move(row);
    });
    return rows;
}

std::vector<AngularPatternRow> angular_pattern(Eigen::Index antenna_count, double user_angle_rad,
                                               const std::vector<double>& angle_grid_rad,
                                               Eigen::Index saturated_count,
                                               const AngularPatternOptions& options) {
    if (angle_grid_rad.empty()) {
        return {};
    }
    const UserChannel user = synth_los_ula(antenna_count, user_angle_rad,
                                           options.element_spacing_wavelengths, options.gain);
    Eigen::MatrixXcd observer_gains(antenna_count, static_cast<Eigen::Index>(angle_grid_rad.size()));
    std::vector<std::string> ids;
    ids.reserve(angle_grid_rad.size());
    for (std::size_t i = 0; i < angle_grid_rad.size(); ++i) {
        const UserChannel steering = synth_los_ula(antenna_count, angle_grid_rad[i],
                                                   options.element_spacing_wavelengths, options.gain);
        observer_gains.col(static_cast<Eigen::Index>(i)) = steering.gains;
        ids.push_back("angle" + std::to_string(i));
    }
    const ChannelSet observers = make_channel_set(std::move(observer_gains), std::move(ids));

    const std::vector<UserChannel> users{user};
    const PrecoderWeights mrt = mrt_weights(users);
    const PrecoderWeights z3ro = z3ro_weights(users, saturated_count, options.selection);
    const Eigen::VectorXd powers = Eigen::VectorXd::Constant(1, options.user_power);
    const std::uint64_t seed = derive_stream_seed(options.master_seed, 0);

    const BussgangResult mrt_result = bussgang_analysis(observers, mrt, options.pa, powers,
                                                        options.ensemble_size, seed, 0.0);
    const BussgangResult z3ro_result = bussgang_analysis(observers, z3ro, options.pa, powers,
                                                         options.ensemble_size, seed, 0.0);

    std::vector<AngularPatternRow> rows;
    rows.reserve(angle_grid_rad.size());
    for (std::size_t i = 0; i < angle_grid_rad.size(); ++i) {
        const auto l = static_cast<Eigen::Index>(i);
        rows.push_back({angle_grid_rad[i], to_db(mrt_result.distortion_var(l, 0)),
                        to_db(z3ro_result.distortion_var(l, 0))});
    }
    return rows;
}

std::vector<std::pair<double, double>> ecdf(std::vector<double> values) {
    if (values.empty()) {
        throw ValidationError("ECDF needs a non-empty sample");
    }
    std::sort(values.begin(), values.end());
    std::vector<std::pair<double, double>> points;
    points.reserve(values.size());
    const double n = static_cast<double>(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        points.emplace_back(values[i], static_cast<double>(i + 1) / n);
    }
    return points;
}

double ecdf_percentile(const std::vector<double>& sorted_values, double q) {
    if (sorted_values.empty()) {
        throw ValidationError("percentile needs a non-empty sample");
    }
    if (!(q > 0.0) || q > 1.0) {
        throw ValidationError("percentile level must lie in (0, 1]");
    }
    const auto n = static_cast<double>(sorted_values.size());
    auto index = static_cast<std::ptrdiff_t>(std::ceil(q * n)) - 1;
    index = std::clamp<std::ptrdiff_t>(index, 0, static_cast<std::ptrdiff_t>(sorted_values.size()) - 1);
    return sorted_values[static_cast<std::size_t>(index)];
}

GapStatistics reduction_statistics(const ScanResult& scan, GapMode mode) {
    if (scan.placements.empty()) {
        throw ValidationError("reduction statistics need at least one placement");
    }

    std::vector<double> mrt_db, z3ro_db;
    std::vector<double> mrt_var, z3ro_var;
    for (const PlacementReports& placement : scan.placements) {
        if (placement.mrt.scenario_echo != scan.scenario_echo ||
            placement.z3ro.scenario_echo != scan.scenario_echo) {
            throw ValidationError("reports come from different scenarios (echo mismatch)");
        }
        if (placement.mrt.distortion_var.rows() != placement.z3ro.distortion_var.rows() ||
            placement.mrt.distortion_var.cols() != placement.z3ro.distortion_var.cols()) {
            throw ValidationError("paired reports disagree on dimensions");
        }
        const Eigen::Index user_count = placement.mrt.distortion_var.cols();
        if (mode == GapMode::AtUser) {
            for (Eigen::Index k = 0; k < user_count; ++k) {
                const Eigen::Index at = placement.user_locations[static_cast<std::size_t>(k)];
                mrt_var.push_back(placement.mrt.distortion_var(at, k));
                z3ro_var.push_back(placement.z3ro.distortion_var(at, k));
                mrt_db.push_back(placement.mrt.distortion_db(at, k));
                z3ro_db.push_back(placement.z3ro.distortion_db(at, k));
            }
        } else {
            for (Eigen::Index k = 0; k < user_count; ++k) {
                for (Eigen::Index l = 0; l < placement.mrt.distortion_var.rows(); ++l) {
                    mrt_var.push_back(placement.mrt.distortion_var(l, k));
                    z3ro_var.push_back(placement.z3ro.distortion_var(l, k));
                    mrt_db.push_back(placement.mrt.distortion_db(l, k));
                    z3ro_db.push_back(placement.z3ro.distortion_db(l, k));
                }
            }
        }
    }

    GapStatistics stats;
    stats.per_location_gaps_db.reserve(mrt_db.size());
    double gap_sum = 0.0;
    for (std::size_t i = 0; i < mrt_db.size(); ++i) {
        const double gap = mrt_db[i] - z3ro_db[i];
        stats.per_location_gaps_db.push_back(gap);
        if (std::isfinite(gap)) {
            gap_sum += gap;
            ++stats.finite_pairs;
        } else {
            ++stats.clamped_pairs;
        }
    }
    stats.mean_db_gap = stats.finite_pairs > 0 ? gap_sum / static_cast<double>(stats.finite_pairs)
                                               : 0.0;

    const double mrt_mean_var =
        std::accumulate(mrt_var.begin(), mrt_var.end(), 0.0) / static_cast<double>(mrt_var.size());
    const double z3ro_mean_var =
        std::accumulate(z3ro_var.begin(), z3ro_var.end(), 0.0) / static_cast<double>(z3ro_var.size());
    stats.mean_power_ratio_db_gap =
        z3ro_mean_var > 0.0 ? to_db(mrt_mean_var / z3ro_mean_var)
                            : std::numeric_limits<double>::infinity();

    std::sort(mrt_db.begin(), mrt_db.end());
    std::sort(z3ro_db.begin(), z3ro_db.end());
    stats.tail_db_gap_p95 = ecdf_percentile(mrt_db, 0.95) - ecdf_percentile(z3ro_db, 0.95);
    stats.max_db_gap = mrt_db.back() - z3ro_db.back();
    return stats;
}

}  // namespace z3sim
