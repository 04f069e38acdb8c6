// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "z3sim/errors.hpp"
#include "z3sim/experiments.hpp"

using namespace z3sim;

namespace {

ScenarioConfig synthetic_config(Eigen::Index antennas, Eigen::Index locations,
                                std::uint64_t channel_seed) {
    ScenarioConfig config;
    config.channel_synthetic = SyntheticChannelSpec{antennas, locations, channel_seed};
    config.user_locations = {0};
    config.saturated_count = 2;
    config.pa = RappPa{1.0, 2.0};
    config.backoff_db = -3.1;
    config.noise_var = 0.0;
    config.ensemble_size = 20000;
    config.master_seed = 11;
    return config;
}

bool reports_equal(const DistortionReport& a, const DistortionReport& b) {
    return a.distortion_var == b.distortion_var && a.bussgang_gain == b.bussgang_gain &&
           a.signal_var == b.signal_var && a.user_sndr == b.user_sndr &&
           a.user_rate_bits == b.user_rate_bits && a.clamp_count == b.clamp_count;
}

}  // namespace

TEST_CASE("ecdf basics") {
    const auto points = ecdf({3.0, 1.0, 2.0});
    REQUIRE(points.size() == 3);
    CHECK(points[0].first == 1.0);
    CHECK(points[0].second == doctest::Approx(1.0 / 3.0));
    CHECK(points[1].first == 2.0);
    CHECK(points[1].second == doctest::Approx(2.0 / 3.0));
    CHECK(points[2].first == 3.0);
    CHECK(points[2].second == doctest::Approx(1.0));

    const auto dupes = ecdf({1.0, 1.0});
    CHECK(dupes[0] == std::pair<double, double>{1.0, 0.5});
    CHECK(dupes[1] == std::pair<double, double>{1.0, 1.0});

    const auto random = ecdf({0.4, -2.0, 7.0, 0.4, 3.0});
    for (std::size_t i = 1; i < random.size(); ++i) {
        CHECK(random[i].second > random[i - 1].second);
        CHECK(random[i].first >= random[i - 1].first);
    }
    CHECK(random.back().second == doctest::Approx(1.0));

    CHECK_THROWS_AS(ecdf({}), ValidationError);
}

TEST_CASE("ecdf percentile picks the documented index") {
    const std::vector<double> sorted{1.0, 2.0, 3.0, 4.0};
    CHECK(ecdf_percentile(sorted, 0.95) == 4.0);
    CHECK(ecdf_percentile(sorted, 0.5) == 2.0);
    CHECK(ecdf_percentile(sorted, 1.0) == 4.0);
    CHECK_THROWS_AS(ecdf_percentile(sorted, 0.0), ValidationError);
}

TEST_CASE("reduction statistics on synthetic reports") {
    // Hand-built pair of placements with known values.
    auto make = [](double at_user_db, Eigen::Index at) {
        DistortionReport report;
        report.user_locations = {at};
        report.distortion_db = Eigen::MatrixXd::Constant(3, 1, at_user_db + 1.0);
        report.distortion_db(at, 0) = at_user_db;
        report.distortion_var = report.distortion_db.unaryExpr([](double v) {
            return from_db(v);
        });
        report.signal_var = Eigen::MatrixXd::Ones(3, 1);
        report.bussgang_gain = Eigen::MatrixXcd::Ones(3, 1);
        report.user_sndr = Eigen::VectorXd::Ones(1);
        report.user_rate_bits = Eigen::VectorXd::Ones(1);
        report.scenario_echo = "echo";
        return report;
    };
    ScanResult scan;
    scan.scenario_echo = "echo";
    scan.placements.push_back({{0}, make(-20.0, 0), make(-23.0, 0)});
    scan.placements.push_back({{1}, make(-10.0, 1), make(-13.0, 1)});

    SUBCASE("identical reports give zero gaps") {
        ScanResult same;
        same.scenario_echo = "echo";
        same.placements.push_back({{0}, make(-20.0, 0), make(-20.0, 0)});
        const GapStatistics stats = reduction_statistics(same, GapMode::AtUser);
        CHECK(stats.mean_db_gap == doctest::Approx(0.0));
        CHECK(stats.tail_db_gap_p95 == doctest::Approx(0.0));
        CHECK(stats.max_db_gap == doctest::Approx(0.0));
    }
    SUBCASE("a uniform 3 dB shift is recovered") {
        const GapStatistics at_user = reduction_statistics(scan, GapMode::AtUser);
        CHECK(at_user.mean_db_gap == doctest::Approx(3.0).epsilon(1e-9));
        CHECK(at_user.tail_db_gap_p95 == doctest::Approx(3.0).epsilon(1e-9));
        CHECK(at_user.finite_pairs == 2);
        CHECK(at_user.clamped_pairs == 0);
        const GapStatistics all = reduction_statistics(scan, GapMode::AllLocations);
        CHECK(all.mean_db_gap == doctest::Approx(3.0).epsilon(1e-9));
        CHECK(all.finite_pairs == 6);
    }
    SUBCASE("echo mismatch is rejected") {
        scan.placements[1].z3ro.scenario_echo = "other";
        CHECK_THROWS_AS(reduction_statistics(scan, GapMode::AtUser), ValidationError);
    }
}

TEST_CASE("single-user scan: null property, dominance and trade-off") {
    // Strongly driven cubic PA so the third-order level sits far above the
    // Monte-Carlo floor of the exactly-linear Z3RO at-user signal.
    ScenarioConfig config = synthetic_config(32, 8, 1001);
    config.pa = Polynomial3Pa{{1.0, 0.0}, {-1.0, 0.0}};
    config.backoff_db = 0.0;
    config.ensemble_size = 1000000;
    config.master_seed = 77;

    const ChannelSet channels = resolve_channel_set(config);
    const ScanResult scan = single_user_scan(config, channels, 8);
    REQUIRE(scan.placements.size() == 8);

    std::vector<double> at_mrt, at_z3ro, all_mrt, all_z3ro;
    for (const PlacementReports& placement : scan.placements) {
        const double mrt_db = placement.mrt.at_user_distortion_db(0);
        const double z3ro_db = placement.z3ro.at_user_distortion_db(0);
        CHECK(z3ro_db <= mrt_db - 30.0);  // includes -inf when clamped
        at_mrt.push_back(mrt_db);
        at_z3ro.push_back(z3ro_db);
        for (Eigen::Index l = 0; l < channels.location_count(); ++l) {
            all_mrt.push_back(placement.mrt.distortion_db(l, 0));
            all_z3ro.push_back(placement.z3ro.distortion_db(l, 0));
        }
    }

    // At-user ECDF dominance: the Z3RO curve lies left of the MRT curve.
    std::sort(at_mrt.begin(), at_mrt.end());
    std::sort(at_z3ro.begin(), at_z3ro.end());
    for (std::size_t i = 0; i < at_mrt.size(); ++i) {
        CHECK(at_z3ro[i] <= at_mrt[i] + 0.5);
    }

    // No free lunch: the redistributed distortion keeps the all-location
    // median at or above the MRT median (0.5 dB slack).
    std::sort(all_mrt.begin(), all_mrt.end());
    std::sort(all_z3ro.begin(), all_z3ro.end());
    CHECK(ecdf_percentile(all_z3ro, 0.5) >= ecdf_percentile(all_mrt, 0.5) - 0.5);

    const GapStatistics stats = reduction_statistics(scan, GapMode::AtUser);
    CHECK(stats.mean_db_gap >= 30.0);
}

TEST_CASE("scans are bit-identical for any schedule") {
    ScenarioConfig config = synthetic_config(16, 6, 2002);
    const ChannelSet channels = resolve_channel_set(config);
    const ScanResult serial = single_user_scan(config, channels, 1);
    const ScanResult parallel = single_user_scan(config, channels, 8);
    REQUIRE(serial.placements.size() == parallel.placements.size());
    for (std::size_t i = 0; i < serial.placements.size(); ++i) {
        CHECK(reports_equal(serial.placements[i].mrt, parallel.placements[i].mrt));
        CHECK(reports_equal(serial.placements[i].z3ro, parallel.placements[i].z3ro));
    }

    ScenarioConfig pair_config = config;
    pair_config.user_locations = {0, 1};
    pair_config.saturated_count = 4;
    const ScanResult pair_serial = two_user_scan(pair_config, channels, 1);
    const ScanResult pair_parallel = two_user_scan(pair_config, channels, 8);
    REQUIRE(pair_serial.placements.size() == 15);  // C(6,2)
    for (std::size_t i = 0; i < pair_serial.placements.size(); ++i) {
        CHECK(reports_equal(pair_serial.placements[i].mrt, pair_parallel.placements[i].mrt));
        CHECK(reports_equal(pair_serial.placements[i].z3ro, pair_parallel.placements[i].z3ro));
    }
}

TEST_CASE("two-user scan wiring") {
    ScenarioConfig config = synthetic_config(16, 5, 3003);
    config.user_locations = {0, 1};
    config.saturated_count = 4;
    config.noise_var = 1e-3;
    const ChannelSet channels = resolve_channel_set(config);
    const ScanResult scan = two_user_scan(config, channels, 4);
    REQUIRE(scan.placements.size() == 10);
    for (const PlacementReports& placement : scan.placements) {
        CHECK(placement.user_locations[0] < placement.user_locations[1]);
        for (const DistortionReport* report : {&placement.mrt, &placement.z3ro}) {
            REQUIRE(report->user_sndr.size() == 2);
            for (Eigen::Index k = 0; k < 2; ++k) {
                const Eigen::Index at = placement.user_locations[static_cast<std::size_t>(k)];
                const double expected =
                    report->signal_var(at, k) /
                    (report->distortion_var(at, k) + config.noise_var);
                CHECK(report->user_sndr(k) == doctest::Approx(expected).epsilon(1e-12));
                CHECK(report->user_rate_bits(k) ==
                      doctest::Approx(std::log2(1.0 + expected)).epsilon(1e-12));
            }
        }
    }

    ScenarioConfig duplicate = config;
    duplicate.user_locations = {2, 2};
    CHECK_THROWS_AS(two_user_scan(duplicate, channels, 1), ValidationError);

    ScenarioConfig one_user = config;
    one_user.user_locations = {2};
    CHECK_THROWS_AS(two_user_scan(one_user, channels, 1), ValidationError);
}

TEST_CASE("noise sweep: crossover, monotonicity and vanishing rates") {
    ScenarioConfig config = synthetic_config(32, 1, 4004);
    config.ensemble_size = 200000;
    const ChannelSet channels = resolve_channel_set(config);

    const UserChannel user = select_user_channel(channels, 0);
    const double numerator =
        config.budget().per_user_power(0) * 32.0 * user.gains.squaredNorm();
    std::vector<double> sigma_grid;
    for (int axis_db = 40; axis_db >= 0; axis_db -= 2) {
        sigma_grid.push_back(numerator / from_db(axis_db));
    }

    const auto rows = noise_sweep(config, channels, sigma_grid);
    REQUIRE(rows.size() == sigma_grid.size());

    // Monotone non-increasing in sigma for both precoders.
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].rate_mrt(0) <= rows[i - 1].rate_mrt(0));
        CHECK(rows[i].rate_z3ro(0) <= rows[i - 1].rate_z3ro(0));
    }

    // Noise-limited end (axis 0 dB) favors MRT; distortion-limited end Z3RO.
    CHECK(rows.back().axis_db == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(rows.back().rate_mrt(0) >= rows.back().rate_z3ro(0));
    CHECK(rows.front().axis_db == doctest::Approx(40.0).epsilon(1e-9));
    CHECK(rows.front().rate_z3ro(0) > rows.front().rate_mrt(0));

    // Exactly one sign change along the grid.
    int changes = 0;
    bool previous = rows.front().rate_z3ro(0) > rows.front().rate_mrt(0);
    for (const auto& row : rows) {
        const bool current = row.rate_z3ro(0) > row.rate_mrt(0);
        if (current != previous) {
            ++changes;
            previous = current;
        }
    }
    CHECK(changes == 1);

    // Very large noise drives both rates to zero.
    const auto tail = noise_sweep(config, channels, {numerator * 1e6});
    CHECK(tail[0].rate_mrt(0) < 1e-3);
    CHECK(tail[0].rate_z3ro(0) < 1e-3);

    CHECK_THROWS_AS(noise_sweep(config, channels, {}), ValidationError);
    CHECK_THROWS_AS(noise_sweep(config, channels, {2.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(noise_sweep(config, channels, {-1.0, 1.0}), ValidationError);
}

TEST_CASE("backoff sweep evaluates each grid point") {
    ScenarioConfig config = synthetic_config(16, 1, 5005);
    config.noise_var = 1e-2;
    config.ensemble_size = 20000;
    const ChannelSet channels = resolve_channel_set(config);
    const auto rows = backoff_sweep(config, channels, {-9.0, -6.0, -3.0}, 3);
    REQUIRE(rows.size() == 3);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].axis_db == doctest::Approx(-9.0 + 3.0 * static_cast<double>(i)));
        CHECK(rows[i].rate_mrt(0) > 0.0);
        CHECK(rows[i].rate_z3ro(0) > 0.0);
    }
    CHECK_THROWS_AS(backoff_sweep(config, channels, {-3.0, -6.0}, 1), ValidationError);
}

TEST_CASE("angular pattern: null at the user, symmetric mrt, empty grid") {
    AngularPatternOptions options;
    options.ensemble_size = 1000000;
    options.master_seed = 5;

    std::vector<double> grid;
    for (int deg = -60; deg <= 60; deg += 10) {
        grid.push_back(deg_to_rad(deg));
    }
    const auto rows = angular_pattern(32, 0.0, grid, 2, options);
    REQUIRE(rows.size() == grid.size());

    const std::size_t center = grid.size() / 2;  // 0 degrees
    CHECK(rows[center].angle_rad == doctest::Approx(0.0));
    CHECK(rows[center].z3ro_db <= rows[center].mrt_db - 40.0);

    for (std::size_t i = 0; i < grid.size(); ++i) {
        const std::size_t mirrored = grid.size() - 1 - i;
        CHECK(std::abs(rows[i].mrt_db - rows[mirrored].mrt_db) < 0.1);
    }

    CHECK(angular_pattern(32, 0.0, {}, 2).empty());
}
