// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "z3sim/analysis.hpp"
#include "z3sim/scenario.hpp"

namespace z3sim {

/// Everything measured for one precoder under one user placement.
struct DistortionReport {
    PrecoderKind precoder = PrecoderKind::Mrt;
    std::vector<Eigen::Index> user_locations;  // K placement indices
    Eigen::MatrixXcd bussgang_gain;            // L x K
    Eigen::MatrixXd signal_var;                // L x K
    Eigen::MatrixXd distortion_var;            // L x K, clamped
    Eigen::MatrixXd distortion_db;             // L x K, -inf where clamped
    Eigen::VectorXd user_sndr;                 // K, linear (SNDR / SNIDR_k)
    Eigen::VectorXd user_rate_bits;            // K
    std::string scenario_echo;
    int clamp_count = 0;

    /// Distortion level for user k evaluated at its own location.
    double at_user_distortion_db(Eigen::Index k) const {
        return distortion_db(user_locations.at(static_cast<std::size_t>(k)), k);
    }
};

/// MRT and Z3RO evaluated on the same symbol ensemble.
struct PlacementReports {
    std::vector<Eigen::Index> user_locations;
    DistortionReport mrt;
    DistortionReport z3ro;
};

struct ScanResult {
    std::vector<PlacementReports> placements;
    std::string scenario_echo;
};

/// Places a single user at every location of the set. Placements are
/// independent tasks seeded from (master seed, placement index).
ScanResult single_user_scan(const ScenarioConfig& config, const ChannelSet& channels,
                            int threads = 1);

/// Every unordered pair of distinct locations, equal power split.
ScanResult two_user_scan(const ScenarioConfig& config, const ChannelSet& channels,
                         int threads = 1);

/// One placement (config.user_locations) evaluated under both precoders.
PlacementReports evaluate_placement(const ScenarioConfig& config, const ChannelSet& channels,
                                    const std::vector<Eigen::Index>& user_locations,
                                    std::uint64_t task_seed, const std::string& scenario_echo);

struct NoiseSweepRow {
    double sigma_v2 = 0.0;
    double axis_db = 0.0;          // p * M * ||h||^2 / sigma_v^2 for user 0, dB
    Eigen::VectorXd rate_mrt;      // K, bits/symbol
    Eigen::VectorXd rate_z3ro;     // K
};

/// Rates over a grid of noise variances at the configured fixed back-off.
/// The distortion estimate is computed once; sigma only enters denominators.
/// The grid must be positive and strictly increasing.
std::vector<NoiseSweepRow> noise_sweep(const ScenarioConfig& config, const ChannelSet& channels,
                                       const std::vector<double>& sigma_grid);

/// Companion sweep: rates over a grid of back-off values at the configured
/// noise variance. One Monte-Carlo run per grid point.
std::vector<NoiseSweepRow> backoff_sweep(const ScenarioConfig& config, const ChannelSet& channels,
                                         const std::vector<double>& backoff_db_grid,
                                         int threads = 1);

struct AngularPatternOptions {
    double element_spacing_wavelengths = 0.5;
    double gain = 1.0;
    double user_power = 1.0;
    PaModel pa = Polynomial3Pa{{1.0, 0.0}, {-1.0, 0.0}};
    Eigen::Index ensemble_size = 200000;
    std::uint64_t master_seed = 1;
    SaturatedSelection selection = SaturatedSelection::SmallestGains;
};

struct AngularPatternRow {
    double angle_rad = 0.0;
    double mrt_db = 0.0;
    double z3ro_db = 0.0;
};

/// Third-order distortion received at each grid angle for a LOS ULA user.
/// Z3RO shows a null at the user angle, MRT a peak.
std::vector<AngularPatternRow> angular_pattern(Eigen::Index antenna_count, double user_angle_rad,
                                               const std::vector<double>& angle_grid_rad,
                                               Eigen::Index saturated_count,
                                               const AngularPatternOptions& options = {});

/// Step-function points (value, cumulative fraction), fraction (i+1)/n at the
/// i-th sorted value.
std::vector<std::pair<double, double>> ecdf(std::vector<double> values);

/// Value at the smallest cumulative fraction >= q of a sorted sample.
double ecdf_percentile(const std::vector<double>& sorted_values, double q);

enum class GapMode { AtUser, AllLocations };

struct GapStatistics {
    double mean_db_gap = 0.0;              // mean of per-placement dB differences
    double mean_power_ratio_db_gap = 0.0;  // dB of mean-power ratio (alternative convention)
    double tail_db_gap_p95 = 0.0;          // 95th percentile ECDF gap
    double max_db_gap = 0.0;
    std::vector<double> per_location_gaps_db;  // MRT - Z3RO, may contain +-inf
    Eigen::Index finite_pairs = 0;
    Eigen::Index clamped_pairs = 0;            // pairs excluded from mean_db_gap
};

/// MRT-vs-Z3RO reduction statistics over a scan. AtUser pairs each user with
/// its own location; AllLocations pools every (placement, location, user) cell.
GapStatistics reduction_statistics(const ScanResult& scan, GapMode mode);

}  // namespace z3sim
