// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "z3sim/channel.hpp"
#include "z3sim/pa.hpp"
#include "z3sim/precoding.hpp"

namespace z3sim {

/// Synthetic channel recipe, textual form "rayleigh:m=32,l=8,seed=7".
struct SyntheticChannelSpec {
    Eigen::Index antenna_count = 0;
    Eigen::Index location_count = 0;
    std::uint64_t seed = 0;
};

/// One experiment's knobs. Thread count is deliberately not part of the
/// scenario: results are identical for any schedule.
struct ScenarioConfig {
    std::optional<std::string> channel_file;
    std::optional<ChannelFileFormat> channel_format;  // default: by extension
    std::optional<SyntheticChannelSpec> channel_synthetic;
    std::vector<Eigen::Index> user_locations;
    Eigen::Index saturated_count = 0;  // M_s; 0 means "2 per user"
    SaturatedSelection selection = SaturatedSelection::SmallestGains;
    PaModel pa = RappPa{};
    double backoff_db = -3.1;       // 10*log10(p_in/p_sat)
    double noise_var = 0.0;         // sigma_v^2, watts
    Eigen::Index ensemble_size = 200000;
    std::uint64_t master_seed = 1;

    Eigen::Index user_count() const { return static_cast<Eigen::Index>(user_locations.size()); }
    Eigen::Index resolved_saturated_count() const;
    /// Rapp p_sat when the PA has one, otherwise 1 W reference.
    double reference_saturation_power() const;
    /// Equal-split budget at backoff_db for user_count() users.
    PowerBudget budget() const;
    /// Canonical "key=value;..." string; reports from one scan share it.
    std::string echo() const;
};

/// Flat key=value codec. Unknown keys, duplicates and keys that do not apply
/// to the selected PA model or channel source are hard errors.
ScenarioConfig scenario_from_key_values(const std::map<std::string, std::string>& kv);
std::map<std::string, std::string> scenario_to_key_values(const ScenarioConfig& config);

/// "key = value" lines, '#' comments. Errors carry 1-based line numbers.
ScenarioConfig load_scenario_config(const std::filesystem::path& path);

/// Checks user indices (distinct, in range), M_s bounds, PA and budget
/// parameters against a channel set about to be scanned.
void validate(const ScenarioConfig& config, const ChannelSet& channels);

/// Loads channel_file (resolving a relative path against $Z3RO_SIM_DATA when
/// it does not exist as given) or synthesizes the configured set.
ChannelSet resolve_channel_set(const ScenarioConfig& config);

std::string format_synthetic_spec(const SyntheticChannelSpec& spec);
SyntheticChannelSpec parse_synthetic_spec(const std::string& text);

}  // namespace z3sim
