// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "z3sim/math_util.hpp"

namespace z3sim {

enum class ChannelFileFormat { Csv, Json };

/// Complex channel gains for M antennas x L observer locations, plus campaign
/// metadata (carrier frequency, array type, ...). Immutable after construction
/// and safe to share across concurrent evaluations.
struct ChannelSet {
    Eigen::MatrixXcd gains;                       // M x L
    std::vector<std::string> location_ids;        // length L, unique
    std::map<std::string, std::string> metadata;

    Eigen::Index antenna_count() const { return gains.rows(); }
    Eigen::Index location_count() const { return gains.cols(); }
};

/// Channel gains from every antenna to a single user.
struct UserChannel {
    Eigen::VectorXcd gains;  // length M
    std::optional<std::string> source_location;
};

/// Validates dimensions, entry finiteness and location-id uniqueness.
/// Empty `location_ids` defaults to "0".."L-1".
ChannelSet make_channel_set(Eigen::MatrixXcd gains,
                            std::vector<std::string> location_ids = {},
                            std::map<std::string, std::string> metadata = {});

ChannelFileFormat channel_format_from_extension(const std::filesystem::path& path);

ChannelSet load_channel_set(const std::filesystem::path& path, ChannelFileFormat format);
ChannelSet load_channel_set(const std::filesystem::path& path);  // format from extension

/// Serialization keeps full double precision; a load of the written file
/// reproduces the gains bit-for-bit.
void write_channel_set(const ChannelSet& set, const std::filesystem::path& path,
                       ChannelFileFormat format);

/// Column `location_index` of the set as a user channel.
UserChannel select_user_channel(const ChannelSet& set, Eigen::Index location_index);

/// ULA steering vector h_m = gain * exp(j*2*pi*spacing*m*sin(angle)).
UserChannel synth_los_ula(Eigen::Index antenna_count, double angle_rad,
                          double element_spacing_wavelengths, double gain);

/// i.i.d. CN(0,1) entries, reproducible under the seed.
ChannelSet synth_rayleigh(Eigen::Index antenna_count, Eigen::Index location_count,
                          std::uint64_t seed);

}  // namespace z3sim
