// SPDX-License-Identifier: Apache-2.0
#include "z3sim/channel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string_view>
#include <unordered_set>

#include "z3sim/errors.hpp"
#include "z3sim/rng.hpp"

namespace z3sim {

namespace {

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) {
        throw IoError("failed to format floating-point value");
    }
    return std::string(buf, ptr);
}

double parse_double(std::string_view field, std::size_t line_no) {
    // Trim surrounding whitespace; from_chars wants a bare number.
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) {
        field.remove_prefix(1);
    }
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
        field.remove_suffix(1);
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw ParseError("line " + std::to_string(line_no) + ": cannot parse numeric field '" +
                         std::string(field) + "'");
    }
    return value;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

ChannelSet load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open channel file: " + path.string());
    }

    std::string line;
    std::size_t line_no = 0;
    Eigen::Index antenna_count = -1;
    Eigen::Index location_count = -1;
    bool header_seen = false;
    Eigen::MatrixXcd gains;
    Eigen::Index row = 0;

    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view(line);
        if (!view.empty() && view.back() == '\r') {
            view.remove_suffix(1);
        }
        if (view.find_first_not_of(" \t") == std::string_view::npos) {
            continue;  // blank
        }
        if (view.front() == '#') {
            if (!header_seen) {
                int m = 0, l = 0;
                if (std::sscanf(line.c_str(), "# M=%d L=%d", &m, &l) != 2 || m < 1 || l < 1) {
                    throw ParseError("line " + std::to_string(line_no) +
                                     ": expected header '# M=<int> L=<int>'");
                }
                antenna_count = m;
                location_count = l;
                gains.resize(antenna_count, location_count);
                header_seen = true;
            }
            continue;  // further comment lines are skipped
        }
        if (!header_seen) {
            throw ParseError("line " + std::to_string(line_no) +
                             ": data before the '# M=... L=...' header");
        }
        if (row >= antenna_count) {
            throw ParseError("line " + std::to_string(line_no) + ": more than M=" +
                             std::to_string(antenna_count) + " data rows");
        }
        const auto fields = split_fields(view);
        if (static_cast<Eigen::Index>(fields.size()) != 2 * location_count) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(2 * location_count) + " fields, got " +
                             std::to_string(fields.size()));
        }
        for (Eigen::Index l = 0; l < location_count; ++l) {
            const double re = parse_double(fields[static_cast<std::size_t>(2 * l)], line_no);
            const double im = parse_double(fields[static_cast<std::size_t>(2 * l + 1)], line_no);
            gains(row, l) = cxd(re, im);
        }
        ++row;
    }

    if (!header_seen) {
        throw ValidationError("channel file is empty: " + path.string());
    }
    if (row != antenna_count) {
        throw ParseError("channel file ends after " + std::to_string(row) + " of " +
                         std::to_string(antenna_count) + " antenna rows");
    }
    return make_channel_set(std::move(gains));
}

ChannelSet load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open channel file: " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("invalid JSON in " + path.string() + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("m") || !j.contains("l") || !j.contains("gains")) {
        throw ParseError(path.string() + ": expected object with 'm', 'l' and 'gains'");
    }
    const Eigen::Index m = j.at("m").get<Eigen::Index>();
    const Eigen::Index l = j.at("l").get<Eigen::Index>();
    if (m < 1 || l < 1) {
        throw ValidationError(path.string() + ": m and l must be positive");
    }
    const auto& g = j.at("gains");
    if (!g.is_array() || static_cast<Eigen::Index>(g.size()) != m) {
        throw ParseError(path.string() + ": 'gains' must hold m=" + std::to_string(m) + " rows");
    }
    Eigen::MatrixXcd gains(m, l);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto& grow = g.at(static_cast<std::size_t>(i));
        if (!grow.is_array() || static_cast<Eigen::Index>(grow.size()) != l) {
            throw ParseError(path.string() + ": gains row " + std::to_string(i) +
                             " must hold l=" + std::to_string(l) + " [re, im] pairs");
        }
        for (Eigen::Index c = 0; c < l; ++c) {
            const auto& pair = grow.at(static_cast<std::size_t>(c));
            if (!pair.is_array() || pair.size() != 2) {
                throw ParseError(path.string() + ": gains[" + std::to_string(i) + "][" +
                                 std::to_string(c) + "] must be a [re, im] pair");
            }
            gains(i, c) = cxd(pair.at(0).get<double>(), pair.at(1).get<double>());
        }
    }
    std::vector<std::string> ids;
    if (j.contains("location_ids")) {
        ids = j.at("location_ids").get<std::vector<std::string>>();
    }
    std::map<std::string, std::string> metadata;
    if (j.contains("metadata")) {
        for (const auto& [key, value] : j.at("metadata").items()) {
            metadata[key] = value.is_string() ? value.get<std::string>() : value.dump();
        }
    }
    return make_channel_set(std::move(gains), std::move(ids), std::move(metadata));
}

}  // namespace

ChannelSet make_channel_set(Eigen::MatrixXcd gains, std::vector<std::string> location_ids,
                            std::map<std::string, std::string> metadata) {
    if (gains.rows() < 1 || gains.cols() < 1) {
        throw ValidationError("channel set needs at least one antenna and one location");
    }
    if (!gains.allFinite()) {
        throw ValidationError("channel set contains a non-finite gain");
    }
    if (location_ids.empty()) {
        location_ids.reserve(static_cast<std::size_t>(gains.cols()));
        for (Eigen::Index l = 0; l < gains.cols(); ++l) {
            location_ids.push_back(std::to_string(l));
        }
    }
    if (static_cast<Eigen::Index>(location_ids.size()) != gains.cols()) {
        throw ValidationError("location id count does not match the number of locations");
    }
    std::unordered_set<std::string> seen;
    for (const auto& id : location_ids) {
        if (!seen.insert(id).second) {
            throw ValidationError("duplicate location id: " + id);
        }
    }
    return ChannelSet{std::move(gains), std::move(location_ids), std::move(metadata)};
}

ChannelFileFormat channel_format_from_extension(const std::filesystem::path& path) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".json") {
        return ChannelFileFormat::Json;
    }
    return ChannelFileFormat::Csv;
}

ChannelSet load_channel_set(const std::filesystem::path& path, ChannelFileFormat format) {
    return format == ChannelFileFormat::Csv ? load_csv(path) : load_json(path);
}

ChannelSet load_channel_set(const std::filesystem::path& path) {
    return load_channel_set(path, channel_format_from_extension(path));
}

void write_channel_set(const ChannelSet& set, const std::filesystem::path& path,
                       ChannelFileFormat format) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    if (format == ChannelFileFormat::Csv) {
        out << "# M=" << set.antenna_count() << " L=" << set.location_count() << "\n";
        for (Eigen::Index m = 0; m < set.antenna_count(); ++m) {
            for (Eigen::Index l = 0; l < set.location_count(); ++l) {
                if (l > 0) {
                    out << ',';
                }
                out << format_double(set.gains(m, l).real()) << ','
                    << format_double(set.gains(m, l).imag());
            }
            out << '\n';
        }
    } else {
        nlohmann::json j;
        j["m"] = set.antenna_count();
        j["l"] = set.location_count();
        j["location_ids"] = set.location_ids;
        auto rows = nlohmann::json::array();
        for (Eigen::Index m = 0; m < set.antenna_count(); ++m) {
            auto row = nlohmann::json::array();
            for (Eigen::Index l = 0; l < set.location_count(); ++l) {
                row.push_back({set.gains(m, l).real(), set.gains(m, l).imag()});
            }
            rows.push_back(std::move(row));
        }
        j["gains"] = std::move(rows);
        if (!set.metadata.empty()) {
            j["metadata"] = set.metadata;
        }
        out << j.dump(2) << '\n';
    }
    if (!out.good()) {
        throw IoError("write failed: " + path.string());
    }
}

UserChannel select_user_channel(const ChannelSet& set, Eigen::Index location_index) {
    if (location_index < 0 || location_index >= set.location_count()) {
        throw BoundsError("location index " + std::to_string(location_index) +
                          " outside [0, " + std::to_string(set.location_count()) + ")");
    }
    Eigen::VectorXcd column = set.gains.col(location_index);
    if (column.squaredNorm() == 0.0) {
        throw ValidationError("location " + set.location_ids[static_cast<std::size_t>(location_index)] +
                              " has an all-zero channel");
    }
    return UserChannel{std::move(column), set.location_ids[static_cast<std::size_t>(location_index)]};
}

UserChannel synth_los_ula(Eigen::Index antenna_count, double angle_rad,
                          double element_spacing_wavelengths, double gain) {
    if (antenna_count < 1) {
        throw ValidationError("steering vector needs at least one antenna");
    }
    if (element_spacing_wavelengths <= 0.0) {
        throw ValidationError("element spacing must be positive");
    }
    if (!(gain > 0.0) || !std::isfinite(gain)) {
        throw ValidationError("steering gain must be positive and finite");
    }
    Eigen::VectorXcd h(antenna_count);
    const double phase_step = 2.0 * std::numbers::pi * element_spacing_wavelengths * std::sin(angle_rad);
    for (Eigen::Index m = 0; m < antenna_count; ++m) {
        const double phase = phase_step * static_cast<double>(m);
        h(m) = gain * cxd(std::cos(phase), std::sin(phase));
    }
    return UserChannel{std::move(h), std::nullopt};
}

ChannelSet synth_rayleigh(Eigen::Index antenna_count, Eigen::Index location_count,
                          std::uint64_t seed) {
    if (antenna_count < 1 || location_count < 1) {
        throw ValidationError("rayleigh set needs at least one antenna and one location");
    }
    ComplexGaussianSource source(seed);
    const double component_sigma = std::sqrt(0.5);  // unit variance per complex entry
    Eigen::MatrixXcd gains(antenna_count, location_count);
    for (Eigen::Index l = 0; l < location_count; ++l) {
        for (Eigen::Index m = 0; m < antenna_count; ++m) {
            gains(m, l) = source.draw(component_sigma);
        }
    }
    return make_channel_set(std::move(gains));
}

}  // namespace z3sim
