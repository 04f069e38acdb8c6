// SPDX-License-Identifier: Apache-2.0
#include "z3sim/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "z3sim/errors.hpp"

namespace z3sim {

namespace {

const std::set<std::string> kKnownKeys = {
    "channel_file",  "channel_format", "channel_synthetic", "user_locations",
    "m_s",           "selection",      "pa_model",          "pa_saturation_power",
    "pa_smoothness", "pa_a1",          "pa_a3",             "backoff_db",
    "noise_var",     "ensemble_size",  "seed",
};

std::string trim(std::string_view s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string_view::npos) {
        return {};
    }
    const auto end = s.find_last_not_of(" \t\r");
    return std::string(s.substr(begin, end - begin + 1));
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) {
        throw IoError("failed to format floating-point value");
    }
    return std::string(buf, ptr);
}

double parse_double_value(const std::string& key, const std::string& value) {
    double out = 0.0;
    const char* begin = value.data();
    const char* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc{} || ptr != end) {
        throw ParseError("key '" + key + "': cannot parse number '" + value + "'");
    }
    return out;
}

long long parse_int_value(const std::string& key, const std::string& value) {
    long long out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ParseError("key '" + key + "': cannot parse integer '" + value + "'");
    }
    return out;
}

std::uint64_t parse_uint_value(const std::string& key, const std::string& value) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ParseError("key '" + key + "': cannot parse unsigned integer '" + value + "'");
    }
    return out;
}

/// Accepts "1.5", "1.5+0.25i", "2-3i".
cxd parse_complex_value(const std::string& key, const std::string& raw) {
    const std::string value = trim(raw);
    if (value.empty()) {
        throw ParseError("key '" + key + "': empty complex value");
    }
    if (value.back() != 'i') {
        return {parse_double_value(key, value), 0.0};
    }
    // Split off the imaginary part at the last +/- that is not an exponent sign.
    const std::string body = value.substr(0, value.size() - 1);
    std::size_t split = std::string::npos;
    for (std::size_t i = body.size(); i-- > 1;) {
        if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    if (split == std::string::npos) {
        throw ParseError("key '" + key + "': expected complex form 're+imi', got '" + raw + "'");
    }
    const double re = parse_double_value(key, body.substr(0, split));
    const double im = parse_double_value(key, body.substr(split));
    return {re, im};
}

std::string format_complex(cxd v) {
    if (v.imag() == 0.0) {
        return format_double(v.real());
    }
    std::string out = format_double(v.real());
    if (v.imag() >= 0.0) {
        out += '+';
    }
    out += format_double(v.imag());
    out += 'i';
    return out;
}

std::vector<Eigen::Index> parse_index_list(const std::string& key, const std::string& value) {
    std::vector<Eigen::Index> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string t = trim(item);
        if (t.empty()) {
            throw ParseError("key '" + key + "': empty list entry");
        }
        out.push_back(static_cast<Eigen::Index>(parse_int_value(key, t)));
    }
    if (out.empty()) {
        throw ParseError("key '" + key + "': empty list");
    }
    return out;
}

}  // namespace

Eigen::Index ScenarioConfig::resolved_saturated_count() const {
    return saturated_count > 0 ? saturated_count : 2 * std::max<Eigen::Index>(user_count(), 1);
}

double ScenarioConfig::reference_saturation_power() const {
    if (const auto* rapp = std::get_if<RappPa>(&pa)) {
        return rapp->saturation_power;
    }
    return 1.0;
}

PowerBudget ScenarioConfig::budget() const {
    return equal_power_budget(std::max<Eigen::Index>(user_count(), 1), backoff_db,
                              reference_saturation_power());
}

std::string ScenarioConfig::echo() const {
    const auto kv = scenario_to_key_values(*this);
    std::string out;
    for (const auto& [key, value] : kv) {
        if (!out.empty()) {
            out += ';';
        }
        out += key;
        out += '=';
        out += value;
    }
    return out;
}

SyntheticChannelSpec parse_synthetic_spec(const std::string& text) {
    const std::string value = trim(text);
    const std::string prefix = "rayleigh:";
    if (value.rfind(prefix, 0) != 0) {
        throw ParseError("synthetic channel spec must look like 'rayleigh:m=32,l=8,seed=7', got '" +
                         text + "'");
    }
    SyntheticChannelSpec spec;
    bool have_m = false, have_l = false;
    std::stringstream ss(value.substr(prefix.size()));
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw ParseError("synthetic channel spec entry '" + item + "' is not key=value");
        }
        const std::string key = trim(item.substr(0, eq));
        const std::string val = trim(item.substr(eq + 1));
        if (key == "m") {
            spec.antenna_count = static_cast<Eigen::Index>(parse_int_value(key, val));
            have_m = true;
        } else if (key == "l") {
            spec.location_count = static_cast<Eigen::Index>(parse_int_value(key, val));
            have_l = true;
        } else if (key == "seed") {
            spec.seed = parse_uint_value(key, val);
        } else {
            throw ParseError("unknown synthetic channel spec key '" + key + "'");
        }
    }
    if (!have_m || !have_l) {
        throw ParseError("synthetic channel spec needs both m= and l=");
    }
    return spec;
}

std::string format_synthetic_spec(const SyntheticChannelSpec& spec) {
    return "rayleigh:m=" + std::to_string(spec.antenna_count) +
           ",l=" + std::to_string(spec.location_count) + ",seed=" + std::to_string(spec.seed);
}

ScenarioConfig scenario_from_key_values(const std::map<std::string, std::string>& kv) {
    for (const auto& [key, value] : kv) {
        if (!kKnownKeys.contains(key)) {
            throw ParseError("unknown config key '" + key + "'");
        }
    }
    auto get = [&kv](const char* key) -> const std::string* {
        const auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };

    ScenarioConfig config;
    if (const auto* v = get("channel_file")) {
        config.channel_file = *v;
    }
    if (const auto* v = get("channel_synthetic")) {
        config.channel_synthetic = parse_synthetic_spec(*v);
    }
    if (config.channel_file && config.channel_synthetic) {
        throw ParseError("channel_file and channel_synthetic are mutually exclusive");
    }
    if (const auto* v = get("channel_format")) {
        if (!config.channel_file) {
            throw ParseError("channel_format requires channel_file");
        }
        if (*v == "csv") {
            config.channel_format = ChannelFileFormat::Csv;
        } else if (*v == "json") {
            config.channel_format = ChannelFileFormat::Json;
        } else {
            throw ParseError("channel_format must be 'csv' or 'json', got '" + *v + "'");
        }
    }
    if (const auto* v = get("user_locations")) {
        config.user_locations = parse_index_list("user_locations", *v);
    }
    if (const auto* v = get("m_s")) {
        config.saturated_count = static_cast<Eigen::Index>(parse_int_value("m_s", *v));
        if (config.saturated_count < 1) {
            throw ParseError("m_s must be a positive integer");
        }
    }
    if (const auto* v = get("selection")) {
        if (*v == "smallest") {
            config.selection = SaturatedSelection::SmallestGains;
        } else if (*v == "first") {
            config.selection = SaturatedSelection::FirstIndices;
        } else {
            throw ParseError("selection must be 'smallest' or 'first', got '" + *v + "'");
        }
    }

    std::string pa_model = "rapp";
    if (const auto* v = get("pa_model")) {
        pa_model = *v;
    }
    if (pa_model == "rapp") {
        RappPa rapp;
        if (const auto* v = get("pa_saturation_power")) {
            rapp.saturation_power = parse_double_value("pa_saturation_power", *v);
        }
        if (const auto* v = get("pa_smoothness")) {
            rapp.smoothness = parse_double_value("pa_smoothness", *v);
        }
        if (get("pa_a1") || get("pa_a3")) {
            throw ParseError("pa_a1/pa_a3 apply only to pa_model=poly3");
        }
        config.pa = rapp;
    } else if (pa_model == "poly3") {
        Polynomial3Pa poly;
        if (const auto* v = get("pa_a1")) {
            poly.linear_gain = parse_complex_value("pa_a1", *v);
        }
        if (const auto* v = get("pa_a3")) {
            poly.cubic_coeff = parse_complex_value("pa_a3", *v);
        }
        if (get("pa_saturation_power") || get("pa_smoothness")) {
            throw ParseError("pa_saturation_power/pa_smoothness apply only to pa_model=rapp");
        }
        config.pa = poly;
    } else if (pa_model == "ideal") {
        if (get("pa_a1") || get("pa_a3") || get("pa_saturation_power") || get("pa_smoothness")) {
            throw ParseError("pa parameters apply only to rapp or poly3 models");
        }
        config.pa = IdealPa{};
    } else {
        throw ParseError("pa_model must be 'rapp', 'poly3' or 'ideal', got '" + pa_model + "'");
    }
    validate(config.pa);

    if (const auto* v = get("backoff_db")) {
        config.backoff_db = parse_double_value("backoff_db", *v);
    }
    if (const auto* v = get("noise_var")) {
        config.noise_var = parse_double_value("noise_var", *v);
        if (config.noise_var < 0.0) {
            throw ParseError("noise_var must be non-negative");
        }
    }
    if (const auto* v = get("ensemble_size")) {
        config.ensemble_size = static_cast<Eigen::Index>(parse_int_value("ensemble_size", *v));
        if (config.ensemble_size < 1) {
            throw ParseError("ensemble_size must be positive");
        }
    }
    if (const auto* v = get("seed")) {
        config.master_seed = parse_uint_value("seed", *v);
    }
    if (!std::isfinite(config.backoff_db)) {
        throw ParseError("backoff_db must be finite");
    }
    return config;
}

std::map<std::string, std::string> scenario_to_key_values(const ScenarioConfig& config) {
    std::map<std::string, std::string> kv;
    if (config.channel_file) {
        kv["channel_file"] = *config.channel_file;
        const ChannelFileFormat format =
            config.channel_format.value_or(channel_format_from_extension(*config.channel_file));
        kv["channel_format"] = format == ChannelFileFormat::Csv ? "csv" : "json";
    }
    if (config.channel_synthetic) {
        kv["channel_synthetic"] = format_synthetic_spec(*config.channel_synthetic);
    }
    if (!config.user_locations.empty()) {
        std::string list;
        for (const Eigen::Index idx : config.user_locations) {
            if (!list.empty()) {
                list += ',';
            }
            list += std::to_string(idx);
        }
        kv["user_locations"] = list;
    }
    kv["m_s"] = std::to_string(config.resolved_saturated_count());
    kv["selection"] = to_string(config.selection);
    if (const auto* rapp = std::get_if<RappPa>(&config.pa)) {
        kv["pa_model"] = "rapp";
        kv["pa_saturation_power"] = format_double(rapp->saturation_power);
        kv["pa_smoothness"] = format_double(rapp->smoothness);
    } else if (const auto* poly = std::get_if<Polynomial3Pa>(&config.pa)) {
        kv["pa_model"] = "poly3";
        kv["pa_a1"] = format_complex(poly->linear_gain);
        kv["pa_a3"] = format_complex(poly->cubic_coeff);
    } else {
        kv["pa_model"] = "ideal";
    }
    kv["backoff_db"] = format_double(config.backoff_db);
    kv["noise_var"] = format_double(config.noise_var);
    kv["ensemble_size"] = std::to_string(config.ensemble_size);
    kv["seed"] = std::to_string(config.master_seed);
    return kv;
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file: " + path.string());
    }
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') {
            continue;
        }
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": expected 'key = value'");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": empty key");
        }
        if (!kKnownKeys.contains(key)) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": unknown key '" +
                             key + "'");
        }
        if (kv.contains(key)) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": duplicate key '" +
                             key + "'");
        }
        kv[key] = value;
    }
    return scenario_from_key_values(kv);
}

void validate(const ScenarioConfig& config, const ChannelSet& channels) {
    if (config.user_locations.empty()) {
        throw ValidationError("scenario needs at least one user location");
    }
    std::set<Eigen::Index> seen;
    for (const Eigen::Index idx : config.user_locations) {
        if (idx < 0 || idx >= channels.location_count()) {
            throw BoundsError("user location " + std::to_string(idx) + " outside [0, " +
                              std::to_string(channels.location_count()) + ")");
        }
        if (!seen.insert(idx).second) {
            throw ValidationError("user locations must be distinct, index " + std::to_string(idx) +
                                  " repeats");
        }
    }
    const Eigen::Index m_s = config.resolved_saturated_count();
    if (m_s < 1 || m_s >= channels.antenna_count()) {
        throw ValidationError("m_s=" + std::to_string(m_s) + " must satisfy 1 <= m_s < M=" +
                              std::to_string(channels.antenna_count()));
    }
    if (config.ensemble_size < 1) {
        throw ValidationError("ensemble_size must be positive");
    }
    if (config.noise_var < 0.0) {
        throw ValidationError("noise_var must be non-negative");
    }
    validate(config.pa);
    validate(config.budget());
}

ChannelSet resolve_channel_set(const ScenarioConfig& config) {
    if (config.channel_synthetic) {
        const auto& spec = *config.channel_synthetic;
        return synth_rayleigh(spec.antenna_count, spec.location_count, spec.seed);
    }
    if (!config.channel_file) {
        throw ValidationError("scenario has neither channel_file nor channel_synthetic");
    }
    std::filesystem::path path(*config.channel_file);
    if (!std::filesystem::exists(path) && path.is_relative()) {
        if (const char* root = std::getenv("Z3RO_SIM_DATA")) {
            const std::filesystem::path candidate = std::filesystem::path(root) / path;
            if (std::filesystem::exists(candidate)) {
                path = candidate;
            }
        }
    }
    if (!std::filesystem::exists(path)) {
        throw IoError("channel file not found: " + config.channel_file.value() +
                      " (searched the path and $Z3RO_SIM_DATA)");
    }
    const ChannelFileFormat format =
        config.channel_format.value_or(channel_format_from_extension(path));
    return load_channel_set(path, format);
}

}  // namespace z3sim
