// SPDX-License-Identifier: Apache-2.0

#include "risim/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace risim {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) {
        ++b;
    }
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) {
        --e;
    }
    return s.substr(b, e - b);
}

}  // namespace

ConfigMap ConfigMap::parse_string(const std::string& text) {
    ConfigMap map;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') {
            continue;
        }
        if (t.front() == '[') {
            if (t.back() != ']' || t.size() < 3) {
                throw std::invalid_argument("config: malformed section header at line " +
                                            std::to_string(lineno));
            }
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos || section.empty()) {
            throw std::invalid_argument("config: expected 'key = value' at line " +
                                        std::to_string(lineno));
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) {
            throw std::invalid_argument("config: empty key at line " + std::to_string(lineno));
        }
        map.set(section, key, value);
    }
    return map;
}

ConfigMap ConfigMap::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("config: cannot open " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
}

void ConfigMap::set(const std::string& section, const std::string& key,
                    const std::string& value) {
    sections_[section][key] = value;
}

void ConfigMap::set_default(const std::string& section, const std::string& key,
                            const std::string& value) {
    auto& sec = sections_[section];
    sec.emplace(key, value);
}

bool ConfigMap::has(const std::string& section, const std::string& key) const {
    const auto it = sections_.find(section);
    return it != sections_.end() && it->second.count(key) > 0;
}

std::string ConfigMap::get_string(const std::string& section, const std::string& key) const {
    const auto it = sections_.find(section);
    if (it == sections_.end()) {
        throw std::invalid_argument("config: missing section [" + section + "]");
    }
    const auto kit = it->second.find(key);
    if (kit == it->second.end()) {
        throw std::invalid_argument("config: missing key " + section + "." + key);
    }
    return kit->second;
}

double ConfigMap::get_double(const std::string& section, const std::string& key) const {
    const std::string v = get_string(section, key);
    std::size_t pos = 0;
    double out;
    try {
        out = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: " + section + "." + key + " is not a number");
    }
    if (trim(v.substr(pos)) != "") {
        throw std::invalid_argument("config: trailing junk in " + section + "." + key);
    }
    return out;
}

std::uint64_t ConfigMap::get_u64(const std::string& section, const std::string& key) const {
    const std::string v = get_string(section, key);
    try {
        return std::stoull(trim(v));
    } catch (const std::exception&) {
        throw std::invalid_argument("config: " + section + "." + key +
                                    " is not an unsigned integer");
    }
}

bool ConfigMap::get_bool(const std::string& section, const std::string& key) const {
    std::string v = get_string(section, key);
    std::transform(v.begin(), v.end(), v.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no" || v == "off") {
        return false;
    }
    throw std::invalid_argument("config: " + section + "." + key + " is not a boolean");
}

std::vector<double> ConfigMap::get_double_list(const std::string& section,
                                               const std::string& key) const {
    const std::string v = get_string(section, key);
    std::vector<double> out;
    std::istringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string t = trim(item);
        if (t.empty()) {
            continue;
        }
        out.push_back(std::stod(t));
    }
    return out;
}

void ConfigMap::apply_override(const std::string& spec) {
    const auto eq = spec.find('=');
    const auto dot = spec.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
        throw std::invalid_argument("override must look like section.key=value: " + spec);
    }
    set(trim(spec.substr(0, dot)), trim(spec.substr(dot + 1, eq - dot - 1)),
        trim(spec.substr(eq + 1)));
}

void ConfigMap::merge_from(const ConfigMap& other) {
    for (const auto& [section, kv] : other.sections_) {
        for (const auto& [key, value] : kv) {
            set(section, key, value);
        }
    }
}

std::string ConfigMap::serialize() const {
    std::ostringstream out;
    for (const auto& [section, kv] : sections_) {
        out << '[' << section << "]\n";
        for (const auto& [key, value] : kv) {
            out << key << " = " << value << '\n';
        }
    }
    return out.str();
}

std::uint64_t ConfigMap::fingerprint() const {
    const std::string text = serialize();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

ExperimentKind experiment_kind_from_name(const std::string& name) {
    if (name == "snr-cdf") {
        return ExperimentKind::snr_cdf;
    }
    if (name == "csi-error") {
        return ExperimentKind::csi_error;
    }
    if (name == "td3-train") {
        return ExperimentKind::td3_train;
    }
    if (name == "calibrate") {
        return ExperimentKind::calibrate;
    }
    throw std::invalid_argument("unknown experiment kind: " + name);
}

std::string experiment_kind_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::snr_cdf:
            return "snr-cdf";
        case ExperimentKind::csi_error:
            return "csi-error";
        case ExperimentKind::td3_train:
            return "td3-train";
        case ExperimentKind::calibrate:
            return "calibrate";
    }
    return "unknown";
}

namespace {

void add_common_defaults(ConfigMap& map) {
    map.set_default("pathloss", "intercept_db", "34.53");
    map.set_default("pathloss", "slope_db_per_decade", "38");
    map.set_default("ris", "mode", "ideal");
    map.set_default("ris", "bits", "0");
    map.set_default("ris", "beta_min", "0.8");
    map.set_default("ris", "phi_rad", "1.3508848108798462");  // 0.43*pi
    map.set_default("ris", "alpha", "1.6");
    map.set_default("fbl", "blocklength", "20");
    map.set_default("fbl", "error_target", "1e-6");
}

void add_single_link_scenario(ConfigMap& map) {
    map.set_default("scenario", "bs", "0,0");
    map.set_default("scenario", "ris", "10,10");
    map.set_default("scenario", "actuators", "100,0");
    map.set_default("scenario", "bs_antennas", "1");
    map.set_default("scenario", "ris_elements", "512");
    // Budget calibrated against the single-link SNR anchors; reproduced by
    // the calibrate experiment.
    map.set_default("budget", "tx_power_db", "156.08");
    map.set_default("budget", "noise_power_db", "0");
    map.set_default("budget", "direct_path_offset_db", "-16.29");
}

}  // namespace

ConfigMap default_config(ExperimentKind kind) {
    ConfigMap map;
    add_common_defaults(map);
    switch (kind) {
        case ExperimentKind::snr_cdf:
        case ExperimentKind::calibrate:
            add_single_link_scenario(map);
            map.set_default("experiment", "trials", "100000");
            map.set_default("calibrate", "target_median_db", "21.0");
            map.set_default("calibrate", "target_direct_median_db", "27.71");
            map.set_default("calibrate", "tolerance_db", "0.05");
            map.set_default("calibrate", "trials", "20000");
            break;
        case ExperimentKind::csi_error:
            add_single_link_scenario(map);
            map.set("scenario", "ris_elements", "1024");
            map.set_default("experiment", "trials", "10000");
            map.set_default("csi", "deltas_rad",
                            "0,0.5235987755982988,0.7853981633974483,1.0471975511965976,"
                            "1.5707963267948966,2.0943951023931953,3.141592653589793");
            map.set_default("csi", "quantized_bits", "2");
            break;
        case ExperimentKind::td3_train:
            map.set_default("scenario", "bs", "75,75");
            map.set_default("scenario", "ris", "150,150");
            map.set_default("scenario", "actuators", "135,105; 105,135; 120,90; 90,120");
            map.set_default("scenario", "bs_antennas", "4");
            map.set_default("scenario", "ris_elements", "64");
            map.set_default("budget", "tx_power_db", "215.0");
            map.set_default("budget", "noise_power_db", "0");
            map.set_default("budget", "direct_path_offset_db", "0");
            map.set_default("experiment", "trials", "1");
            map.set_default("td3", "actor_lr", "1e-3");
            map.set_default("td3", "critic_lr", "1e-3");
            map.set_default("td3", "tau", "0.005");
            map.set_default("td3", "policy_delay", "2");
            map.set_default("td3", "discount", "0");
            map.set_default("td3", "exploration_noise", "0.1");
            map.set_default("td3", "target_noise", "0.2");
            map.set_default("td3", "noise_clip", "0.5");
            map.set_default("td3", "batch_size", "128");
            map.set_default("td3", "buffer_capacity", "100000");
            map.set_default("td3", "episodes", "400");
            map.set_default("td3", "steps_per_episode", "40");
            map.set_default("td3", "warmup_steps", "2000");
            map.set_default("td3", "hidden", "256,256");
            map.set_default("td3", "rate_kind", "both");
            map.set_default("td3", "ris_mode", "both");
            map.set_default("td3", "quantized_bits", "2");
            map.set_default("td3", "include_direct", "false");
            break;
    }
    return map;
}

NodeLayout ExperimentConfig::layout() const {
    const auto parse_point = [&](const std::string& raw) {
        const auto comma = raw.find(',');
        if (comma == std::string::npos) {
            throw std::invalid_argument("config: point must be 'x,y': " + raw);
        }
        return Point2{std::stod(raw.substr(0, comma)), std::stod(raw.substr(comma + 1))};
    };
    NodeLayout l;
    l.bs = parse_point(map.get_string("scenario", "bs"));
    l.ris = parse_point(map.get_string("scenario", "ris"));
    std::istringstream acts(map.get_string("scenario", "actuators"));
    std::string item;
    while (std::getline(acts, item, ';')) {
        const std::string t = trim(item);
        if (!t.empty()) {
            l.actuators.push_back(parse_point(t));
        }
    }
    l.bs_antennas = map.get_u64("scenario", "bs_antennas");
    l.ris_elements = map.get_u64("scenario", "ris_elements");
    l.validate();
    return l;
}

PathLossModel ExperimentConfig::pathloss() const {
    PathLossModel m;
    m.intercept_db = map.get_double("pathloss", "intercept_db");
    m.slope_db_per_decade = map.get_double("pathloss", "slope_db_per_decade");
    return m;
}

LinkBudget ExperimentConfig::budget() const {
    LinkBudget b;
    b.tx_power_db = map.get_double("budget", "tx_power_db");
    b.noise_power_db = map.get_double("budget", "noise_power_db");
    b.direct_path_offset_db = map.get_double("budget", "direct_path_offset_db");
    return b;
}

AmplitudeModel ExperimentConfig::ris_amplitude() const {
    AmplitudeModel m;
    const std::string mode = map.get_string("ris", "mode");
    if (mode == "ideal") {
        m.mode = AmplitudeModel::Mode::ideal;
    } else if (mode == "practical") {
        m.mode = AmplitudeModel::Mode::practical;
    } else {
        throw std::invalid_argument("config: ris.mode must be ideal or practical");
    }
    m.beta_min = map.get_double("ris", "beta_min");
    m.phi = map.get_double("ris", "phi_rad");
    m.alpha = map.get_double("ris", "alpha");
    return m;
}

QuantizationSpec ExperimentConfig::ris_quantization() const {
    QuantizationSpec q;
    q.bits = static_cast<unsigned>(map.get_u64("ris", "bits"));
    return q;
}

FblParams ExperimentConfig::fbl() const {
    FblParams p;
    p.blocklength = static_cast<unsigned>(map.get_u64("fbl", "blocklength"));
    p.error_target = map.get_double("fbl", "error_target");
    if (!(p.error_target > 0.0 && p.error_target < 1.0)) {
        throw std::invalid_argument("config: fbl.error_target outside (0, 1)");
    }
    return p;
}

Td3Config ExperimentConfig::td3() const {
    Td3Config c;
    c.actor_lr = map.get_double("td3", "actor_lr");
    c.critic_lr = map.get_double("td3", "critic_lr");
    c.tau = map.get_double("td3", "tau");
    c.policy_delay = map.get_u64("td3", "policy_delay");
    c.discount = map.get_double("td3", "discount");
    c.exploration_noise = map.get_double("td3", "exploration_noise");
    c.target_noise = map.get_double("td3", "target_noise");
    c.noise_clip = map.get_double("td3", "noise_clip");
    c.batch_size = map.get_u64("td3", "batch_size");
    c.buffer_capacity = map.get_u64("td3", "buffer_capacity");
    c.episodes = map.get_u64("td3", "episodes");
    c.steps_per_episode = map.get_u64("td3", "steps_per_episode");
    c.warmup_steps = map.get_u64("td3", "warmup_steps");
    c.hidden.clear();
    for (const double h : map.get_double_list("td3", "hidden")) {
        c.hidden.push_back(static_cast<std::size_t>(h));
    }
    c.validate();
    return c;
}

std::vector<double> ExperimentConfig::csi_deltas() const {
    return map.get_double_list("csi", "deltas_rad");
}

unsigned ExperimentConfig::csi_quantized_bits() const {
    return static_cast<unsigned>(map.get_u64("csi", "quantized_bits"));
}

bool ExperimentConfig::td3_include_direct() const {
    return map.get_bool("td3", "include_direct");
}

std::vector<RateKind> ExperimentConfig::td3_rate_kinds() const {
    const std::string v = map.get_string("td3", "rate_kind");
    if (v == "both") {
        return {RateKind::shannon, RateKind::fbl};
    }
    if (v == "shannon") {
        return {RateKind::shannon};
    }
    if (v == "fbl") {
        return {RateKind::fbl};
    }
    throw std::invalid_argument("config: td3.rate_kind must be shannon, fbl or both");
}

std::vector<AmplitudeModel::Mode> ExperimentConfig::td3_ris_modes() const {
    const std::string v = map.get_string("td3", "ris_mode");
    if (v == "both") {
        return {AmplitudeModel::Mode::ideal, AmplitudeModel::Mode::practical};
    }
    if (v == "ideal") {
        return {AmplitudeModel::Mode::ideal};
    }
    if (v == "practical") {
        return {AmplitudeModel::Mode::practical};
    }
    throw std::invalid_argument("config: td3.ris_mode must be ideal, practical or both");
}

ExperimentConfig ExperimentConfig::build(ExperimentKind kind, const std::string& config_path,
                                         const std::vector<std::string>& overrides,
                                         std::optional<std::uint64_t> cli_seed,
                                         std::optional<std::uint64_t> cli_trials,
                                         std::string out_dir) {
    ExperimentConfig cfg;
    cfg.kind = kind;
    cfg.map = default_config(kind);
    if (!config_path.empty()) {
        cfg.map.merge_from(ConfigMap::parse_file(config_path));
    }
    for (const auto& o : overrides) {
        cfg.map.apply_override(o);
    }
    if (cli_trials) {
        cfg.map.set("experiment", "trials", std::to_string(*cli_trials));
    }
    if (cli_seed) {
        cfg.map.set("experiment", "seed", std::to_string(*cli_seed));
    }
    if (!cfg.map.has("experiment", "seed")) {
        throw std::invalid_argument(
            "a seed is required (pass --seed or set experiment.seed in the config)");
    }
    cfg.out_dir = std::move(out_dir);
    return cfg;
}

}  // namespace risim
