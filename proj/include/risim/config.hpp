// SPDX-License-Identifier: Apache-2.0
//
// Flat sectioned key/value configuration with canonical serialization and a
// stable fingerprint, plus the typed experiment configuration assembled from
// per-experiment defaults, an optional config file and CLI overrides.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "risim/channel.hpp"
#include "risim/rate.hpp"
#include "risim/ris.hpp"
#include "risim/td3.hpp"

namespace risim {

class ConfigMap {
  public:
    static ConfigMap parse_string(const std::string& text);
    static ConfigMap parse_file(const std::string& path);

    void set(const std::string& section, const std::string& key, const std::string& value);
    /// Keep an existing value, otherwise install the default.
    void set_default(const std::string& section, const std::string& key,
                     const std::string& value);
    bool has(const std::string& section, const std::string& key) const;

    std::string get_string(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key) const;
    std::uint64_t get_u64(const std::string& section, const std::string& key) const;
    bool get_bool(const std::string& section, const std::string& key) const;
    std::vector<double> get_double_list(const std::string& section,
                                        const std::string& key) const;

    /// "section.key=value".
    void apply_override(const std::string& spec);
    void merge_from(const ConfigMap& other);

    /// Canonical text form (sorted sections and keys).
    std::string serialize() const;
    /// FNV-1a over the canonical form.
    std::uint64_t fingerprint() const;

  private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

/// Experiment kinds understood by the harness.
enum class ExperimentKind { snr_cdf, csi_error, td3_train, calibrate };

ExperimentKind experiment_kind_from_name(const std::string& name);
std::string experiment_kind_name(ExperimentKind kind);

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::snr_cdf;
    ConfigMap map;  // effective configuration: defaults + file + overrides
    std::string out_dir;
    std::size_t threads = 0;  // 0 = one worker per hardware thread

    std::uint64_t seed() const { return map.get_u64("experiment", "seed"); }
    std::size_t trials() const { return map.get_u64("experiment", "trials"); }
    std::uint64_t fingerprint() const { return map.fingerprint(); }

    NodeLayout layout() const;
    PathLossModel pathloss() const;
    LinkBudget budget() const;
    AmplitudeModel ris_amplitude() const;
    QuantizationSpec ris_quantization() const;
    FblParams fbl() const;
    Td3Config td3() const;

    std::vector<double> csi_deltas() const;
    unsigned csi_quantized_bits() const;
    bool td3_include_direct() const;
    /// Selected reward kinds / surface modes for the training experiment.
    std::vector<RateKind> td3_rate_kinds() const;
    std::vector<AmplitudeModel::Mode> td3_ris_modes() const;

    /// Assemble the effective config. `config_path` may be empty; overrides
    /// are "section.key=value" strings. The seed must come from the CLI or
    /// the file (there is no wall-clock default).
    static ExperimentConfig build(ExperimentKind kind, const std::string& config_path,
                                  const std::vector<std::string>& overrides,
                                  std::optional<std::uint64_t> cli_seed,
                                  std::optional<std::uint64_t> cli_trials,
                                  std::string out_dir);
};

/// Baseline configuration per experiment kind.
ConfigMap default_config(ExperimentKind kind);

}  // namespace risim
