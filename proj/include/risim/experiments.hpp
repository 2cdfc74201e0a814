// SPDX-License-Identifier: Apache-2.0
//
// The three study drivers (SNR statistics, CSI-error sweep, policy
// training), link-budget calibration, and deterministic report/CSV output.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "risim/config.hpp"
#include "risim/impairment.hpp"
#include "risim/td3.hpp"

namespace risim {

struct CalibrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentReport {
    std::string kind;
    std::uint64_t fingerprint = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> lines;

    /// Deterministic text body; identical (config, seed) reruns are
    /// byte-identical.
    std::string body() const;
    void write(const std::string& out_dir) const;
};

/// Deterministic 16-hex-digit rendering used in reports and CSV headers.
std::string fingerprint_hex(std::uint64_t fp);

// ---- SNR statistics (phase-optimized vs static relay, +- direct link) ----

struct SnrCase {
    std::string name;
    bool optimized = false;
    bool include_direct = false;
    SummaryStats stats;
    std::vector<double> cdf_grid_db;  // percentile grid, p = i / (size-1)
};

struct SnrCdfResult {
    std::vector<SnrCase> cases;
    bool low_trial_warning = false;
    ExperimentReport report;
};

SnrCdfResult run_snr_cdf(const ExperimentConfig& config);

// ---- CSI phase-error sweep ----

struct CsiCell {
    double delta = 0.0;
    ErrorPlacement placement = ErrorPlacement::cascaded;
    unsigned bits = 0;
    NormalizedGainResult result;
};

struct CsiErrorResult {
    std::vector<CsiCell> cells;
    ExperimentReport report;

    const CsiCell& cell(double delta, ErrorPlacement placement, unsigned bits) const;
};

CsiErrorResult run_csi_error(const ExperimentConfig& config);

// ---- policy training curves ----

struct Td3Curve {
    RateKind rate_kind = RateKind::fbl;
    AmplitudeModel::Mode ris_mode = AmplitudeModel::Mode::ideal;
    unsigned bits = 0;
    std::vector<EpisodeLog> episodes;

    double first_moving_avg() const;
    double final_moving_avg() const;
};

struct Td3TrainResult {
    std::vector<Td3Curve> curves;
    ExperimentReport report;

    const Td3Curve& curve(RateKind kind, AmplitudeModel::Mode mode) const;
};

Td3TrainResult run_td3(const ExperimentConfig& config);

// ---- budget calibration against the SNR anchors ----

struct CalibrationResult {
    LinkBudget budget;
    double optimized_no_direct_median_db = 0.0;
    double relay_with_direct_median_db = 0.0;
    double relay_no_direct_median_db = 0.0;  // held-out prediction
    ExperimentReport report;
};

CalibrationResult calibrate_budget(const ExperimentConfig& config);

std::string placement_name(ErrorPlacement placement);

}  // namespace risim
