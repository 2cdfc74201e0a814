// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: one subcommand per experiment, deterministic CSV
// and report output.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "risim/config.hpp"
#include "risim/experiments.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials;
    std::string out_dir = "out";
    std::size_t threads = 0;
    std::vector<std::string> overrides;
};

void add_common_options(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "Config file (flat INI-style sections)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", args.seed,
                    "Base RNG seed (required here or as experiment.seed in the config)");
    cmd->add_option("--trials", args.trials, "Monte-Carlo trial count override");
    cmd->add_option("--out", args.out_dir, "Output directory for CSVs and the report");
    cmd->add_option("--threads", args.threads,
                    "Worker threads (0 = one per hardware thread); results do not depend "
                    "on the thread count");
    cmd->add_option("--override", args.overrides,
                    "Config override, section.key=value (repeatable)");
}

risim::ExperimentConfig build_config(risim::ExperimentKind kind, const CommonArgs& args) {
    risim::ExperimentConfig cfg = risim::ExperimentConfig::build(
        kind, args.config_path, args.overrides, args.seed, args.trials, args.out_dir);
    cfg.threads = args.threads;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Link-level simulator and phase-optimization toolkit for RIS-assisted "
                 "industrial wireless links"};
    app.require_subcommand(1);

    CommonArgs snr_args, csi_args, td3_args, cal_args;
    CLI::App* snr = app.add_subcommand(
        "snr-cdf", "SNR statistics of phase-optimized vs static-reflection operation");
    add_common_options(snr, snr_args);
    CLI::App* csi = app.add_subcommand(
        "csi-error", "Normalized cascade gain under CSI phase-error sweeps");
    add_common_options(csi, csi_args);
    CLI::App* td3 = app.add_subcommand(
        "td3-train", "Policy-gradient phase optimization of the multi-actuator sum rate");
    add_common_options(td3, td3_args);
    CLI::App* cal = app.add_subcommand(
        "calibrate", "Calibrate the link budget against the SNR median anchors");
    add_common_options(cal, cal_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (snr->parsed()) {
            const auto result =
                risim::run_snr_cdf(build_config(risim::ExperimentKind::snr_cdf, snr_args));
            std::cout << result.report.body();
        } else if (csi->parsed()) {
            const auto result =
                risim::run_csi_error(build_config(risim::ExperimentKind::csi_error, csi_args));
            std::cout << result.report.body();
        } else if (td3->parsed()) {
            const auto result =
                risim::run_td3(build_config(risim::ExperimentKind::td3_train, td3_args));
            std::cout << result.report.body();
        } else if (cal->parsed()) {
            const auto result = risim::calibrate_budget(
                build_config(risim::ExperimentKind::calibrate, cal_args));
            std::cout << result.report.body();
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
