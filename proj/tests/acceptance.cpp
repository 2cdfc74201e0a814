// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
// the process exits nonzero if any criterion fails. Tolerances are fixed
// here, not tuned at runtime.

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "risim/config.hpp"
#include "risim/experiments.hpp"
#include "risim/mlp.hpp"
#include "risim/rate.hpp"
#include "risim/ris.hpp"

using namespace risim;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::uint64_t kSeed = 42;

int g_failures = 0;

void report(int criterion, const char* label, bool pass, const std::string& detail) {
    std::printf("%s criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, label,
                detail.c_str());
    std::fflush(stdout);
    if (!pass) {
        ++g_failures;
    }
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof(buf), f, args);
    va_end(args);
    return buf;
}

// Independent high-precision finite-blocklength oracle (long double,
// bisection inverse tail; no shared code with the library path).
long double fbl_oracle(long double gamma, unsigned n, long double eps) {
    long double lo = 0.0L, hi = 40.0L;
    for (int i = 0; i < 200; ++i) {
        const long double mid = 0.5L * (lo + hi);
        if (0.5L * erfcl(mid / sqrtl(2.0L)) > eps) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const long double qinv = 0.5L * (lo + hi);
    const long double c = log2l(1.0L + gamma);
    const long double v = 1.0L - 1.0L / ((1.0L + gamma) * (1.0L + gamma));
    const long double r =
        c - sqrtl(v / static_cast<long double>(n)) * qinv * log2l(expl(1.0L));
    return r > 0.0L ? r : 0.0L;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const SnrCase& find_case(const SnrCdfResult& r, const std::string& name) {
    for (const SnrCase& c : r.cases) {
        if (c.name == name) {
            return c;
        }
    }
    throw std::runtime_error("missing case " + name);
}

}  // namespace

// Criteria 1-3: SNR medians and ranges of the calibrated single-link study.
void snr_statistics_criteria() {
    ExperimentConfig cal_cfg = ExperimentConfig::build(ExperimentKind::calibrate, "", {},
                                                       kSeed, std::nullopt, "");
    const CalibrationResult cal = calibrate_budget(cal_cfg);

    ExperimentConfig cfg = ExperimentConfig::build(
        ExperimentKind::snr_cdf, "",
        {"budget.tx_power_db=" + std::to_string(cal.budget.tx_power_db),
         "budget.noise_power_db=0",
         "budget.direct_path_offset_db=" + std::to_string(cal.budget.direct_path_offset_db)},
        kSeed, 100000, "");
    const SnrCdfResult r = run_snr_cdf(cfg);

    const SummaryStats opt_nd = find_case(r, "optimized_no_direct").stats;
    const SummaryStats rel_nd = find_case(r, "relay_no_direct").stats;
    const SummaryStats opt_wd = find_case(r, "optimized_with_direct").stats;
    const SummaryStats rel_wd = find_case(r, "relay_with_direct").stats;

    const double gap = opt_nd.median_db - rel_nd.median_db;
    report(1, "phase-optimized vs relay median gap, no direct link",
           std::fabs(gap - 26.8) <= 1.0,
           fmt("gap = %.2f dB, target 26.8 +- 1.0", gap));

    const bool ranges_ok = std::fabs(opt_nd.range_db - 1.8) <= 0.3 &&
                           std::fabs(rel_nd.range_db - 38.5) <= 2.0;
    report(2, "SNR ranges without the direct link (held-out predictions)", ranges_ok,
           fmt("optimized range = %.2f dB (1.8 +- 0.3), relay range = %.2f dB (38.5 +- 2.0)",
               opt_nd.range_db, rel_nd.range_db));

    const double wd_gain = opt_wd.median_db - rel_wd.median_db;
    const double range_cut = rel_wd.range_db - opt_wd.range_db;
    const bool wd_ok = wd_gain > 0.0 && wd_gain < 4.0 && range_cut >= 15.0;
    report(3, "with-direct medians and range reduction", wd_ok,
           fmt("median gain = %.2f dB (target (0, 4)), range reduction = %.1f dB (>= 15)",
               wd_gain, range_cut));
}

// Criteria 4-5: CSI phase-error sweep anchors and the quantization effect.
void csi_error_criteria() {
    ExperimentConfig cfg =
        ExperimentConfig::build(ExperimentKind::csi_error, "", {}, kSeed, 10000, "");
    const CsiErrorResult r = run_csi_error(cfg);
    const std::vector<double> deltas = cfg.csi_deltas();

    const double anchor =
        r.cell(kPi / 3, ErrorPlacement::cascaded, 0).result.mean_normalized_gain;
    bool monotone = true;
    double prev = 1.0 + 1e-9;
    for (const double d : deltas) {
        const double m = r.cell(d, ErrorPlacement::cascaded, 0).result.mean_normalized_gain;
        monotone = monotone && m <= prev + 0.005;
        prev = m;
    }
    double max_placement_gap = 0.0;
    for (const double d : deltas) {
        const double a = r.cell(d, ErrorPlacement::cascaded, 0).result.mean_normalized_gain;
        const double b = r.cell(d, ErrorPlacement::g_only, 0).result.mean_normalized_gain;
        const double c = r.cell(d, ErrorPlacement::h_only, 0).result.mean_normalized_gain;
        max_placement_gap = std::max(
            {max_placement_gap, std::fabs(a - b), std::fabs(a - c), std::fabs(b - c)});
    }
    const bool ok4 =
        std::fabs(anchor - 0.912) <= 0.01 && monotone && max_placement_gap < 0.01;
    report(4, "normalized-gain anchor, monotone sweep, placement equivalence", ok4,
           fmt("gain(pi/3) = %.4f (0.912 +- 0.01), monotone = %d, max placement gap = %.4f",
               anchor, monotone ? 1 : 0, max_placement_gap));

    const unsigned bits = cfg.csi_quantized_bits();
    bool quantized_beats_continuous = false;
    double best_excess = -1.0;
    for (const double d : deltas) {
        if (d == 0.0) {
            continue;
        }
        const double q = r.cell(d, ErrorPlacement::cascaded, bits).result.mean_normalized_gain;
        const double c = r.cell(d, ErrorPlacement::cascaded, 0).result.mean_normalized_gain;
        best_excess = std::max(best_excess, q - c);
        quantized_beats_continuous = quantized_beats_continuous || q > c;
    }
    report(5, "some sweep point where 2-bit beats continuous", quantized_beats_continuous,
           fmt("max (quantized - continuous) = %.5f", best_excess));
}

// Criterion 6: finite-blocklength rate formula against the oracle.
void fbl_formula_criterion() {
    FblParams params;  // n = 20, eps = 1e-6
    const double got = fbl_rate(10.0, params);
    const double oracle = static_cast<double>(fbl_oracle(10.0L, 20, 1e-6L));
    bool ok = std::fabs(got - oracle) <= 1e-3 && std::fabs(got - 1.932) <= 0.001;

    bool below = true;
    for (double gamma = 0.1; gamma < 3000.0; gamma *= 1.9) {
        below = below && fbl_rate(gamma, params) < shannon_rate(gamma);
    }
    FblParams long_block;
    long_block.blocklength = 1000000;
    const double gap = shannon_rate(10.0) - fbl_rate(10.0, long_block);
    ok = ok && below && gap < 1e-2;
    report(6, "finite-blocklength formula", ok,
           fmt("rate(10, 20, 1e-6) = %.6f (oracle %.6f), below shannon = %d, "
               "asymptotic gap = %.2e",
               got, oracle, below ? 1 : 0, gap));
}

// Criterion 7: desk-scale learning properties of the four training curves.
void td3_criteria() {
    ExperimentConfig cfg =
        ExperimentConfig::build(ExperimentKind::td3_train, "", {}, kSeed, std::nullopt, "");
    const Td3TrainResult r = run_td3(cfg);

    const Td3Curve& fbl_ideal = r.curve(RateKind::fbl, AmplitudeModel::Mode::ideal);
    const Td3Curve& fbl_prac = r.curve(RateKind::fbl, AmplitudeModel::Mode::practical);
    const Td3Curve& sh_ideal = r.curve(RateKind::shannon, AmplitudeModel::Mode::ideal);

    const double ratio = fbl_ideal.final_moving_avg() / fbl_ideal.first_moving_avg();
    const double ratio_prac = fbl_prac.final_moving_avg() / fbl_prac.first_moving_avg();
    report(7, "a: converged FBL moving average >= 1.5x the first point",
           ratio >= 1.5 && ratio_prac >= 1.5,
           fmt("ideal %.3f -> %.3f (%.2fx), practical %.3f -> %.3f (%.2fx)",
               fbl_ideal.first_moving_avg(), fbl_ideal.final_moving_avg(), ratio,
               fbl_prac.first_moving_avg(), fbl_prac.final_moving_avg(), ratio_prac));

    const double ideal_final = fbl_ideal.final_moving_avg();
    const double prac_final = fbl_prac.final_moving_avg();
    const double loss = (ideal_final - prac_final) / ideal_final;
    report(7, "b: practical surface within 10% below ideal at matched seed",
           prac_final <= ideal_final && loss < 0.10,
           fmt("ideal = %.3f, practical = %.3f, loss = %.1f%%", ideal_final, prac_final,
               100.0 * loss));

    bool fbl_below = true;
    double min_gap = 1e9;
    for (std::size_t i = 0; i < fbl_ideal.episodes.size(); ++i) {
        if (!fbl_ideal.episodes[i].moving_avg) {
            continue;
        }
        const double f = *fbl_ideal.episodes[i].moving_avg;
        const double s = *sh_ideal.episodes[i].moving_avg;
        fbl_below = fbl_below && f < s;
        min_gap = std::min(min_gap, s - f);
    }
    report(7, "c: FBL curve strictly below the Shannon curve pointwise", fbl_below,
           fmt("min pointwise gap = %.3f bpcu", min_gap));
}

// Criterion 8: numerics spot checks.
void numerics_criteria() {
    // 8a: analytic gradients against central finite differences.
    RngStream rng(7, 0);
    Mlp net = Mlp::make({4, 12, 6, 3}, OutputActivation::tanh_bounded, rng);
    const std::vector<double> input{0.2, -0.6, 0.9, -0.1};
    const std::vector<double> upstream{0.8, -0.4, 1.2};
    const MlpGrads grads = mlp_backward(net, input, upstream);
    const auto loss = [&] {
        const auto out = mlp_forward(net, input);
        double l = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i) {
            l += upstream[i] * out[i];
        }
        return l;
    };
    double max_rel = 0.0;
    const double step = 1e-5;
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        for (std::size_t i = 0; i < net.weights[l].data.size(); ++i) {
            double& p = net.weights[l].data[i];
            const double saved = p;
            p = saved + step;
            const double up = loss();
            p = saved - step;
            const double down = loss();
            p = saved;
            const double fd = (up - down) / (2.0 * step);
            const double an = grads.weights[l].data[i];
            max_rel = std::max(
                max_rel, std::fabs(fd - an) / std::max({std::fabs(fd), std::fabs(an), 1e-8}));
        }
    }
    report(8, "a: MLP gradients vs central finite differences", max_rel < 1e-4,
           fmt("max relative error = %.2e", max_rel));

    // 8b: no random phase vector beats the closed-form coherent optimum.
    RngStream crng(11, 0);
    const CVec g = sample_circular_gaussian(crng, 64, 1.0);
    const CVec h = sample_circular_gaussian(crng, 64, 1.0);
    const RisState best = RisState::from_estimates(optimal_phases(g, h), AmplitudeModel{},
                                                   QuantizationSpec{});
    const double opt = std::abs(cascade_sum(g, best, h));
    bool never_beaten = true;
    for (int t = 0; t < 10000; ++t) {
        std::vector<double> phases(64);
        for (auto& p : phases) {
            p = crng.next_unit() * kTau;
        }
        const RisState s =
            RisState::from_estimates(phases, AmplitudeModel{}, QuantizationSpec{});
        never_beaten = never_beaten && std::abs(cascade_sum(g, s, h)) <= opt * (1 + 1e-12);
    }
    report(8, "b: 1e4 random phase vectors never beat the coherent optimum", never_beaten,
           fmt("optimum magnitude = %.4g", opt));

    // 8c: quantizer codomain.
    bool on_grid = true;
    for (unsigned bits : {1u, 2u, 3u, 4u}) {
        QuantizationSpec q;
        q.bits = bits;
        const auto levels = q.levels();
        for (int t = 0; t < 1000; ++t) {
            const double out = quantize_phase(crng.next_unit() * kTau, q);
            bool hit = false;
            for (const double l : levels) {
                hit = hit || std::fabs(out - l) < 1e-12;
            }
            on_grid = on_grid && hit;
        }
    }
    report(8, "c: quantizer outputs stay on the 2^b-level grid", on_grid, "4096 draws");

    // 8d: byte-identical CSVs for identical (config, seed).
    const auto base = std::filesystem::temp_directory_path() / "risim_acceptance";
    std::filesystem::remove_all(base);
    const auto run_dir = [&](const char* name) {
        ExperimentConfig cfg = ExperimentConfig::build(
            ExperimentKind::snr_cdf, "",
            {"scenario.ris_elements=64", "experiment.trials=5000"}, kSeed, std::nullopt,
            (base / name).string());
        run_snr_cdf(cfg);
        return base / name;
    };
    const auto d1 = run_dir("a");
    const auto d2 = run_dir("b");
    bool identical = true;
    for (const char* f : {"snr_cdf.csv", "snr_summary.csv", "report.txt"}) {
        identical = identical && slurp(d1 / f) == slurp(d2 / f) && !slurp(d1 / f).empty();
    }
    report(8, "d: identical (config, seed) reruns are byte-identical", identical,
           "snr_cdf.csv, snr_summary.csv, report.txt");
}

int main() {
    std::printf("acceptance suite (seed %llu)\n", (unsigned long long)kSeed);
    snr_statistics_criteria();
    csi_error_criteria();
    fbl_formula_criterion();
    td3_criteria();
    numerics_criteria();
    if (g_failures == 0) {
        std::printf("all criteria passed\n");
    } else {
        std::printf("%d criterion check(s) failed\n", g_failures);
    }
    return g_failures == 0 ? 0 : 1;
}
