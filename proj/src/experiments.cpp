// SPDX-License-Identifier: Apache-2.0

#include "risim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "risim/kpi.hpp"
#include "risim/rate.hpp"
#include "risim/ris_env.hpp"

namespace risim {

namespace {

// Disjoint stream-id spaces per experiment; trial indices fill the low bits.
constexpr std::uint64_t kCsiStreamBase = std::uint64_t{1} << 41;
constexpr std::uint64_t kTd3ChannelStream = std::uint64_t{1} << 42;
constexpr std::uint64_t kTd3TrainStream = (std::uint64_t{1} << 42) + 1;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

void write_text_file(const std::string& dir, const std::string& name,
                     const std::string& content) {
    std::filesystem::create_directories(dir);
    const std::string path = (std::filesystem::path(dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << content;
}

std::string csv_header_comment(const ExperimentReport& rep) {
    return "# config_fingerprint=" + fingerprint_hex(rep.fingerprint) +
           " seed=" + std::to_string(rep.seed) + "\n";
}

// Static partition of [0, trials) over a small worker pool. Results must be
// written to per-trial slots so the reduction is order-independent.
void for_each_trial(std::size_t trials, std::size_t threads,
                    const std::function<void(std::size_t)>& fn) {
    std::size_t workers = threads == 0 ? std::thread::hardware_concurrency() : threads;
    workers = std::max<std::size_t>(1, std::min(workers, trials));
    if (workers == 1) {
        for (std::size_t t = 0; t < trials; ++t) {
            fn(t);
        }
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    const std::size_t chunk = (trials + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(trials, begin + chunk);
        if (begin >= end) {
            break;
        }
        pool.emplace_back([&, begin, end] {
            try {
                for (std::size_t t = begin; t < end; ++t) {
                    fn(t);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) {
                    first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
}

enum : unsigned {
    kCaseOptimizedDirect = 1u << 0,
    kCaseOptimizedNoDirect = 1u << 1,
    kCaseRelayDirect = 1u << 2,
    kCaseRelayNoDirect = 1u << 3,
    kAllCases = 0xF,
};

struct SnrSamples {
    std::vector<double> optimized_direct;
    std::vector<double> optimized_no_direct;
    std::vector<double> relay_direct;
    std::vector<double> relay_no_direct;
};

// One Monte-Carlo pass over the single-actuator scenario; each trial draws a
// block-static realization and evaluates the enabled cases on it.
SnrSamples collect_snr_samples(const NodeLayout& layout, const PathLossModel& pathloss,
                               const LinkBudget& budget, std::size_t trials,
                               std::uint64_t seed, std::size_t threads, unsigned mask) {
    SnrSamples samples;
    if (mask & kCaseOptimizedDirect) {
        samples.optimized_direct.resize(trials);
    }
    if (mask & kCaseOptimizedNoDirect) {
        samples.optimized_no_direct.resize(trials);
    }
    if (mask & kCaseRelayDirect) {
        samples.relay_direct.resize(trials);
    }
    if (mask & kCaseRelayNoDirect) {
        samples.relay_no_direct.resize(trials);
    }
    const double scale = budget.snr_scale();
    const AmplitudeModel ideal;
    const QuantizationSpec continuous;

    for_each_trial(trials, threads, [&](std::size_t t) {
        RngStream rng(seed, t);
        const ChannelRealization real = sample_realization(layout, pathloss, budget, rng);
        const CVec& g = real.ris_to_actuator[0];
        CVec h(real.ris_elements());
        for (std::size_t n = 0; n < h.size(); ++n) {
            h[n] = real.bs_to_ris.at(n, 0);
        }
        const auto snr_db = [&](const RisState& state, bool with_direct) {
            return 10.0 *
                   std::log10(received_signal_power(real, state, 0, with_direct) * scale);
        };
        if (mask & (kCaseRelayDirect | kCaseRelayNoDirect)) {
            const RisState relay = relay_state(h.size(), ideal, continuous);
            if (mask & kCaseRelayDirect) {
                samples.relay_direct[t] = snr_db(relay, true);
            }
            if (mask & kCaseRelayNoDirect) {
                samples.relay_no_direct[t] = snr_db(relay, false);
            }
        }
        if (mask & kCaseOptimizedNoDirect) {
            const RisState opt =
                RisState::from_estimates(optimal_phases(g, h), ideal, continuous);
            samples.optimized_no_direct[t] = snr_db(opt, false);
        }
        if (mask & kCaseOptimizedDirect) {
            // With a direct path present the aligned optimum matches its phase.
            const double ref = std::arg(real.direct[0][0]);
            const RisState opt =
                RisState::from_estimates(optimal_phases(g, h, ref), ideal, continuous);
            samples.optimized_direct[t] = snr_db(opt, true);
        }
    });
    return samples;
}

std::vector<double> percentile_grid(std::vector<double> values, std::size_t points) {
    std::sort(values.begin(), values.end());
    std::vector<double> grid(points);
    for (std::size_t i = 0; i < points; ++i) {
        grid[i] =
            percentile_sorted(values, static_cast<double>(i) / static_cast<double>(points - 1));
    }
    return grid;
}

}  // namespace

std::string fingerprint_hex(std::uint64_t fp) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fp));
    return buf;
}

std::string ExperimentReport::body() const {
    std::ostringstream out;
    out << "experiment = " << kind << '\n';
    out << "config_fingerprint = " << fingerprint_hex(fingerprint) << '\n';
    out << "seed = " << seed << '\n';
    for (const auto& line : lines) {
        out << line << '\n';
    }
    return out.str();
}

void ExperimentReport::write(const std::string& out_dir) const {
    write_text_file(out_dir, "report.txt", body());
}

std::string placement_name(ErrorPlacement placement) {
    switch (placement) {
        case ErrorPlacement::cascaded:
            return "cascaded";
        case ErrorPlacement::g_only:
            return "g_only";
        case ErrorPlacement::h_only:
            return "h_only";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// SNR statistics
// ---------------------------------------------------------------------------

SnrCdfResult run_snr_cdf(const ExperimentConfig& config) {
    const NodeLayout layout = config.layout();
    const PathLossModel pathloss = config.pathloss();
    const LinkBudget budget = config.budget();
    const std::size_t trials = config.trials();
    if (trials == 0) {
        throw std::invalid_argument("snr-cdf: trials must be >= 1");
    }

    SnrSamples samples = collect_snr_samples(layout, pathloss, budget, trials, config.seed(),
                                             config.threads, kAllCases);

    SnrCdfResult result;
    result.low_trial_warning = trials < 1000;
    constexpr std::size_t kGridPoints = 1001;
    const auto add_case = [&](const std::string& name, bool optimized, bool direct,
                              std::vector<double>& values) {
        SnrCase c;
        c.name = name;
        c.optimized = optimized;
        c.include_direct = direct;
        c.stats = summarize_db(values);
        c.cdf_grid_db = percentile_grid(std::move(values), kGridPoints);
        result.cases.push_back(std::move(c));
    };
    add_case("optimized_with_direct", true, true, samples.optimized_direct);
    add_case("optimized_no_direct", true, false, samples.optimized_no_direct);
    add_case("relay_with_direct", false, true, samples.relay_direct);
    add_case("relay_no_direct", false, false, samples.relay_no_direct);

    ExperimentReport& rep = result.report;
    rep.kind = experiment_kind_name(config.kind);
    rep.fingerprint = config.fingerprint();
    rep.seed = config.seed();
    if (result.low_trial_warning) {
        rep.lines.emplace_back(
            "warning: trial count < 1000, range statistic is unstable");
    }
    for (const SnrCase& c : result.cases) {
        rep.lines.push_back("case=" + c.name + " median_db=" + fmt(c.stats.median_db) +
                            " range_db=" + fmt(c.stats.range_db) +
                            " samples=" + std::to_string(c.stats.samples));
    }
    const auto median_of = [&](const std::string& name) {
        for (const SnrCase& c : result.cases) {
            if (c.name == name) {
                return c.stats.median_db;
            }
        }
        throw std::logic_error("missing case " + name);
    };
    const auto range_of = [&](const std::string& name) {
        for (const SnrCase& c : result.cases) {
            if (c.name == name) {
                return c.stats.range_db;
            }
        }
        throw std::logic_error("missing case " + name);
    };
    rep.lines.push_back(
        "median_gap_no_direct_db = " +
        fmt(median_of("optimized_no_direct") - median_of("relay_no_direct")));
    rep.lines.push_back(
        "median_gap_with_direct_db = " +
        fmt(median_of("optimized_with_direct") - median_of("relay_with_direct")));
    rep.lines.push_back(
        "range_reduction_with_direct_db = " +
        fmt(range_of("relay_with_direct") - range_of("optimized_with_direct")));

    if (!config.out_dir.empty()) {
        std::string cdf = csv_header_comment(rep);
        cdf += "case,p,snr_db\n";
        for (const SnrCase& c : result.cases) {
            for (std::size_t i = 0; i < c.cdf_grid_db.size(); ++i) {
                const double p =
                    static_cast<double>(i) / static_cast<double>(c.cdf_grid_db.size() - 1);
                cdf += c.name + "," + fmt(p) + "," + fmt(c.cdf_grid_db[i]) + "\n";
            }
        }
        write_text_file(config.out_dir, "snr_cdf.csv", cdf);

        std::string summary = csv_header_comment(rep);
        summary += "case,median_db,range_db,samples\n";
        for (const SnrCase& c : result.cases) {
            summary += c.name + "," + fmt(c.stats.median_db) + "," + fmt(c.stats.range_db) +
                       "," + std::to_string(c.stats.samples) + "\n";
        }
        write_text_file(config.out_dir, "snr_summary.csv", summary);
        rep.write(config.out_dir);
    }
    return result;
}

// ---------------------------------------------------------------------------
// budget calibration
// ---------------------------------------------------------------------------

namespace {

double median_for_case(const NodeLayout& layout, const PathLossModel& pathloss,
                       const LinkBudget& budget, std::size_t trials, std::uint64_t seed,
                       std::size_t threads, unsigned mask) {
    SnrSamples s =
        collect_snr_samples(layout, pathloss, budget, trials, seed, threads, mask);
    std::vector<double>* v = nullptr;
    switch (mask) {
        case kCaseOptimizedNoDirect:
            v = &s.optimized_no_direct;
            break;
        case kCaseRelayDirect:
            v = &s.relay_direct;
            break;
        case kCaseRelayNoDirect:
            v = &s.relay_no_direct;
            break;
        default:
            v = &s.optimized_direct;
            break;
    }
    return percentile(std::move(*v), 0.5);
}

// Monotone bisection: find x with f(x) = target within tol. The evaluations
// reuse the same seed, so f is a smooth deterministic function of x.
double bisect_to_target(const std::function<double(double)>& f, double lo, double hi,
                        double target, double tol, const char* what) {
    double flo = f(lo);
    double fhi = f(hi);
    if ((flo - target) * (fhi - target) > 0.0) {
        throw CalibrationError(std::string("calibrate: target not bracketed for ") + what);
    }
    const bool increasing = fhi >= flo;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (std::fabs(fm - target) <= tol) {
            return mid;
        }
        if ((fm < target) == increasing) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    throw CalibrationError(std::string("calibrate: bisection failed to converge for ") + what);
}

}  // namespace

CalibrationResult calibrate_budget(const ExperimentConfig& config) {
    const NodeLayout layout = config.layout();
    const PathLossModel pathloss = config.pathloss();
    const std::size_t trials = config.map.get_u64("calibrate", "trials");
    const double tol = config.map.get_double("calibrate", "tolerance_db");
    const double target_median = config.map.get_double("calibrate", "target_median_db");
    const double target_direct = config.map.get_double("calibrate", "target_direct_median_db");
    const std::uint64_t seed = config.seed();

    // Stage 1: transmit-over-noise so the phase-optimized (no direct) median
    // hits its anchor. The median in dB is linear in this offset.
    const auto eval_budget = [&](double tx_db) {
        LinkBudget b;
        b.tx_power_db = tx_db;
        return median_for_case(layout, pathloss, b, trials, seed, config.threads,
                               kCaseOptimizedNoDirect);
    };
    const double tx_db =
        bisect_to_target(eval_budget, 50.0, 300.0, target_median, tol, "tx power");

    // Stage 2: direct-path offset so the static-reflection (with direct)
    // median hits its anchor.
    const auto eval_offset = [&](double off_db) {
        LinkBudget b;
        b.tx_power_db = tx_db;
        b.direct_path_offset_db = off_db;
        return median_for_case(layout, pathloss, b, trials, seed, config.threads,
                               kCaseRelayDirect);
    };
    const double off_db =
        bisect_to_target(eval_offset, -80.0, 60.0, target_direct, tol, "direct offset");

    CalibrationResult result;
    result.budget.tx_power_db = tx_db;
    result.budget.noise_power_db = 0.0;
    result.budget.direct_path_offset_db = off_db;
    result.optimized_no_direct_median_db = eval_budget(tx_db);
    result.relay_with_direct_median_db = eval_offset(off_db);
    result.relay_no_direct_median_db = median_for_case(
        layout, pathloss, result.budget, trials, seed, config.threads, kCaseRelayNoDirect);

    ExperimentReport& rep = result.report;
    rep.kind = experiment_kind_name(ExperimentKind::calibrate);
    rep.fingerprint = config.fingerprint();
    rep.seed = seed;
    rep.lines.push_back("tx_power_db = " + fmt(tx_db));
    rep.lines.push_back("noise_power_db = 0");
    rep.lines.push_back("direct_path_offset_db = " + fmt(off_db));
    rep.lines.push_back("optimized_no_direct_median_db = " +
                        fmt(result.optimized_no_direct_median_db));
    rep.lines.push_back("relay_with_direct_median_db = " +
                        fmt(result.relay_with_direct_median_db));
    rep.lines.push_back("relay_no_direct_median_db_prediction = " +
                        fmt(result.relay_no_direct_median_db));

    if (!config.out_dir.empty()) {
        std::string ini;
        ini += "# calibrated link budget (fingerprint " + fingerprint_hex(rep.fingerprint) +
               ", seed " + std::to_string(seed) + ")\n";
        ini += "[budget]\n";
        ini += "tx_power_db = " + fmt(tx_db) + "\n";
        ini += "noise_power_db = 0\n";
        ini += "direct_path_offset_db = " + fmt(off_db) + "\n";
        write_text_file(config.out_dir, "calibrated_budget.ini", ini);
        rep.write(config.out_dir);
    }
    return result;
}

// ---------------------------------------------------------------------------
// CSI phase-error sweep
// ---------------------------------------------------------------------------

const CsiCell& CsiErrorResult::cell(double delta, ErrorPlacement placement,
                                    unsigned bits) const {
    for (const CsiCell& c : cells) {
        if (c.placement == placement && c.bits == bits &&
            std::fabs(c.delta - delta) < 1e-12) {
            return c;
        }
    }
    throw std::out_of_range("csi-error: no such sweep cell");
}

CsiErrorResult run_csi_error(const ExperimentConfig& config) {
    const NodeLayout layout = config.layout();
    const PathLossModel pathloss = config.pathloss();
    const std::vector<double> deltas = config.csi_deltas();
    const std::size_t trials = config.trials();
    const unsigned qbits = config.csi_quantized_bits();
    const std::uint64_t seed = config.seed();

    CsiErrorResult result;
    const ErrorPlacement placements[] = {ErrorPlacement::cascaded, ErrorPlacement::g_only,
                                         ErrorPlacement::h_only};
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        for (std::size_t p = 0; p < 3; ++p) {
            // Both phase modes replay the same stream: identical channels and
            // error draws, so the quantization effect is a paired comparison.
            const RngStream stream(seed, kCsiStreamBase + i * 8 + p);
            for (const unsigned bits : {0u, qbits}) {
                PhaseErrorSpec spec;
                spec.max_mismatch = deltas[i];
                spec.placement = placements[p];
                spec.quantization.bits = bits;
                CsiCell cell;
                cell.delta = deltas[i];
                cell.placement = placements[p];
                cell.bits = bits;
                cell.result = normalized_gain_experiment(layout, pathloss, spec,
                                                         layout.ris_elements, trials, stream);
                result.cells.push_back(cell);
            }
        }
    }

    ExperimentReport& rep = result.report;
    rep.kind = experiment_kind_name(config.kind);
    rep.fingerprint = config.fingerprint();
    rep.seed = seed;
    for (const CsiCell& c : result.cells) {
        rep.lines.push_back("delta_rad=" + fmt(c.delta) +
                            " placement=" + placement_name(c.placement) +
                            " bits=" + std::to_string(c.bits) +
                            " mean_gain=" + fmt(c.result.mean_normalized_gain) +
                            " std=" + fmt(c.result.std_dev));
    }

    if (!config.out_dir.empty()) {
        std::string csv = csv_header_comment(rep);
        csv += "delta_rad,placement,bits,mean_gain,std,trials,seed\n";
        for (const CsiCell& c : result.cells) {
            csv += fmt(c.delta) + "," + placement_name(c.placement) + "," +
                   std::to_string(c.bits) + "," + fmt(c.result.mean_normalized_gain) + "," +
                   fmt(c.result.std_dev) + "," + std::to_string(c.result.trials) + "," +
                   std::to_string(seed) + "\n";
        }
        write_text_file(config.out_dir, "csi_error.csv", csv);
        rep.write(config.out_dir);
    }
    return result;
}

// ---------------------------------------------------------------------------
// policy training
// ---------------------------------------------------------------------------

double Td3Curve::first_moving_avg() const {
    for (const EpisodeLog& log : episodes) {
        if (log.moving_avg) {
            return *log.moving_avg;
        }
    }
    throw std::logic_error("td3 curve shorter than the averaging window");
}

double Td3Curve::final_moving_avg() const {
    for (auto it = episodes.rbegin(); it != episodes.rend(); ++it) {
        if (it->moving_avg) {
            return *it->moving_avg;
        }
    }
    throw std::logic_error("td3 curve shorter than the averaging window");
}

const Td3Curve& Td3TrainResult::curve(RateKind kind, AmplitudeModel::Mode mode) const {
    for (const Td3Curve& c : curves) {
        if (c.rate_kind == kind && c.ris_mode == mode) {
            return c;
        }
    }
    throw std::out_of_range("td3-train: no such curve");
}

Td3TrainResult run_td3(const ExperimentConfig& config) {
    const Td3Config td3cfg = config.td3();
    const std::uint64_t seed = config.seed();
    const unsigned qbits = static_cast<unsigned>(config.map.get_u64("td3", "quantized_bits"));

    Td3TrainResult result;
    for (const AmplitudeModel::Mode mode : config.td3_ris_modes()) {
        for (const RateKind kind : config.td3_rate_kinds()) {
            RisEnvConfig env_cfg;
            env_cfg.layout = config.layout();
            env_cfg.pathloss = config.pathloss();
            env_cfg.budget = config.budget();
            env_cfg.amplitude = config.ris_amplitude();
            env_cfg.amplitude.mode = mode;
            env_cfg.quantization.bits =
                mode == AmplitudeModel::Mode::practical ? qbits : 0;
            env_cfg.fbl = config.fbl();
            env_cfg.reward_kind = kind;
            env_cfg.include_direct = config.td3_include_direct();

            // All four configurations share the channel draw and the training
            // stream, so curves are paired at matched seed.
            RisSumRateEnv env(env_cfg, RngStream(seed, kTd3ChannelStream));
            TrainResult train = td3_train(env, td3cfg, RngStream(seed, kTd3TrainStream));

            Td3Curve curve;
            curve.rate_kind = kind;
            curve.ris_mode = mode;
            curve.bits = env_cfg.quantization.bits;
            curve.episodes = std::move(train.episodes);
            result.curves.push_back(std::move(curve));
        }
    }

    ExperimentReport& rep = result.report;
    rep.kind = experiment_kind_name(config.kind);
    rep.fingerprint = config.fingerprint();
    rep.seed = seed;
    for (const Td3Curve& c : result.curves) {
        const std::string label = rate_kind_name(c.rate_kind) + "_" +
                                  (c.ris_mode == AmplitudeModel::Mode::ideal ? "ideal"
                                                                             : "practical");
        const double first = c.first_moving_avg();
        const double last = c.final_moving_avg();
        rep.lines.push_back("curve=" + label + " first_moving_avg=" + fmt(first) +
                            " final_moving_avg=" + fmt(last) +
                            " gain_percent=" + fmt(100.0 * (last / first - 1.0)));
    }
    for (const std::string& line : kpi_annotations(config.fbl())) {
        rep.lines.push_back(line);
    }

    if (!config.out_dir.empty()) {
        std::string csv = csv_header_comment(rep);
        csv += "episode,sum_rate_bpcu,moving_avg,moving_std,rate_kind,ris_mode,bits\n";
        for (const Td3Curve& c : result.curves) {
            const std::string mode_name =
                c.ris_mode == AmplitudeModel::Mode::ideal ? "ideal" : "practical";
            for (const EpisodeLog& log : c.episodes) {
                csv += std::to_string(log.episode) + "," + fmt(log.sum_rate) + ",";
                csv += log.moving_avg ? fmt(*log.moving_avg) : "";
                csv += ",";
                csv += log.moving_std ? fmt(*log.moving_std) : "";
                csv += "," + rate_kind_name(c.rate_kind) + "," + mode_name + "," +
                       std::to_string(c.bits) + "\n";
            }
        }
        write_text_file(config.out_dir, "td3_curves.csv", csv);
        rep.write(config.out_dir);
    }
    return result;
}

}  // namespace risim
