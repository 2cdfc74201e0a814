// SPDX-License-Identifier: Apache-2.0
//
// The reflecting surface: per-element phase state, the phase-dependent
// amplitude response, phase quantization, and the end-to-end cascade of the
// received-signal model. Per-element reflection is beta_n(theta_n) *
// exp(i*theta_n); a cascade summand for element n is g_n * beta_n *
// exp(i*theta_n) * h_n, so the aligning phase is -(arg g_n + arg h_n).

#pragma once

#include <cstddef>
#include <vector>

#include "risim/channel.hpp"
#include "risim/numerics.hpp"

namespace risim {

struct DegenerateChannelError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

constexpr double kTau = 6.283185307179586476925286766559;  // 2*pi

/// Wrap an angle into (0, 2*pi].
double wrap_phase(double theta);

/// Phase-dependent element amplitude. Practical mode follows the empirical
/// circuit response (1-b_min)*((sin(theta-phi)+1)/2)^alpha + b_min; ideal
/// mode reflects losslessly.
struct AmplitudeModel {
    enum class Mode { ideal, practical };
    Mode mode = Mode::ideal;
    double beta_min = 0.8;
    double phi = 1.3508848;  // 0.43*pi
    double alpha = 1.6;
};

double amplitude(const AmplitudeModel& model, double theta);

/// b-bit uniform phase grid {2*pi*k / 2^b : k = 1..2^b}; bits == 0 means
/// continuous phases.
struct QuantizationSpec {
    unsigned bits = 0;

    bool continuous() const { return bits == 0; }
    std::vector<double> levels() const;
};

/// Nearest level in circular distance; ties break toward the smaller level.
double quantize_phase(double theta, const QuantizationSpec& spec);
std::vector<double> quantize_phases(const std::vector<double>& phases,
                                    const QuantizationSpec& spec);

/// Surface state. `estimates` holds the commanded (pre-quantization) phases;
/// `phases` the realized ones actually applied by the hardware (equal to the
/// estimates when the spec is continuous).
struct RisState {
    std::vector<double> estimates;
    std::vector<double> phases;
    AmplitudeModel amplitude_model;
    QuantizationSpec quantization;

    static RisState from_estimates(std::vector<double> estimates, const AmplitudeModel& amp,
                                   const QuantizationSpec& quant);
    std::size_t size() const { return phases.size(); }
    /// Realized per-element reflection coefficient beta_n * exp(i*theta_n).
    cd reflection(std::size_t n) const;
};

/// All-elements-aligned phases: theta_n = ref - (arg g_n + arg h_n), wrapped.
/// With beta == 1 this makes every cascade summand real non-negative (ref =
/// 0) or aligned with exp(i*ref), which is how the direct path is matched
/// when one is present.
std::vector<double> optimal_phases(const CVec& g, const CVec& h, double reference_phase = 0.0);

/// Static-reflection ("relay") state: all phase shifts zero.
RisState relay_state(std::size_t n, const AmplitudeModel& amp, const QuantizationSpec& quant);

/// Cascade sum over elements for explicit per-element channels.
cd cascade_sum(const CVec& g, const RisState& ris, const CVec& h);

/// Cascade row for actuator k against all BS antennas: length-M vector with
/// entries sum_n g_k[n] * reflection(n) * H[n][m].
CVec cascade_response(const ChannelRealization& real, const RisState& ris, std::size_t actuator);

/// Direct-plus-cascade effective row f_k + cascade_k (direct omitted when
/// include_direct is false).
CVec effective_row(const ChannelRealization& real, const RisState& ris, std::size_t actuator,
                   bool include_direct);

/// Squared magnitude of the effective row; for a single BS antenna this is
/// |f + cascade|^2 of the received-signal model.
double received_signal_power(const ChannelRealization& real, const RisState& ris,
                             std::size_t actuator, bool include_direct);

}  // namespace risim
