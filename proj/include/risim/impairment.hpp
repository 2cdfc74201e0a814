// SPDX-License-Identifier: Apache-2.0
//
// Imperfect-CSI phase errors and the normalized cascade-gain experiment.

#pragma once

#include <cstddef>

#include "risim/channel.hpp"
#include "risim/ris.hpp"

namespace risim {

/// Where the estimation error lands. A cascaded estimate perturbs the set
/// phase directly; a single-segment estimate perturbs that segment's phase
/// term inside theta = -(xi + zeta). Either way one U(0, delta) term enters
/// each summand.
enum class ErrorPlacement { cascaded, g_only, h_only };

struct PhaseErrorSpec {
    double max_mismatch = 0.0;  // delta, radians
    ErrorPlacement placement = ErrorPlacement::cascaded;
    QuantizationSpec quantization;  // phase mode of the affected surface
};

/// Apply per-element errors eps_n ~ U(0, delta) to the state's phase
/// estimates, then re-quantize under the state's own spec. The input state
/// is expected to hold the perfect-CSI estimates.
RisState apply_phase_error(const RisState& ris, const PhaseErrorSpec& spec, RngStream& rng);

struct NormalizedGainResult {
    double mean_normalized_gain = 0.0;
    double std_dev = 0.0;
    std::size_t trials = 0;
    double delta = 0.0;
};

/// Mean over trials of |cascade(erred)|^2 / |cascade(ideal)|^2, where the
/// ideal state uses the same phase mode without estimation error (quantized
/// runs are normalized by the quantized perfect-CSI case). Consumes a fixed
/// number of draws per trial, so two calls with equal streams see identical
/// channels and errors regardless of phase mode.
NormalizedGainResult normalized_gain_experiment(const NodeLayout& layout,
                                                const PathLossModel& model,
                                                const PhaseErrorSpec& spec,
                                                std::size_t n_elements, std::size_t trials,
                                                RngStream rng);

}  // namespace risim
