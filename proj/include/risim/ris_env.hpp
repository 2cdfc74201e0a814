// SPDX-License-Identifier: Apache-2.0
//
// The multi-actuator downlink environment the agent controls: actions are
// mapped to (quantized) element phases, reward is the zero-forcing sum rate.

#pragma once

#include <cstddef>
#include <vector>

#include "risim/channel.hpp"
#include "risim/rate.hpp"
#include "risim/ris.hpp"
#include "risim/td3.hpp"

namespace risim {

/// Affine map [-1, 1] -> (0, 2*pi], then the quantizer when bits > 0.
std::vector<double> phases_from_action(const std::vector<double>& action,
                                       const QuantizationSpec& quant);

struct RisEnvConfig {
    NodeLayout layout;
    PathLossModel pathloss;
    LinkBudget budget;
    AmplitudeModel amplitude;
    QuantizationSpec quantization;
    FblParams fbl;
    RateKind reward_kind = RateKind::fbl;
    bool include_direct = false;
};

/// Quasi-static control task: the channel is drawn once per environment
/// lifetime (one training run optimizes the surface for that realization).
/// State is the previous action concatenated with the previous per-actuator
/// rates.
class RisSumRateEnv : public Environment {
  public:
    RisSumRateEnv(RisEnvConfig config, RngStream channel_rng);

    std::size_t state_dim() const override;
    std::size_t action_dim() const override;
    std::vector<double> reset(RngStream& rng) override;
    Step step(const std::vector<double>& action, RngStream& rng) override;

    /// Sum rates of the most recent step, independent of the reward kind.
    double last_sum_shannon() const { return last_sum_shannon_; }
    double last_sum_fbl() const { return last_sum_fbl_; }
    const ChannelRealization& realization() const { return realization_; }

  private:
    RisEnvConfig config_;
    ChannelRealization realization_;
    double last_sum_shannon_ = 0.0;
    double last_sum_fbl_ = 0.0;

    static constexpr double kRateScale = 0.1;  // keeps rate features near [0, 1]
};

}  // namespace risim
