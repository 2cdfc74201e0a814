// SPDX-License-Identifier: Apache-2.0

#include "risim/ris_env.hpp"

#include <cmath>
#include <stdexcept>

namespace risim {

std::vector<double> phases_from_action(const std::vector<double>& action,
                                       const QuantizationSpec& quant) {
    std::vector<double> est(action.size());
    for (std::size_t i = 0; i < action.size(); ++i) {
        est[i] = wrap_phase((action[i] + 1.0) * 0.5 * kTau);
    }
    return quantize_phases(est, quant);
}

RisSumRateEnv::RisSumRateEnv(RisEnvConfig config, RngStream channel_rng)
    : config_(std::move(config)),
      realization_(sample_realization(config_.layout, config_.pathloss, config_.budget,
                                      channel_rng)) {
    if (config_.layout.num_actuators() > config_.layout.bs_antennas) {
        throw std::invalid_argument("RisSumRateEnv: zero-forcing needs K <= M");
    }
}

std::size_t RisSumRateEnv::state_dim() const {
    return config_.layout.ris_elements + config_.layout.num_actuators();
}

std::size_t RisSumRateEnv::action_dim() const {
    return config_.layout.ris_elements;
}

std::vector<double> RisSumRateEnv::reset(RngStream&) {
    return std::vector<double>(state_dim(), 0.0);
}

Environment::Step RisSumRateEnv::step(const std::vector<double>& action, RngStream&) {
    if (action.size() != action_dim()) {
        throw std::invalid_argument("RisSumRateEnv::step: wrong action length");
    }
    // Continuous action-to-phase map; the state applies the configured
    // quantizer to the commanded estimates.
    const RisState ris = RisState::from_estimates(
        phases_from_action(action, QuantizationSpec{}), config_.amplitude,
        config_.quantization);
    const auto channels = EffectiveChannelSet::build(realization_, ris, config_.include_direct);
    const CMat precoder = zero_forcing_precoder(channels, config_.budget.tx_power());
    const std::vector<double> sinrs = sinr(channels, precoder, config_.budget.noise_power());

    const std::size_t k = sinrs.size();
    Step out;
    out.next_state.assign(state_dim(), 0.0);
    std::copy(action.begin(), action.end(), out.next_state.begin());

    last_sum_shannon_ = 0.0;
    last_sum_fbl_ = 0.0;
    for (std::size_t u = 0; u < k; ++u) {
        const double sh = shannon_rate(sinrs[u]);
        const double fb = fbl_rate(sinrs[u], config_.fbl);
        last_sum_shannon_ += sh;
        last_sum_fbl_ += fb;
        const double observed = config_.reward_kind == RateKind::shannon ? sh : fb;
        out.next_state[action.size() + u] = kRateScale * observed;
    }
    out.reward =
        config_.reward_kind == RateKind::shannon ? last_sum_shannon_ : last_sum_fbl_;
    out.done = false;
    return out;
}

}  // namespace risim
