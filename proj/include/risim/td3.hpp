// SPDX-License-Identifier: Apache-2.0
//
// Twin-delayed deterministic policy gradient: twin critics regressed on the
// min of noise-smoothed target critics, delayed actor updates, Polyak target
// tracking. Training is a single logical thread and fully reproducible from
// (config, seed).

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "risim/mlp.hpp"
#include "risim/numerics.hpp"

namespace risim {

struct Td3Config {
    double actor_lr = 1e-3;
    double critic_lr = 1e-3;
    double tau = 0.005;
    std::size_t policy_delay = 2;
    double discount = 0.0;  // the per-step sum rate is the stateless objective
    double exploration_noise = 0.1;
    double target_noise = 0.2;
    double noise_clip = 0.5;
    std::size_t batch_size = 128;
    std::size_t buffer_capacity = 100000;
    std::size_t episodes = 400;
    std::size_t steps_per_episode = 10;
    std::size_t warmup_steps = 500;  // uniform random actions, no updates
    std::vector<std::size_t> hidden{256, 256};

    void validate() const;
};

struct EpisodeLog {
    std::size_t episode = 0;  // 1-based
    double sum_rate = 0.0;    // mean step reward of the episode
    std::optional<double> moving_avg;  // defined once >= window episodes exist
    std::optional<double> moving_std;
};

/// Window of the trailing statistics attached to each episode.
constexpr std::size_t kEpisodeWindow = 50;

/// Continuous-control environment with actions in [-1, 1]^action_dim.
class Environment {
  public:
    virtual ~Environment() = default;
    virtual std::size_t state_dim() const = 0;
    virtual std::size_t action_dim() const = 0;
    virtual std::vector<double> reset(RngStream& rng) = 0;

    struct Step {
        std::vector<double> next_state;
        double reward = 0.0;
        bool done = false;
    };
    virtual Step step(const std::vector<double>& action, RngStream& rng) = 0;
};

struct TrainResult {
    std::vector<EpisodeLog> episodes;
    std::size_t critic_updates = 0;
    std::size_t actor_updates = 0;
    Mlp actor;  // trained policy
};

TrainResult td3_train(Environment& env, const Td3Config& config, RngStream rng);

}  // namespace risim
