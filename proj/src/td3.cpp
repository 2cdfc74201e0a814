// SPDX-License-Identifier: Apache-2.0

#include "risim/td3.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "risim/replay_buffer.hpp"

namespace risim {

void Td3Config::validate() const {
    if (!(tau > 0.0 && tau <= 1.0)) {
        throw std::invalid_argument("Td3Config: tau must be in (0, 1]");
    }
    if (policy_delay < 1) {
        throw std::invalid_argument("Td3Config: policy_delay must be >= 1");
    }
    if (!(discount >= 0.0 && discount <= 1.0)) {
        throw std::invalid_argument("Td3Config: discount must be in [0, 1]");
    }
    if (batch_size == 0 || buffer_capacity < batch_size) {
        throw std::invalid_argument("Td3Config: buffer must hold at least one batch");
    }
    if (episodes == 0 || steps_per_episode == 0) {
        throw std::invalid_argument("Td3Config: episodes and steps must be >= 1");
    }
}

namespace {

Mat stack(const ReplayBuffer& buf, const std::vector<std::size_t>& idx,
          const std::vector<double> Transition::*field, std::size_t width) {
    Mat out(idx.size(), width);
    for (std::size_t r = 0; r < idx.size(); ++r) {
        const auto& v = buf[idx[r]].*field;
        std::copy(v.begin(), v.end(), out.row(r));
    }
    return out;
}

Mat concat_cols(const Mat& a, const Mat& b) {
    Mat out(a.rows, a.cols + b.cols);
    for (std::size_t r = 0; r < a.rows; ++r) {
        std::copy(a.row(r), a.row(r) + a.cols, out.row(r));
        std::copy(b.row(r), b.row(r) + b.cols, out.row(r) + a.cols);
    }
    return out;
}

}  // namespace

TrainResult td3_train(Environment& env, const Td3Config& config, RngStream rng) {
    config.validate();
    const std::size_t sdim = env.state_dim();
    const std::size_t adim = env.action_dim();

    std::vector<std::size_t> actor_sizes{sdim};
    std::vector<std::size_t> critic_sizes{sdim + adim};
    for (const std::size_t h : config.hidden) {
        actor_sizes.push_back(h);
        critic_sizes.push_back(h);
    }
    actor_sizes.push_back(adim);
    critic_sizes.push_back(1);

    RngStream init_rng = rng.substream(1);
    RngStream action_rng = rng.substream(2);
    RngStream update_rng = rng.substream(3);
    RngStream env_rng = rng.substream(4);

    Mlp actor = Mlp::make(actor_sizes, OutputActivation::tanh_bounded, init_rng);
    Mlp critic1 = Mlp::make(critic_sizes, OutputActivation::linear, init_rng);
    Mlp critic2 = Mlp::make(critic_sizes, OutputActivation::linear, init_rng);
    Mlp target_actor = actor;
    Mlp target_critic1 = critic1;
    Mlp target_critic2 = critic2;

    Adam actor_opt;
    actor_opt.lr = config.actor_lr;
    Adam critic1_opt;
    critic1_opt.lr = config.critic_lr;
    Adam critic2_opt;
    critic2_opt.lr = config.critic_lr;

    ReplayBuffer buffer(config.buffer_capacity);
    TrainResult result;
    std::size_t step_count = 0;

    std::vector<double> window;
    window.reserve(config.episodes);

    for (std::size_t ep = 1; ep <= config.episodes; ++ep) {
        std::vector<double> state = env.reset(env_rng);
        double episode_reward = 0.0;

        for (std::size_t st = 1; st <= config.steps_per_episode; ++st) {
            std::vector<double> action(adim);
            if (step_count < config.warmup_steps) {
                for (auto& a : action) {
                    a = 2.0 * action_rng.next_unit() - 1.0;
                }
            } else {
                action = mlp_forward(actor, state);
                for (auto& a : action) {
                    a = std::clamp(a + config.exploration_noise * action_rng.next_normal(),
                                   -1.0, 1.0);
                }
            }

            Environment::Step out = env.step(action, env_rng);
            if (!std::isfinite(out.reward)) {
                throw std::runtime_error("td3_train: non-finite reward, aborting");
            }
            const bool done = out.done || st == config.steps_per_episode;
            buffer.push({state, action, out.reward, out.next_state, done});
            episode_reward += out.reward;
            state = std::move(out.next_state);
            ++step_count;

            // Critic regression runs as soon as one batch is buffered, so by
            // the end of the warmup the critics are fit on broad uniform
            // action-space coverage. The actor is held back until then:
            // updating it against a half-trained critic commits the policy
            // to saturated outputs it cannot recover from.
            if (buffer.size() < config.batch_size) {
                continue;
            }

            // ---- critic update ----
            const auto idx = buffer.sample_indices(config.batch_size, update_rng);
            const std::size_t b = idx.size();
            Mat states = stack(buffer, idx, &Transition::state, sdim);
            Mat actions = stack(buffer, idx, &Transition::action, adim);
            Mat next_states = stack(buffer, idx, &Transition::next_state, sdim);

            Mat next_actions = mlp_forward_batch(target_actor, next_states);
            for (auto& a : next_actions.data) {
                const double noise =
                    std::clamp(config.target_noise * update_rng.next_normal(),
                               -config.noise_clip, config.noise_clip);
                a = std::clamp(a + noise, -1.0, 1.0);
            }
            const Mat next_sa = concat_cols(next_states, next_actions);
            const Mat tq1 = mlp_forward_batch(target_critic1, next_sa);
            const Mat tq2 = mlp_forward_batch(target_critic2, next_sa);

            std::vector<double> targets(b);
            for (std::size_t r = 0; r < b; ++r) {
                const Transition& tr = buffer[idx[r]];
                const double bootstrap = std::min(tq1.at(r, 0), tq2.at(r, 0));
                targets[r] =
                    tr.reward + config.discount * (tr.done ? 0.0 : 1.0) * bootstrap;
            }

            const Mat sa = concat_cols(states, actions);
            for (Mlp* critic : {&critic1, &critic2}) {
                MlpCache cache;
                const Mat q = mlp_forward_batch(*critic, sa, &cache);
                Mat dq(b, 1);
                for (std::size_t r = 0; r < b; ++r) {
                    dq.at(r, 0) = 2.0 * (q.at(r, 0) - targets[r]) / static_cast<double>(b);
                }
                MlpGrads grads;
                mlp_backward_batch(*critic, cache, dq, grads);
                (critic == &critic1 ? critic1_opt : critic2_opt).step(*critic, grads);
            }
            ++result.critic_updates;

            polyak_update(target_critic1, critic1, config.tau);
            polyak_update(target_critic2, critic2, config.tau);

            if (step_count <= config.warmup_steps ||
                result.critic_updates % config.policy_delay != 0) {
                continue;
            }

            // ---- delayed actor update: ascend critic1(s, actor(s)) ----
            MlpCache actor_cache;
            const Mat policy_actions = mlp_forward_batch(actor, states, &actor_cache);
            const Mat policy_sa = concat_cols(states, policy_actions);
            MlpCache critic_cache;
            mlp_forward_batch(critic1, policy_sa, &critic_cache);
            Mat dq(b, 1);
            for (auto& v : dq.data) {
                v = -1.0 / static_cast<double>(b);
            }
            MlpGrads critic_grads;  // discarded; only the input gradient matters
            const Mat dsa = mlp_backward_batch(critic1, critic_cache, dq, critic_grads);
            Mat dactions(b, adim);
            for (std::size_t r = 0; r < b; ++r) {
                std::copy(dsa.row(r) + sdim, dsa.row(r) + sdim + adim, dactions.row(r));
            }
            MlpGrads actor_grads;
            mlp_backward_batch(actor, actor_cache, dactions, actor_grads);
            actor_opt.step(actor, actor_grads);
            ++result.actor_updates;

            polyak_update(target_actor, actor, config.tau);
        }

        EpisodeLog log;
        log.episode = ep;
        log.sum_rate = episode_reward / static_cast<double>(config.steps_per_episode);
        window.push_back(log.sum_rate);
        if (window.size() >= kEpisodeWindow) {
            double mean = 0.0;
            for (std::size_t i = window.size() - kEpisodeWindow; i < window.size(); ++i) {
                mean += window[i];
            }
            mean /= static_cast<double>(kEpisodeWindow);
            double var = 0.0;
            for (std::size_t i = window.size() - kEpisodeWindow; i < window.size(); ++i) {
                var += (window[i] - mean) * (window[i] - mean);
            }
            var /= static_cast<double>(kEpisodeWindow);
            log.moving_avg = mean;
            log.moving_std = std::sqrt(var);
        }
        result.episodes.push_back(log);
    }

    result.actor = std::move(actor);
    return result;
}

}  // namespace risim
