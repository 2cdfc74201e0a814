// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "risim/mlp.hpp"
#include "risim/replay_buffer.hpp"
#include "risim/ris_env.hpp"
#include "risim/td3.hpp"

using namespace risim;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Scalar objective for gradient checking: L = sum(upstream .* output).
double scalar_loss(const Mlp& net, const std::vector<double>& input,
                   const std::vector<double>& upstream) {
    const auto out = mlp_forward(net, input);
    double l = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        l += upstream[i] * out[i];
    }
    return l;
}

// Stateless 1-D quadratic bandit with optimum at a = 0.5.
class QuadraticEnv : public Environment {
  public:
    std::size_t state_dim() const override { return 1; }
    std::size_t action_dim() const override { return 1; }
    std::vector<double> reset(RngStream&) override { return {0.0}; }
    Step step(const std::vector<double>& action, RngStream&) override {
        Step s;
        s.next_state = {0.0};
        const double d = action[0] - 0.5;
        s.reward = -d * d;
        s.done = false;
        return s;
    }
};

Td3Config toy_config() {
    Td3Config c;
    c.hidden = {32, 32};
    c.batch_size = 32;
    c.buffer_capacity = 10000;
    c.episodes = 200;
    c.steps_per_episode = 25;
    c.warmup_steps = 500;
    return c;
}

}  // namespace

TEST_CASE("mlp forward basics") {
    RngStream rng(1, 0);
    Mlp net = Mlp::make({2, 3, 2}, OutputActivation::linear, rng);
    for (auto& w : net.weights) {
        for (auto& v : w.data) {
            v = 0.0;
        }
    }
    const auto out = mlp_forward(net, {0.7, -0.3});
    CHECK(out[0] == doctest::Approx(0.0));
    CHECK(out[1] == doctest::Approx(0.0));

    // 1x1 linear net computes w*x + b.
    Mlp lin = Mlp::make({1, 1}, OutputActivation::linear, rng);
    lin.weights[0].at(0, 0) = 2.5;
    lin.biases[0][0] = -0.75;
    CHECK(mlp_forward(lin, {2.0})[0] == doctest::Approx(4.25));

    // Bounded outputs stay finite (and inside [-1, 1]) for wild inputs.
    Mlp bounded = Mlp::make({4, 16, 3}, OutputActivation::tanh_bounded, rng);
    const auto b = mlp_forward(bounded, {1e3, -1e3, 42.0, -0.1});
    for (const double v : b) {
        CHECK(std::isfinite(v));
        CHECK(std::fabs(v) <= 1.0);
    }
}

TEST_CASE("mlp rejects shape mismatches") {
    RngStream rng(2, 0);
    const Mlp net = Mlp::make({3, 4, 2}, OutputActivation::linear, rng);
    CHECK_THROWS_AS(mlp_forward(net, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("backprop gradients match central finite differences") {
    RngStream rng(3, 0);
    for (const OutputActivation out_act :
         {OutputActivation::linear, OutputActivation::tanh_bounded}) {
        Mlp net = Mlp::make({3, 8, 5, 2}, out_act, rng);
        std::vector<double> input{0.3, -0.9, 0.45};
        std::vector<double> upstream{0.7, -1.3};
        const MlpGrads grads = mlp_backward(net, input, upstream);

        const double step = 1e-5;
        double max_rel = 0.0;
        for (std::size_t l = 0; l < net.num_layers(); ++l) {
            for (std::size_t i = 0; i < net.weights[l].data.size(); ++i) {
                const double saved = net.weights[l].data[i];
                net.weights[l].data[i] = saved + step;
                const double up = scalar_loss(net, input, upstream);
                net.weights[l].data[i] = saved - step;
                const double down = scalar_loss(net, input, upstream);
                net.weights[l].data[i] = saved;
                const double fd = (up - down) / (2.0 * step);
                const double an = grads.weights[l].data[i];
                const double rel =
                    std::fabs(fd - an) / std::max({std::fabs(fd), std::fabs(an), 1e-8});
                max_rel = std::max(max_rel, rel);
            }
            for (std::size_t i = 0; i < net.biases[l].size(); ++i) {
                const double saved = net.biases[l][i];
                net.biases[l][i] = saved + step;
                const double up = scalar_loss(net, input, upstream);
                net.biases[l][i] = saved - step;
                const double down = scalar_loss(net, input, upstream);
                net.biases[l][i] = saved;
                const double fd = (up - down) / (2.0 * step);
                const double an = grads.biases[l][i];
                const double rel =
                    std::fabs(fd - an) / std::max({std::fabs(fd), std::fabs(an), 1e-8});
                max_rel = std::max(max_rel, rel);
            }
        }
        CHECK(max_rel < 1e-4);
    }
}

TEST_CASE("linear net gradient is the input outer product") {
    RngStream rng(4, 0);
    Mlp net = Mlp::make({3, 2}, OutputActivation::linear, rng);
    const std::vector<double> input{0.2, -1.1, 0.8};
    const std::vector<double> upstream{2.0, -0.5};
    const MlpGrads grads = mlp_backward(net, input, upstream);
    for (std::size_t o = 0; o < 2; ++o) {
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(grads.weights[0].at(o, i) == doctest::Approx(upstream[o] * input[i]));
        }
        CHECK(grads.biases[0][o] == doctest::Approx(upstream[o]));
    }
}

TEST_CASE("zero upstream gradient zeroes all parameter gradients") {
    RngStream rng(5, 0);
    const Mlp net = Mlp::make({4, 6, 3}, OutputActivation::tanh_bounded, rng);
    const MlpGrads grads = mlp_backward(net, {0.1, 0.2, 0.3, 0.4}, {0.0, 0.0, 0.0});
    for (const auto& w : grads.weights) {
        for (const double v : w.data) {
            CHECK(v == 0.0);
        }
    }
}

TEST_CASE("input gradient matches finite differences") {
    RngStream rng(6, 0);
    const Mlp net = Mlp::make({3, 8, 2}, OutputActivation::tanh_bounded, rng);
    std::vector<double> input{0.25, -0.4, 0.9};
    const std::vector<double> upstream{1.0, 0.5};

    Mat x(1, 3);
    x.data = input;
    MlpCache cache;
    mlp_forward_batch(net, x, &cache);
    Mat up(1, 2);
    up.data = upstream;
    MlpGrads grads;
    const Mat dx = mlp_backward_batch(net, cache, up, grads);

    const double step = 1e-6;
    for (std::size_t i = 0; i < input.size(); ++i) {
        auto probe = input;
        probe[i] = input[i] + step;
        const double upv = scalar_loss(net, probe, upstream);
        probe[i] = input[i] - step;
        const double downv = scalar_loss(net, probe, upstream);
        const double fd = (upv - downv) / (2.0 * step);
        CHECK(dx.at(0, i) == doctest::Approx(fd).epsilon(1e-4));
    }
}

TEST_CASE("polyak update is the stated convex combination") {
    RngStream rng(7, 0);
    Mlp online = Mlp::make({2, 4, 1}, OutputActivation::linear, rng);
    Mlp target = Mlp::make({2, 4, 1}, OutputActivation::linear, rng);
    const Mlp before = target;
    const double tau = 0.25;
    polyak_update(target, online, tau);
    for (std::size_t l = 0; l < target.num_layers(); ++l) {
        for (std::size_t i = 0; i < target.weights[l].data.size(); ++i) {
            const double expected = tau * online.weights[l].data[i] +
                                    (1.0 - tau) * before.weights[l].data[i];
            CHECK(target.weights[l].data[i] == doctest::Approx(expected).epsilon(1e-15));
        }
    }
    // tau = 1 copies the online network.
    polyak_update(target, online, 1.0);
    for (std::size_t l = 0; l < target.num_layers(); ++l) {
        CHECK(target.weights[l].data == online.weights[l].data);
        CHECK(target.biases[l] == online.biases[l]);
    }
}

TEST_CASE("replay buffer honors capacity with FIFO eviction") {
    ReplayBuffer buf(8);
    for (int i = 0; i < 11; ++i) {
        buf.push({{double(i)}, {0.0}, double(i), {0.0}, false});
    }
    CHECK(buf.size() == 8);
    // Oldest three evicted: oldest remaining is 3.
    CHECK(buf.at(0).reward == doctest::Approx(3.0));
    CHECK(buf.at(7).reward == doctest::Approx(10.0));
}

TEST_CASE("replay sampling is without replacement and in range") {
    ReplayBuffer buf(64);
    for (int i = 0; i < 40; ++i) {
        buf.push({{double(i)}, {0.0}, double(i), {0.0}, false});
    }
    RngStream rng(8, 0);
    for (int round = 0; round < 20; ++round) {
        const auto idx = buf.sample_indices(16, rng);
        CHECK(idx.size() == 16);
        std::vector<bool> seen(buf.size(), false);
        for (const std::size_t j : idx) {
            CHECK(j < buf.size());
            CHECK(!seen[j]);
            seen[j] = true;
        }
    }
    CHECK_THROWS_AS(buf.sample_indices(41, rng), std::invalid_argument);
}

TEST_CASE("phases_from_action affine map and quantized codomain") {
    QuantizationSpec cont;
    const auto mid = phases_from_action({0.0, 0.0}, cont);
    CHECK(mid[0] == doctest::Approx(kPi));
    const auto hi = phases_from_action({1.0}, cont);
    CHECK(hi[0] == doctest::Approx(kTau));
    const auto lo = phases_from_action({-1.0}, cont);
    CHECK(lo[0] == doctest::Approx(kTau));  // wraps into (0, 2*pi]

    QuantizationSpec q2;
    q2.bits = 2;
    CHECK(phases_from_action({0.0}, q2)[0] == doctest::Approx(kPi));
    RngStream rng(9, 0);
    const auto levels = q2.levels();
    for (int t = 0; t < 200; ++t) {
        std::vector<double> a(4);
        for (auto& v : a) {
            v = 2.0 * rng.next_unit() - 1.0;
        }
        for (const double p : phases_from_action(a, q2)) {
            bool on_grid = false;
            for (const double l : levels) {
                on_grid = on_grid || std::fabs(p - l) < 1e-12;
            }
            CHECK(on_grid);
        }
    }
}

TEST_CASE("td3 actor/critic update cadence follows the policy delay") {
    QuadraticEnv env;
    Td3Config c = toy_config();
    c.batch_size = 5;
    c.warmup_steps = 4;
    c.episodes = 26;
    c.steps_per_episode = 4;  // 104 steps; critic updates on steps 5..104
    c.policy_delay = 2;
    const TrainResult r = td3_train(env, c, RngStream(10, 0));
    CHECK(r.critic_updates == 100);
    CHECK(r.actor_updates == 50);

    Td3Config c3 = c;
    c3.policy_delay = 4;
    const TrainResult r4 = td3_train(env, c3, RngStream(10, 0));
    CHECK(r4.critic_updates == 100);
    CHECK(r4.actor_updates == 25);
}

TEST_CASE("td3 learns the 1-D quadratic optimum") {
    QuadraticEnv env;
    const Td3Config c = toy_config();
    const TrainResult r = td3_train(env, c, RngStream(11, 0));
    const auto a = mlp_forward(r.actor, {0.0});
    CHECK(std::fabs(a[0] - 0.5) < 0.05);
    // Learning curve improved over the run.
    CHECK(r.episodes.back().moving_avg.value() > r.episodes[49].moving_avg.value());
}

TEST_CASE("td3 training is reproducible from (config, seed)") {
    QuadraticEnv env1, env2;
    Td3Config c = toy_config();
    c.episodes = 60;
    const TrainResult a = td3_train(env1, c, RngStream(12, 0));
    const TrainResult b = td3_train(env2, c, RngStream(12, 0));
    REQUIRE(a.episodes.size() == b.episodes.size());
    for (std::size_t i = 0; i < a.episodes.size(); ++i) {
        CHECK(a.episodes[i].sum_rate == b.episodes[i].sum_rate);
    }
}

TEST_CASE("episode moving stats appear exactly at the window size") {
    QuadraticEnv env;
    Td3Config c = toy_config();
    c.episodes = 60;
    const TrainResult r = td3_train(env, c, RngStream(13, 0));
    for (const EpisodeLog& log : r.episodes) {
        if (log.episode < kEpisodeWindow) {
            CHECK(!log.moving_avg.has_value());
        } else {
            CHECK(log.moving_avg.has_value());
            CHECK(log.moving_std.has_value());
            CHECK(*log.moving_std >= 0.0);
        }
    }
}

TEST_CASE("td3 config validation") {
    Td3Config c;
    c.tau = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = Td3Config{};
    c.policy_delay = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = Td3Config{};
    c.discount = 1.5;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = Td3Config{};
    c.buffer_capacity = 16;
    c.batch_size = 32;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("ris environment state layout and reward kinds") {
    NodeLayout layout;
    layout.bs = {75, 75};
    layout.ris = {150, 150};
    layout.actuators = {{135, 105}, {105, 135}, {120, 90}, {90, 120}};
    layout.bs_antennas = 4;
    layout.ris_elements = 16;

    RisEnvConfig cfg;
    cfg.layout = layout;
    cfg.budget.tx_power_db = 215.0;
    cfg.reward_kind = RateKind::fbl;
    RisSumRateEnv env(cfg, RngStream(14, 0));
    CHECK(env.state_dim() == 20);
    CHECK(env.action_dim() == 16);

    RngStream rng(15, 0);
    auto state = env.reset(rng);
    CHECK(state.size() == 20);
    std::vector<double> action(16, 0.25);
    const auto out = env.step(action, rng);
    CHECK(out.next_state.size() == 20);
    for (std::size_t i = 0; i < 16; ++i) {
        CHECK(out.next_state[i] == doctest::Approx(action[i]));
    }
    CHECK(out.reward == doctest::Approx(env.last_sum_fbl()));
    CHECK(env.last_sum_fbl() <= env.last_sum_shannon());
    CHECK(out.reward >= 0.0);

    // Same channel stream, same action: identical reward, and the shannon
    // reward kind picks the other metric.
    RisEnvConfig cfg2 = cfg;
    cfg2.reward_kind = RateKind::shannon;
    RisSumRateEnv env2(cfg2, RngStream(14, 0));
    env2.reset(rng);
    const auto out2 = env2.step(action, rng);
    CHECK(out2.reward == doctest::Approx(env2.last_sum_shannon()));
    CHECK(env2.last_sum_fbl() == doctest::Approx(env.last_sum_fbl()));
}
