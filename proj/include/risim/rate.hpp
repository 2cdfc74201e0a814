// SPDX-License-Identifier: Apache-2.0
//
// Metric layer: multiuser zero-forcing precoding, SINR, Shannon and
// finite-blocklength rates, and the sum-rate reward.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "risim/numerics.hpp"
#include "risim/ris.hpp"

namespace risim {

struct SingularChannelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Short-packet regime parameters: blocklength in channel uses and decoding
/// error target embedded into the rate penalty.
struct FblParams {
    unsigned blocklength = 20;
    double error_target = 1e-6;
};

/// Per-actuator effective downlink rows e_k = f_k + cascade_k, K x M.
struct EffectiveChannelSet {
    CMat rows;

    static EffectiveChannelSet build(const ChannelRealization& real, const RisState& ris,
                                     bool include_direct);
    std::size_t num_users() const { return rows.rows; }
    std::size_t num_antennas() const { return rows.cols; }
};

/// Pseudo-inverse zero-forcing precoder (M x K), columns scaled to equal
/// per-user power summing to total_power. Cross terms e_k * w_j vanish for
/// j != k. Throws SingularChannelError on a rank-deficient channel.
CMat zero_forcing_precoder(const EffectiveChannelSet& channels, double total_power);

/// SINR_k = |e_k w_k|^2 / (sum_{j != k} |e_k w_j|^2 + noise_power).
std::vector<double> sinr(const EffectiveChannelSet& channels, const CMat& precoder,
                         double noise_power);

/// log2(1 + gamma), bits per channel use.
double shannon_rate(double gamma);

/// Normal-approximation achievable rate max(0, C - sqrt(V/n) Q^-1(eps) log2 e)
/// with dispersion V = 1 - (1+gamma)^-2.
double fbl_rate(double gamma, const FblParams& params);

enum class RateKind { shannon, fbl };

std::string rate_kind_name(RateKind kind);

/// Sum over users of the chosen rate; the reliability target enters through
/// the epsilon embedded in the finite-blocklength penalty.
double sum_rate_reward(const std::vector<double>& sinrs, const FblParams& params, RateKind kind);

struct RateReport {
    struct Row {
        std::size_t actuator = 0;
        double sinr = 0.0;  // linear
        double shannon_bpcu = 0.0;
        double fbl_bpcu = 0.0;
    };
    std::vector<Row> rows;
    double sum_shannon = 0.0;
    double sum_fbl = 0.0;
    double reward = 0.0;
};

RateReport build_rate_report(const std::vector<double>& sinrs, const FblParams& params,
                             RateKind kind);

}  // namespace risim
