// SPDX-License-Identifier: Apache-2.0

#include "risim/rate.hpp"

#include <cmath>
#include <stdexcept>

namespace risim {

namespace {

constexpr double kLog2E = 1.4426950408889634074;

// In-place Gauss-Jordan inverse of a small K x K complex matrix with
// partial pivoting. The ZF solve only ever sees K <= M around 4.
CMat invert(CMat a) {
    const std::size_t k = a.rows;
    CMat inv(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        inv.at(i, i) = cd{1.0, 0.0};
    }
    double scale = 0.0;
    for (const cd& v : a.data) {
        scale = std::max(scale, std::abs(v));
    }
    const double tol = scale * 1e-13;
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < k; ++r) {
            if (std::abs(a.at(r, col)) > std::abs(a.at(pivot, col))) {
                pivot = r;
            }
        }
        if (std::abs(a.at(pivot, col)) <= tol) {
            throw SingularChannelError("zero_forcing_precoder: rank-deficient channel");
        }
        if (pivot != col) {
            for (std::size_t c = 0; c < k; ++c) {
                std::swap(a.at(pivot, c), a.at(col, c));
                std::swap(inv.at(pivot, c), inv.at(col, c));
            }
        }
        const cd d = a.at(col, col);
        for (std::size_t c = 0; c < k; ++c) {
            a.at(col, c) /= d;
            inv.at(col, c) /= d;
        }
        for (std::size_t r = 0; r < k; ++r) {
            if (r == col) {
                continue;
            }
            const cd factor = a.at(r, col);
            if (factor == cd{0.0, 0.0}) {
                continue;
            }
            for (std::size_t c = 0; c < k; ++c) {
                a.at(r, c) -= factor * a.at(col, c);
                inv.at(r, c) -= factor * inv.at(col, c);
            }
        }
    }
    return inv;
}

}  // namespace

EffectiveChannelSet EffectiveChannelSet::build(const ChannelRealization& real,
                                               const RisState& ris, bool include_direct) {
    const std::size_t k = real.num_actuators();
    const std::size_t m = real.bs_antennas();
    EffectiveChannelSet set;
    set.rows = CMat(k, m);
    for (std::size_t a = 0; a < k; ++a) {
        const CVec row = effective_row(real, ris, a, include_direct);
        for (std::size_t c = 0; c < m; ++c) {
            set.rows.at(a, c) = row[c];
        }
    }
    return set;
}

CMat zero_forcing_precoder(const EffectiveChannelSet& channels, double total_power) {
    const std::size_t k = channels.num_users();
    const std::size_t m = channels.num_antennas();
    if (k > m) {
        throw std::invalid_argument("zero_forcing_precoder: more users than antennas");
    }
    if (!(total_power > 0.0)) {
        throw std::invalid_argument("zero_forcing_precoder: total power must be > 0");
    }
    const CMat& e = channels.rows;

    // Gram matrix G = E E^H, then W0 = E^H G^{-1} so that E W0 = I.
    CMat gram(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            cd acc{0.0, 0.0};
            for (std::size_t c = 0; c < m; ++c) {
                acc += e.at(i, c) * std::conj(e.at(j, c));
            }
            gram.at(i, j) = acc;
        }
    }
    const CMat ginv = invert(std::move(gram));

    CMat w(m, k);
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < k; ++c) {
            cd acc{0.0, 0.0};
            for (std::size_t j = 0; j < k; ++j) {
                acc += std::conj(e.at(j, r)) * ginv.at(j, c);
            }
            w.at(r, c) = acc;
        }
    }

    // Equal per-user power split.
    const double per_user = total_power / static_cast<double>(k);
    for (std::size_t c = 0; c < k; ++c) {
        double norm2 = 0.0;
        for (std::size_t r = 0; r < m; ++r) {
            norm2 += std::norm(w.at(r, c));
        }
        if (norm2 <= 0.0) {
            throw SingularChannelError("zero_forcing_precoder: degenerate precoder column");
        }
        const double s = std::sqrt(per_user / norm2);
        for (std::size_t r = 0; r < m; ++r) {
            w.at(r, c) *= s;
        }
    }
    return w;
}

std::vector<double> sinr(const EffectiveChannelSet& channels, const CMat& precoder,
                         double noise_power) {
    const std::size_t k = channels.num_users();
    const std::size_t m = channels.num_antennas();
    if (precoder.rows != m || precoder.cols < k) {
        throw std::invalid_argument("sinr: precoder dimensions inconsistent with channels");
    }
    std::vector<double> out(k);
    for (std::size_t u = 0; u < k; ++u) {
        double signal = 0.0;
        double interference = 0.0;
        for (std::size_t j = 0; j < precoder.cols; ++j) {
            cd acc{0.0, 0.0};
            for (std::size_t c = 0; c < m; ++c) {
                acc += channels.rows.at(u, c) * precoder.at(c, j);
            }
            if (j == u) {
                signal = std::norm(acc);
            } else {
                interference += std::norm(acc);
            }
        }
        out[u] = signal / (interference + noise_power);
    }
    return out;
}

double shannon_rate(double gamma) {
    if (gamma < 0.0) {
        throw std::invalid_argument("shannon_rate: negative SINR");
    }
    return std::log2(1.0 + gamma);
}

double fbl_rate(double gamma, const FblParams& params) {
    if (gamma < 0.0) {
        throw std::invalid_argument("fbl_rate: negative SINR");
    }
    if (params.blocklength < 1) {
        throw std::invalid_argument("fbl_rate: blocklength must be >= 1");
    }
    if (gamma == 0.0) {
        return 0.0;
    }
    const double capacity = std::log2(1.0 + gamma);
    const double one = 1.0 + gamma;
    const double dispersion = 1.0 - 1.0 / (one * one);
    const double penalty = std::sqrt(dispersion / static_cast<double>(params.blocklength)) *
                           q_inverse(params.error_target) * kLog2E;
    return std::max(0.0, capacity - penalty);
}

std::string rate_kind_name(RateKind kind) {
    return kind == RateKind::shannon ? "shannon" : "fbl";
}

double sum_rate_reward(const std::vector<double>& sinrs, const FblParams& params,
                       RateKind kind) {
    double sum = 0.0;
    for (const double g : sinrs) {
        sum += kind == RateKind::shannon ? shannon_rate(g) : fbl_rate(g, params);
    }
    return sum;
}

RateReport build_rate_report(const std::vector<double>& sinrs, const FblParams& params,
                             RateKind kind) {
    RateReport rep;
    rep.rows.reserve(sinrs.size());
    for (std::size_t k = 0; k < sinrs.size(); ++k) {
        RateReport::Row row;
        row.actuator = k;
        row.sinr = sinrs[k];
        row.shannon_bpcu = shannon_rate(sinrs[k]);
        row.fbl_bpcu = fbl_rate(sinrs[k], params);
        rep.sum_shannon += row.shannon_bpcu;
        rep.sum_fbl += row.fbl_bpcu;
        rep.rows.push_back(row);
    }
    rep.reward = kind == RateKind::shannon ? rep.sum_shannon : rep.sum_fbl;
    return rep;
}

}  // namespace risim
