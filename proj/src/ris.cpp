// SPDX-License-Identifier: Apache-2.0

#include "risim/ris.hpp"

#include <cmath>
#include <stdexcept>

namespace risim {

double wrap_phase(double theta) {
    double w = std::fmod(theta, kTau);
    if (w <= 0.0) {
        w += kTau;
    }
    return w;
}

double amplitude(const AmplitudeModel& model, double theta) {
    if (model.mode == AmplitudeModel::Mode::ideal) {
        return 1.0;
    }
    if (!(model.alpha > 0.0)) {
        throw std::invalid_argument("amplitude: practical mode requires alpha > 0");
    }
    const double s = (std::sin(theta - model.phi) + 1.0) * 0.5;
    return (1.0 - model.beta_min) * std::pow(s, model.alpha) + model.beta_min;
}

std::vector<double> QuantizationSpec::levels() const {
    const std::size_t count = std::size_t{1} << bits;
    std::vector<double> ls(count);
    for (std::size_t k = 1; k <= count; ++k) {
        ls[k - 1] = kTau * static_cast<double>(k) / static_cast<double>(count);
    }
    return ls;
}

double quantize_phase(double theta, const QuantizationSpec& spec) {
    if (spec.continuous()) {
        return wrap_phase(theta);
    }
    const double t = wrap_phase(theta);
    const auto ls = spec.levels();
    // Keep the smallest level on (near-)ties: only a strictly smaller
    // circular distance replaces the current best.
    constexpr double kTieEps = 1e-12;
    double best = ls.front();
    double best_d = kTau;
    for (const double level : ls) {
        double d = std::fabs(t - level);
        d = std::min(d, kTau - d);
        if (d < best_d - kTieEps) {
            best_d = d;
            best = level;
        }
    }
    return best;
}

std::vector<double> quantize_phases(const std::vector<double>& phases,
                                    const QuantizationSpec& spec) {
    std::vector<double> out(phases.size());
    for (std::size_t i = 0; i < phases.size(); ++i) {
        out[i] = quantize_phase(phases[i], spec);
    }
    return out;
}

RisState RisState::from_estimates(std::vector<double> estimates, const AmplitudeModel& amp,
                                  const QuantizationSpec& quant) {
    RisState s;
    s.estimates.reserve(estimates.size());
    for (const double e : estimates) {
        s.estimates.push_back(wrap_phase(e));
    }
    s.phases = quantize_phases(s.estimates, quant);
    s.amplitude_model = amp;
    s.quantization = quant;
    return s;
}

cd RisState::reflection(std::size_t n) const {
    return std::polar(amplitude(amplitude_model, phases[n]), phases[n]);
}

std::vector<double> optimal_phases(const CVec& g, const CVec& h, double reference_phase) {
    if (g.size() != h.size()) {
        throw std::invalid_argument("optimal_phases: g and h length mismatch");
    }
    std::vector<double> out(g.size());
    for (std::size_t n = 0; n < g.size(); ++n) {
        if (std::abs(g[n]) == 0.0 || std::abs(h[n]) == 0.0) {
            throw DegenerateChannelError("optimal_phases: zero-magnitude channel entry");
        }
        out[n] = wrap_phase(reference_phase - std::arg(g[n]) - std::arg(h[n]));
    }
    return out;
}

RisState relay_state(std::size_t n, const AmplitudeModel& amp, const QuantizationSpec& quant) {
    return RisState::from_estimates(std::vector<double>(n, 0.0), amp, quant);
}

cd cascade_sum(const CVec& g, const RisState& ris, const CVec& h) {
    if (g.size() != ris.size() || h.size() != ris.size()) {
        throw std::invalid_argument("cascade_sum: dimension mismatch");
    }
    cd acc{0.0, 0.0};
    for (std::size_t n = 0; n < g.size(); ++n) {
        acc += g[n] * ris.reflection(n) * h[n];
    }
    return acc;
}

CVec cascade_response(const ChannelRealization& real, const RisState& ris,
                      std::size_t actuator) {
    if (actuator >= real.num_actuators()) {
        throw std::invalid_argument("cascade_response: actuator index out of range");
    }
    if (ris.size() != real.ris_elements()) {
        throw std::invalid_argument("cascade_response: RIS size does not match realization");
    }
    const CVec& g = real.ris_to_actuator[actuator];
    const std::size_t m = real.bs_antennas();
    CVec row(m, cd{0.0, 0.0});
    for (std::size_t n = 0; n < ris.size(); ++n) {
        const cd gn = g[n] * ris.reflection(n);
        for (std::size_t c = 0; c < m; ++c) {
            row[c] += gn * real.bs_to_ris.at(n, c);
        }
    }
    return row;
}

CVec effective_row(const ChannelRealization& real, const RisState& ris, std::size_t actuator,
                   bool include_direct) {
    CVec row = cascade_response(real, ris, actuator);
    if (include_direct) {
        const CVec& f = real.direct[actuator];
        for (std::size_t c = 0; c < row.size(); ++c) {
            row[c] += f[c];
        }
    }
    return row;
}

double received_signal_power(const ChannelRealization& real, const RisState& ris,
                             std::size_t actuator, bool include_direct) {
    double p = 0.0;
    for (const cd& v : effective_row(real, ris, actuator, include_direct)) {
        p += std::norm(v);
    }
    return p;
}

}  // namespace risim
