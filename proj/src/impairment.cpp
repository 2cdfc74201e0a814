// SPDX-License-Identifier: Apache-2.0

#include "risim/impairment.hpp"

#include <cmath>
#include <stdexcept>

namespace risim {

RisState apply_phase_error(const RisState& ris, const PhaseErrorSpec& spec, RngStream& rng) {
    if (spec.max_mismatch < 0.0) {
        throw std::invalid_argument("apply_phase_error: negative mismatch bound");
    }
    // g_only/h_only perturb a segment phase inside theta = -(xi + zeta),
    // flipping the sign of the induced phase shift.
    const double sign = spec.placement == ErrorPlacement::cascaded ? 1.0 : -1.0;
    std::vector<double> perturbed(ris.size());
    for (std::size_t n = 0; n < ris.size(); ++n) {
        const double eps = spec.max_mismatch * rng.next_unit();
        perturbed[n] = ris.estimates[n] + sign * eps;
    }
    return RisState::from_estimates(std::move(perturbed), ris.amplitude_model, ris.quantization);
}

NormalizedGainResult normalized_gain_experiment(const NodeLayout& layout,
                                                const PathLossModel& model,
                                                const PhaseErrorSpec& spec,
                                                std::size_t n_elements, std::size_t trials,
                                                RngStream rng) {
    if (trials < 1) {
        throw std::invalid_argument("normalized_gain_experiment: trials must be >= 1");
    }
    layout.validate();
    const double amp_g = path_amplitude(model, distance(layout.ris, layout.actuators.front()));
    const double amp_h = path_amplitude(model, distance(layout.bs, layout.ris));
    const AmplitudeModel ideal_amp;  // the experiment isolates phase effects

    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        CVec g = sample_circular_gaussian(rng, n_elements, 1.0);
        CVec h = sample_circular_gaussian(rng, n_elements, 1.0);
        for (auto& v : g) {
            v *= amp_g;
        }
        for (auto& v : h) {
            v *= amp_h;
        }
        const RisState ideal =
            RisState::from_estimates(optimal_phases(g, h), ideal_amp, spec.quantization);
        const RisState erred = apply_phase_error(ideal, spec, rng);
        const double gain = std::norm(cascade_sum(g, erred, h)) /
                            std::norm(cascade_sum(g, ideal, h));
        // Welford running mean/variance.
        const double d = gain - mean;
        mean += d / static_cast<double>(t + 1);
        m2 += d * (gain - mean);
    }

    NormalizedGainResult res;
    res.mean_normalized_gain = mean;
    res.std_dev = trials > 1 ? std::sqrt(m2 / static_cast<double>(trials - 1)) : 0.0;
    res.trials = trials;
    res.delta = spec.max_mismatch;
    return res;
}

}  // namespace risim
