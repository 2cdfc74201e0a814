// SPDX-License-Identifier: Apache-2.0

#include "risim/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace risim {

double distance(const Point2& a, const Point2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

void NodeLayout::validate() const {
    if (ris_elements < 1 || bs_antennas < 1) {
        throw std::invalid_argument("NodeLayout: element and antenna counts must be >= 1");
    }
    if (actuators.empty()) {
        throw std::invalid_argument("NodeLayout: at least one actuator required");
    }
    if (distance(bs, ris) <= 0.0) {
        throw std::invalid_argument("NodeLayout: BS and RIS are co-located");
    }
    for (const auto& a : actuators) {
        if (distance(bs, a) <= 0.0 || distance(ris, a) <= 0.0) {
            throw std::invalid_argument("NodeLayout: actuator co-located with BS or RIS");
        }
    }
}

double path_loss_db(const PathLossModel& model, double d) {
    if (!(d > 0.0)) {
        throw std::invalid_argument("path_loss_db: distance must be > 0");
    }
    return model.intercept_db + model.slope_db_per_decade * std::log10(d);
}

double path_amplitude(const PathLossModel& model, double d) {
    return std::pow(10.0, -path_loss_db(model, d) / 20.0);
}

double LinkBudget::tx_power() const {
    return std::pow(10.0, tx_power_db / 10.0);
}

double LinkBudget::noise_power() const {
    return std::pow(10.0, noise_power_db / 10.0);
}

double LinkBudget::snr_scale() const {
    return std::pow(10.0, (tx_power_db - noise_power_db) / 10.0);
}

ChannelRealization sample_realization(const NodeLayout& layout, const PathLossModel& model,
                                      const LinkBudget& budget, RngStream& rng) {
    layout.validate();
    const std::size_t n = layout.ris_elements;
    const std::size_t m = layout.bs_antennas;
    const std::size_t k = layout.num_actuators();

    ChannelRealization real;
    real.direct.reserve(k);
    real.ris_to_actuator.reserve(k);

    const double direct_offset = std::pow(10.0, budget.direct_path_offset_db / 20.0);
    for (std::size_t a = 0; a < k; ++a) {
        const double amp = path_amplitude(model, distance(layout.bs, layout.actuators[a]));
        CVec f = sample_circular_gaussian(rng, m, 1.0);
        for (auto& v : f) {
            v *= amp * direct_offset;
        }
        real.direct.push_back(std::move(f));
    }

    const double amp_h = path_amplitude(model, distance(layout.bs, layout.ris));
    real.bs_to_ris = CMat(n, m);
    real.bs_to_ris.data = sample_circular_gaussian(rng, n * m, 1.0);
    for (auto& v : real.bs_to_ris.data) {
        v *= amp_h;
    }

    for (std::size_t a = 0; a < k; ++a) {
        const double amp = path_amplitude(model, distance(layout.ris, layout.actuators[a]));
        CVec g = sample_circular_gaussian(rng, n, 1.0);
        for (auto& v : g) {
            v *= amp;
        }
        real.ris_to_actuator.push_back(std::move(g));
    }
    return real;
}

}  // namespace risim
