// SPDX-License-Identifier: Apache-2.0
//
// Scenario geometry, log-distance path loss and fading realizations for the
// direct, BS->RIS and RIS->actuator segments.

#pragma once

#include <cstddef>
#include <vector>

#include "risim/numerics.hpp"

namespace risim {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

double distance(const Point2& a, const Point2& b);

/// Node positions plus array sizes. Distances must all be strictly positive.
struct NodeLayout {
    Point2 bs;
    Point2 ris;
    std::vector<Point2> actuators;
    std::size_t bs_antennas = 1;   // M
    std::size_t ris_elements = 1;  // N

    void validate() const;
    std::size_t num_actuators() const { return actuators.size(); }
};

/// PL(d) = intercept + slope * log10(d), d in meters.
struct PathLossModel {
    double intercept_db = 34.53;
    double slope_db_per_decade = 38.0;
};

double path_loss_db(const PathLossModel& model, double d);
/// Amplitude scale 10^(-PL/20) applied to unit-variance fading entries.
double path_amplitude(const PathLossModel& model, double d);

/// Transmit/noise reference powers. Only the difference matters for SNR;
/// direct_path_offset_db additionally scales the direct-link amplitude
/// (the direct/cascade power balance is a calibration input, see the
/// calibrate experiment).
struct LinkBudget {
    double tx_power_db = 0.0;
    double noise_power_db = 0.0;
    double direct_path_offset_db = 0.0;

    double tx_power() const;
    double noise_power() const;
    /// 10^((tx - noise)/10), the factor mapping |channel|^2 to SNR.
    double snr_scale() const;
};

/// One block-static fading draw. Entries carry the segment path-loss
/// amplitude already; the direct entries also carry the budget's direct
/// offset.
struct ChannelRealization {
    std::vector<CVec> direct;           // per actuator, length M
    CMat bs_to_ris;                     // N x M
    std::vector<CVec> ris_to_actuator;  // per actuator, length N

    std::size_t num_actuators() const { return ris_to_actuator.size(); }
    std::size_t bs_antennas() const { return bs_to_ris.cols; }
    std::size_t ris_elements() const { return bs_to_ris.rows; }
};

/// Draw one realization. Sampling order is fixed (direct per actuator,
/// then BS->RIS, then RIS->actuator per actuator) so a given stream state
/// always produces the same realization.
ChannelRealization sample_realization(const NodeLayout& layout, const PathLossModel& model,
                                      const LinkBudget& budget, RngStream& rng);

}  // namespace risim
