// SPDX-License-Identifier: Apache-2.0

#include "risim/kpi.hpp"

#include <cmath>
#include <cstdio>

namespace risim {

const std::vector<KpiTarget>& kpi_targets() {
    static const std::vector<KpiTarget> table = {
        {"per_radio_link_reliability", "1-1e-5", "1-1e-9"},
        {"application_e2e_reliability", "not considered", "1-1e-6"},
        {"per_radio_link_latency", "1 ms", "0.1 ms"},
        {"application_e2e_latency", "5 ms", "<1 ms"},
        {"connection_setup_time", "not considered", "<1 ms"},
        {"connection_density", "1 device/m^2", "up to 10 device/m^3"},
        {"spectral_efficiency_dl", "~25 bpcu", "~40 bpcu"},
        {"device_lifetime", "10 years", "40 years"},
        {"positioning_accuracy", "30 cm", "1 cm / 5 mm"},
        {"jitter", "1 us", "<0.1 us"},
    };
    return table;
}

std::vector<std::string> kpi_annotations(const FblParams& params) {
    std::vector<std::string> lines;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "kpi: embedded decoding error target = %.3g per packet",
                  params.error_target);
    lines.emplace_back(buf);
    const bool matches_e2e = std::fabs(params.error_target - 1e-6) / 1e-6 < 1e-9;
    std::snprintf(buf, sizeof(buf),
                  "kpi: application_e2e_reliability 6G class 1-1e-6 %s the embedded target",
                  matches_e2e ? "matches" : "does not match");
    lines.emplace_back(buf);
    lines.emplace_back(
        "kpi: per_radio_link_reliability 6G class 1-1e-9 is stricter than the embedded target");
    return lines;
}

}  // namespace risim
