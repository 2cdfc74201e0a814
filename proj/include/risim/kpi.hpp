// SPDX-License-Identifier: Apache-2.0
//
// Reference MTC KPI targets (5G vs 6G) shipped with the toolkit; used only
// to annotate experiment reports.

#pragma once

#include <string>
#include <vector>

#include "risim/rate.hpp"

namespace risim {

struct KpiTarget {
    std::string name;
    std::string target_5g;
    std::string target_6g;
};

const std::vector<KpiTarget>& kpi_targets();

/// Report lines relating the embedded decoding-error target to the
/// reliability KPI classes.
std::vector<std::string> kpi_annotations(const FblParams& params);

}  // namespace risim
