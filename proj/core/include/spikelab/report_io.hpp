#pragma once

#include <string>
#include <vector>

#include "spikelab/ranking.hpp"
#include "spikelab/sequence.hpp"

namespace spikelab {

// JSON serialization keeps full double precision (counts stay integers).
std::string report_to_json(const EfficiencyReport& report, int indent = 2);

// CSV: one row per function plus a totals row; floating values printed with
// six decimals.
std::string report_to_csv(const EfficiencyReport& report);

std::string ranked_to_json(const std::vector<RankedEntry>& ranked, int indent = 2);
std::string ranked_to_csv(const std::vector<RankedEntry>& ranked);

} // namespace spikelab
