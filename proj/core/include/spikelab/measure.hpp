#pragma once

#include <cstdint>
#include <optional>

#include "spikelab/geometry.hpp"

namespace spikelab {

// Monte Carlo fallback configuration for measures that have no closed form.
struct McConfig {
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 0;
    int threads = 0; // 0 = hardware concurrency

    void validate() const {
        if (samples < 10'000) throw ConfigError("McConfig.samples must be at least 10000");
    }
};

enum class MeasureMethod { Analytic, MonteCarlo };

// Measure value plus which path produced it, so reports can flag estimates.
struct MeasureResult {
    double value = 0.0;
    MeasureMethod method = MeasureMethod::Analytic;

    bool exact() const { return method == MeasureMethod::Analytic; }
};

// Lebesgue measure of region ∩ space.
//
// The analytic engine expands the region tree into a signed sum of
// primitive-intersection cells (inclusion-exclusion), prunes provably empty
// cells, and evaluates each cell in closed form: convex-polygon clipping for
// boxes / rotated squares / half-spaces, disc∩convex-polygon for one ball,
// disc-pair reduction (disjoint -> empty, nested -> smaller). Cells with two
// genuinely overlapping discs, non-2D composites, or cell blowup fall back to
// seeded Monte Carlo; with no mc config those throw NeedsMonteCarloError.
MeasureResult measure(const Region& region, const DataSpace& space,
                      const std::optional<McConfig>& mc = std::nullopt);
inline MeasureResult measure(const RegionPtr& region, const DataSpace& space,
                             const std::optional<McConfig>& mc = std::nullopt) {
    return measure(*region, space, mc);
}

// The Monte Carlo estimator on its own: |space| * hits / samples over seeded
// uniform draws. Exposed so tests and benchmarks can compare it against the
// closed forms directly.
MeasureResult monte_carlo_measure(const Region& region, const DataSpace& space,
                                  const McConfig& mc);

} // namespace spikelab
