#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "spikelab/distribution.hpp"

namespace spikelab {

// Spike tallies for one function: M spikes on N data samples, Mp spikes on
// N reference samples.
struct SpikeCounts {
    std::int64_t M = 0;
    std::int64_t Mp = 0;
    std::int64_t N = 0;

    void validate() const;
};

// Per-level tallies for the contour variant. Index 0 holds level -1, index
// l+1 holds level l; each side sums to N.
struct LeveledCounts {
    std::vector<std::int64_t> M;
    std::vector<std::int64_t> Mp;
    std::int64_t N = 0;

    void validate() const;
};

struct StatConfig {
    double alpha = 1e-10; // smoothing inside the SE logs
    double tau1 = 2.0;    // significance threshold on |z|
    // tau2 (conciseness threshold) is data-space dependent and has no
    // sensible default; callers must choose it.
};

// Two-proportion Z statistic:
//   z = (M - Mp) * sqrt(2N / ((M + Mp) * (2N - M - Mp))).
// Throws DegenerateCountsError when M + Mp is 0 or 2N (no signal either way).
double z_score(const SpikeCounts& counts);

// Observed spiking efficiency (empirical KL between the two spike/no-spike
// splits), natural log, alpha-smoothed:
//   (M/N) ln((M+a)/(Mp+a)) + ((N-M)/N) ln((N-M+a)/(N-Mp+a)).
double observed_se(const SpikeCounts& counts, double alpha = 1e-10);

// Leveled generalization: sum over levels L..-1 of (M_l/N) ln((M_l+a)/(Mp_l+a)).
// Summation runs from the top level down so that the two-level case performs
// bit-for-bit the same operations as observed_se.
double observed_se_leveled(const LeveledCounts& counts, double alpha = 1e-10);

// First-order (delta method) standard deviation of observed_se treating
// M ~ Bin(N, M/N) and Mp ~ Bin(N, Mp/N) independently. Used to size
// spiking-equivalence buckets in Monte Carlo mode.
double observed_se_stddev(const SpikeCounts& counts, double alpha = 1e-10);

// Ability = efficiency per parameter.
double ability(double se, std::int64_t size);

// The two-clause learning criterion: statistically significant spiking AND
// concise enough for the data space.
bool learns_regularities(double z, std::int64_t size, double tau1, double tau2);

// Theoretical spiking efficiency of a region under a piecewise-uniform
// distribution, with p = P(region), R = |region|, S = |space|:
//   p ln(p S / R) + (1-p) ln((1-p) S / (S-R)),
// using the x ln x -> 0 limit at p = 0 and p = 1. A zero-measure region with
// positive mass (or full-measure with mass < 1) is singular and rejected.
double theoretical_se(const DataDistribution& dist, const Region& region,
                      const std::optional<McConfig>& mc = std::nullopt);
inline double theoretical_se(const DataDistribution& dist, const RegionPtr& region,
                             const std::optional<McConfig>& mc = std::nullopt) {
    return theoretical_se(dist, *region, mc);
}

// Upper bound on any spiking efficiency under a density bounded by omega:
// omega*S*ln(omega*S). Requires omega >= 1/S (anything less cannot integrate
// to 1 over the space).
double se_upper_bound(double omega, double space_measure);

} // namespace spikelab
