#pragma once

#include <cstdint>

namespace spikelab {

// Counter-based randomness. Every draw is a pure function of
// (seed, stream, counter), so parallel code can hand out disjoint counter
// ranges and produce bit-identical results regardless of thread count or
// evaluation order. Quality is plenty for Monte Carlo integration.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Stream ids keep independent sampling purposes from ever sharing a counter
// sequence under the same user seed.
enum class RngStream : std::uint64_t {
    McMeasure = 1,
    ComponentPick = 2,
    RejectionSample = 3,
    NullSample = 4,
    NoiseImage = 5,
    SearchPerturb = 6,
    FixedSet = 7,
};

inline std::uint64_t counter_rng(std::uint64_t seed, RngStream stream, std::uint64_t counter) {
    // Three mixing rounds; each is a bijection, the composition decorrelates
    // seed, stream and counter well enough that adjacent counters look
    // independent.
    return splitmix64(splitmix64(splitmix64(seed) + static_cast<std::uint64_t>(stream)) + counter);
}

// Uniform double in [0, 1) using the top 53 bits.
inline double to_unit_double(std::uint64_t u) {
    return static_cast<double>(u >> 11) * 0x1.0p-53;
}

inline double uniform01(std::uint64_t seed, RngStream stream, std::uint64_t counter) {
    return to_unit_double(counter_rng(seed, stream, counter));
}

// Standard normal via Box-Muller on two counter draws. Used by the search
// driver's perturbations; not performance critical.
double standard_normal(std::uint64_t seed, RngStream stream, std::uint64_t counter);

} // namespace spikelab
