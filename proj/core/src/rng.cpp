#include "spikelab/rng.hpp"

#include <cmath>
#include <numbers>

namespace spikelab {

double standard_normal(std::uint64_t seed, RngStream stream, std::uint64_t counter) {
    // Box-Muller over two counter slots; caller passes distinct counters.
    double u1 = uniform01(seed, stream, 2 * counter);
    double u2 = uniform01(seed, stream, 2 * counter + 1);
    // Keep u1 away from 0 so the log stays finite.
    u1 = u1 > 1e-300 ? u1 : 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace spikelab
