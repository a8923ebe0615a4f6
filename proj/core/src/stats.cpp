#include "spikelab/stats.hpp"

#include <cmath>

namespace spikelab {

void SpikeCounts::validate() const {
    if (N < 1) throw ConfigError("SpikeCounts.N must be at least 1");
    if (M < 0 || M > N) throw ConfigError("SpikeCounts.M must lie in [0, N]");
    if (Mp < 0 || Mp > N) throw ConfigError("SpikeCounts.Mp must lie in [0, N]");
}

void LeveledCounts::validate() const {
    if (N < 1) throw ConfigError("LeveledCounts.N must be at least 1");
    if (M.size() != Mp.size() || M.empty()) {
        throw ConfigError("LeveledCounts requires matching nonempty level vectors");
    }
    std::int64_t sm = 0, sp = 0;
    for (std::size_t i = 0; i < M.size(); ++i) {
        if (M[i] < 0 || Mp[i] < 0) throw ConfigError("LeveledCounts entries must be nonnegative");
        sm += M[i];
        sp += Mp[i];
    }
    if (sm != N || sp != N) {
        throw ConfigError("LeveledCounts per-level sums must equal N");
    }
}

double z_score(const SpikeCounts& counts) {
    counts.validate();
    std::int64_t total = counts.M + counts.Mp;
    if (total == 0 || total == 2 * counts.N) {
        throw DegenerateCountsError(
            "z-score undefined: M + M' is " + std::to_string(total) + " with N = " +
            std::to_string(counts.N) + " (all-or-nothing spiking carries no signal)");
    }
    double n = static_cast<double>(counts.N);
    double t = static_cast<double>(total);
    return (static_cast<double>(counts.M) - static_cast<double>(counts.Mp)) *
           std::sqrt(2.0 * n / (t * (2.0 * n - t)));
}

namespace {

// One addend of the efficiency sum; alpha keeps empty bins off the log
// singularities.
inline double se_term(double m, double mp, double n, double alpha) {
    return (m / n) * std::log((m + alpha) / (mp + alpha));
}

} // namespace

double observed_se(const SpikeCounts& counts, double alpha) {
    counts.validate();
    if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
    double n = static_cast<double>(counts.N);
    double m = static_cast<double>(counts.M);
    double mp = static_cast<double>(counts.Mp);
    // Spike bin first, then the complement bin: observed_se_leveled walks
    // levels top-down so the two agree bit-for-bit at top_level = 0.
    return se_term(m, mp, n, alpha) + se_term(n - m, n - mp, n, alpha);
}

double observed_se_leveled(const LeveledCounts& counts, double alpha) {
    counts.validate();
    if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
    double n = static_cast<double>(counts.N);
    double total = 0.0;
    for (std::size_t idx = counts.M.size(); idx-- > 0;) {
        total += se_term(static_cast<double>(counts.M[idx]), static_cast<double>(counts.Mp[idx]),
                         n, alpha);
    }
    return total;
}

double observed_se_stddev(const SpikeCounts& counts, double alpha) {
    counts.validate();
    double n = static_cast<double>(counts.N);
    double m = static_cast<double>(counts.M);
    double mp = static_cast<double>(counts.Mp);
    double p = m / n;
    double pp = mp / n;
    // First-order sensitivity of observed_se to each count.
    double d_m = std::log((m + alpha) / (mp + alpha)) / n + (m / n) / (m + alpha) -
                 std::log((n - m + alpha) / (n - mp + alpha)) / n -
                 ((n - m) / n) / (n - m + alpha);
    double d_mp = -(m / n) / (mp + alpha) + ((n - m) / n) / (n - mp + alpha);
    double var_m = n * p * (1.0 - p);
    double var_mp = n * pp * (1.0 - pp);
    return std::sqrt(d_m * d_m * var_m + d_mp * d_mp * var_mp);
}

double ability(double se, std::int64_t size) {
    if (size < 1) throw ConfigError("function size must be at least 1");
    return se / static_cast<double>(size);
}

bool learns_regularities(double z, std::int64_t size, double tau1, double tau2) {
    if (size < 1) throw ConfigError("function size must be at least 1");
    return std::abs(z) >= tau1 && 1.0 / static_cast<double>(size) >= tau2;
}

double theoretical_se(const DataDistribution& dist, const Region& region,
                      const std::optional<McConfig>& mc) {
    double S = dist.space().measure();
    double R = measure(region, dist.space(), mc).value;
    double p = dist.mass(region, mc).value;

    double term1;
    if (p <= 0.0) {
        term1 = 0.0; // x ln x -> 0
    } else if (R <= 0.0) {
        throw ConfigError("theoretical SE is singular: zero-measure region with positive mass");
    } else {
        term1 = p * std::log(p * S / R);
    }

    double q = 1.0 - p;
    double Rc = S - R;
    double term2;
    if (q <= 0.0) {
        term2 = 0.0;
    } else if (Rc <= 0.0) {
        throw ConfigError("theoretical SE is singular: full-measure region with mass below 1");
    } else {
        term2 = q * std::log(q * S / Rc);
    }
    return term1 + term2;
}

double se_upper_bound(double omega, double space_measure) {
    if (!(space_measure > 0.0)) throw ConfigError("space measure must be positive");
    // Densities integrating to 1 over the space cannot stay below 1/|S|.
    // Tiny slack forgives rounding in omega computed from measures.
    if (omega < 1.0 / space_measure - 1e-12) {
        throw ConfigError("density bound below 1/|S| is inconsistent");
    }
    double x = omega * space_measure;
    return x * std::log(x);
}

} // namespace spikelab
