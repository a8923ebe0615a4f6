#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spikelab/distribution.hpp"
#include "spikelab/spiking.hpp"
#include "spikelab/stats.hpp"

namespace spikelab {

// Ordered sequence of spiking functions. Order matters: a sample is credited
// to the first function that spikes on it, which is what makes per-function
// spiking regions disjoint.
struct FunctionSequence {
    std::vector<SpikingFunction> functions;

    FunctionSequence() = default;
    explicit FunctionSequence(std::vector<SpikingFunction> fns);

    std::size_t size() const { return functions.size(); }
    std::int64_t total_param_count() const;
};

enum class EvalMode { Expected, MonteCarlo };

struct EvalConfig {
    EvalMode mode = EvalMode::Expected;
    std::int64_t N = 10'000;
    std::uint64_t seed = 0;
    double alpha = 1e-10;
    int threads = 0;
    // Monte Carlo fallback for measures in expected mode (composite regions
    // without closed forms).
    std::optional<McConfig> mc_measure;
    std::optional<ContourConfig> contour;
};

struct FunctionStats {
    std::int64_t M = 0;
    std::int64_t Mp = 0;
    double se = 0.0;
    std::int64_t size = 1;
    double conciseness = 1.0;
    double ability = 0.0;
    // Contour runs only: counts per level, index 0 = level -1.
    std::vector<std::int64_t> leveled_M;
    std::vector<std::int64_t> leveled_Mp;
};

struct ReportTotals {
    std::int64_t M = 0;
    std::int64_t Mp = 0;
    double se = 0.0;
    double ability = 0.0;
    std::vector<std::int64_t> leveled_M;
    std::vector<std::int64_t> leveled_Mp;
};

// Everything downstream consumers need: raw counts plus derived statistics,
// so ranking and serialization never recompute from floats.
struct EfficiencyReport {
    std::vector<FunctionStats> per_function;
    ReportTotals totals;
    EvalMode mode = EvalMode::Expected;
    std::int64_t N = 0;
    std::uint64_t seed = 0;
    double alpha = 1e-10;
    std::optional<ContourConfig> contour;
    // True if every measure underlying an expected-mode report had a closed
    // form (always true in Monte Carlo mode, which uses no measures).
    bool measures_exact = true;
};

// First-spike attribution of a sample matrix: counts[k] = number of rows
// whose first spiking function is k; unattributed = rows spiking nowhere.
struct Attribution {
    std::vector<std::int64_t> counts;
    std::int64_t unattributed = 0;
};
Attribution attribute_spikes(const FunctionSequence& seq, const SampleMatrix& samples,
                             int threads = 0);

// Expected-count evaluation of one function list (indicators only): the
// masked count for function k is the difference of cumulative rounded
// counts, round(N*q(region_k)) - round(N*q(region_k ∩ union of earlier)),
// which is how the worked examples derive every printed number. Returns one
// SpikeCounts per function plus the union totals.
struct ExpectedCounts {
    std::vector<SpikeCounts> per_function;
    SpikeCounts totals;
    bool measures_exact = true;
    // Masked-region masses per function (data-side and reference-side
    // probabilities, zero for inert functions). The contour evaluator needs
    // these to round level groups the way the totals round the union,
    // instead of summing per-function rounds.
    std::vector<double> masked_data_mass;
    std::vector<double> masked_ref_mass;
};
ExpectedCounts expected_counts(const FunctionSequence& seq, const DataDistribution& dist,
                               std::int64_t N, const std::optional<McConfig>& mc = std::nullopt);

// Full evaluation. Expected mode requires indicator functions; Monte Carlo
// mode draws N data and N reference samples and attributes both streams.
EfficiencyReport evaluate_sequence(const FunctionSequence& seq, const DataDistribution& dist,
                                   const EvalConfig& cfg);

// Contour variant: per-level counts with first-nonnegative-level attribution.
// cfg.contour must be set. With top_level = 0 the report reduces bit-for-bit
// to evaluate_sequence.
EfficiencyReport evaluate_sequence_contour(const FunctionSequence& seq,
                                           const DataDistribution& dist, const EvalConfig& cfg);

// Two sequences are spiking-equivalent when their total efficiencies agree
// within tol. Reports must come from the same evaluation mode.
bool spiking_equivalent(const EfficiencyReport& a, const EfficiencyReport& b, double tol);

} // namespace spikelab
