#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "spikelab/distribution.hpp"
#include "spikelab/stats.hpp"

namespace spikelab {

// A two-headed function: head 1 is the representational head (its spikes are
// masked across the sequence like any spiking function), head 2 is the
// self-audit head used to estimate how much of the function's capacity is
// spent memorizing fixed random samples. Outputs are squashed into (-1, 1).
struct BiOutputFunction {
    std::function<std::array<double, 2>(std::span<const double>)> body;
    std::int64_t total_size = 1; // |F|, declared
    int dim = 0;

    std::array<double, 2> operator()(std::span<const double> p) const { return body(p); }
};

// L reference samples drawn once from the uniform distribution and frozen.
struct FixedRandomSet {
    SampleMatrix samples;
    std::uint64_t seed = 0;

    static FixedRandomSet draw(const UniformNull& null_dist, std::size_t count,
                               std::uint64_t seed, int threads = 0);
};

// Tallies for a bi-output sequence. First-head counts are masked (first
// spike across the sequence wins); second-head counts are raw per function,
// since heads share no state across functions.
struct BiOutputCounts {
    struct PerFunction {
        std::int64_t M1 = 0;  // first head, data stream, masked
        std::int64_t Mp1 = 0; // first head, reference stream, masked
        std::int64_t M2 = 0;  // second head, data stream, unmasked
        std::int64_t Mp2 = 0; // second head, reference stream, unmasked
        std::int64_t Lfix = 0; // second head, fixed random set, unmasked
    };
    std::vector<PerFunction> per_function;
    std::int64_t N = 0;
    std::int64_t L = 0;

    std::int64_t total_M1() const;
    std::int64_t total_Mp1() const;
};

BiOutputCounts count_bioutput(const std::vector<BiOutputFunction>& fns, const SampleMatrix& data,
                              const SampleMatrix& reference, const FixedRandomSet& fixed,
                              int threads = 0);

// Estimated size of the first head: total size minus m parameters per fixed
// sample the second head flags, with the penalty term forgiving lambda-scaled
// fresh-sample spikes. Clamped below at 1 (sizes are never smaller).
double estimate_first_head_size(std::int64_t total_size, int m, std::int64_t l_fix,
                                std::int64_t m2, std::int64_t mp2, double lambda);

struct ObjectiveConfig {
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    double lambda = 50.0; // weight forgiving legitimate second-head spikes
    double alpha = 1e-10;
    int m = 0; // data dimension, used by the size estimate

    void validate() const;
};

// The bi-output learning objective:
//   lambda1 * SE(M_f, Mp_f, N)
// + lambda2 * sum_k SE(M1_k, Mp1_k, N) / estimated_first_head_size_k.
struct ObjectiveBreakdown {
    double value = 0.0;
    double sequence_term = 0.0;              // SE of the masked totals (unscaled)
    std::vector<double> per_function_terms;  // SE_k / est_size_k (unscaled)
    std::vector<double> estimated_sizes;
};
ObjectiveBreakdown objective(const BiOutputCounts& counts,
                             const std::vector<std::int64_t>& total_sizes,
                             const ObjectiveConfig& cfg);

// Baseline parameter search. This is plumbing to exercise the objective end
// to end; it climbs with seeded Gaussian perturbations and makes no claim of
// finding an optimal encoder.
struct ParametricFamily {
    std::vector<double> initial;
    double sigma = 0.25; // perturbation scale
    std::function<std::vector<BiOutputFunction>(const std::vector<double>&)> build;
};

struct SearchResult {
    std::vector<double> best_params;
    double best_objective = 0.0;
    std::vector<double> trace; // best-so-far after each evaluation, non-decreasing
};

struct SearchEvalSetup {
    std::int64_t N = 1000;
    std::int64_t L = 1000;
    std::uint64_t sample_seed = 0;
    int threads = 0;
};

SearchResult random_search(const ParametricFamily& family, const DataDistribution& dist,
                           const ObjectiveConfig& cfg, const SearchEvalSetup& setup,
                           std::int64_t budget, std::uint64_t seed);

} // namespace spikelab
