#pragma once

#include <string>
#include <vector>

#include "spikelab/sequence.hpp"

namespace spikelab {

struct Candidate {
    std::string name;
    FunctionSequence sequence;
};

// Named candidate encoders bound to one scene (distribution + space); all are
// evaluated under a single mode / N / seed / alpha so ranks are comparable.
struct CandidateSet {
    const DataDistribution* distribution = nullptr;
    std::vector<Candidate> candidates;
};

struct RankedEntry {
    std::string name;
    EfficiencyReport report;
    std::int64_t total_size = 0;
    // Index of the spiking-equivalence bucket this entry landed in (0 = most
    // efficient bucket).
    int bucket = 0;
};

// Rank candidates: bucket by total SE within a tolerance (spiking-equivalence
// classes), then by ability descending inside a bucket; ties broken by
// smaller total size, then input order. Equal-SE encoders are compared by
// ability only — comparing abilities across different efficiency levels is
// not meaningful.
//
// se_tol <= 0 selects the default: 1e-3 in expected mode, 3x the delta-method
// stddev of the compared totals in Monte Carlo mode.
std::vector<RankedEntry> rank_candidates(const CandidateSet& set, const EvalConfig& cfg,
                                         double se_tol = 0.0);

// Drop functions whose per-function SE is <= eps (they capture nothing:
// typically fully masked duplicates or empty regions). Throws ConfigError if
// that would empty the sequence.
FunctionSequence prune_zero_se(const FunctionSequence& seq, const EfficiencyReport& report,
                               double eps);

} // namespace spikelab
