#include "spikelab/ranking.hpp"

#include <algorithm>
#include <cmath>

namespace spikelab {

std::vector<RankedEntry> rank_candidates(const CandidateSet& set, const EvalConfig& cfg,
                                         double se_tol) {
    if (set.distribution == nullptr) throw ConfigError("candidate set has no distribution");
    if (set.candidates.empty()) throw ConfigError("candidate set is empty");

    struct Row {
        RankedEntry entry;
        std::size_t input_index = 0;
        double se_stddev = 0.0;
    };
    std::vector<Row> rows;
    rows.reserve(set.candidates.size());
    for (std::size_t i = 0; i < set.candidates.size(); ++i) {
        const Candidate& cand = set.candidates[i];
        Row row;
        row.entry.name = cand.name;
        row.entry.report = cfg.contour.has_value()
                               ? evaluate_sequence_contour(cand.sequence, *set.distribution, cfg)
                               : evaluate_sequence(cand.sequence, *set.distribution, cfg);
        row.entry.total_size = cand.sequence.total_param_count();
        row.input_index = i;
        SpikeCounts totals{row.entry.report.totals.M, row.entry.report.totals.Mp, cfg.N};
        row.se_stddev = observed_se_stddev(totals, cfg.alpha);
        rows.push_back(std::move(row));
    }

    // Sort by total SE descending first; buckets are then contiguous runs.
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return a.entry.report.totals.se > b.entry.report.totals.se;
    });

    auto bucket_tol = [&](const Row& a, const Row& b) {
        if (se_tol > 0.0) return se_tol;
        if (cfg.mode == EvalMode::Expected) return 1e-3;
        // Monte Carlo runs carry sampling noise; treat totals within three
        // combined standard deviations as the same efficiency class.
        return 3.0 * std::sqrt(a.se_stddev * a.se_stddev + b.se_stddev * b.se_stddev);
    };

    int bucket = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0 &&
            std::abs(rows[i].entry.report.totals.se - rows[i - 1].entry.report.totals.se) >
                bucket_tol(rows[i - 1], rows[i])) {
            ++bucket;
        }
        rows[i].entry.bucket = bucket;
    }

    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.entry.bucket != b.entry.bucket) return a.entry.bucket < b.entry.bucket;
        if (a.entry.report.totals.ability != b.entry.report.totals.ability) {
            return a.entry.report.totals.ability > b.entry.report.totals.ability;
        }
        if (a.entry.total_size != b.entry.total_size) return a.entry.total_size < b.entry.total_size;
        return a.input_index < b.input_index;
    });

    std::vector<RankedEntry> out;
    out.reserve(rows.size());
    for (auto& row : rows) out.push_back(std::move(row.entry));
    return out;
}

FunctionSequence prune_zero_se(const FunctionSequence& seq, const EfficiencyReport& report,
                               double eps) {
    if (report.per_function.size() != seq.functions.size()) {
        throw ConfigError("report does not match the sequence being pruned");
    }
    std::vector<SpikingFunction> kept;
    for (std::size_t k = 0; k < seq.functions.size(); ++k) {
        if (report.per_function[k].se > eps) kept.push_back(seq.functions[k]);
    }
    if (kept.empty()) throw ConfigError("pruning would remove every function");
    return FunctionSequence(std::move(kept));
}

} // namespace spikelab
