#include "spikelab/sequence.hpp"

#include <atomic>
#include <cmath>
#include <mutex>

#include "spikelab/parallel.hpp"

namespace spikelab {

namespace {

std::int64_t round_half_away(double x) { return std::llround(x); }

RegionPtr borrow_region(const SpikingFunction& f) { return f.region(); }

// An indicator whose inside value is not positive never spikes; it
// contributes nothing and masks nothing.
bool is_inert(const SpikingFunction& f) {
    return f.kind() == SpikingFunction::Kind::Indicator && f.inside_value() <= 0.0;
}

void require_indicators(const FunctionSequence& seq, const char* what) {
    for (const auto& f : seq.functions) {
        if (f.kind() != SpikingFunction::Kind::Indicator) {
            throw ConfigError(std::string(what) +
                              " requires indicator functions; use Monte Carlo mode for "
                              "general function bodies");
        }
    }
}

void validate_cfg(const EvalConfig& cfg) {
    if (cfg.N < 1) throw ConfigError("evaluation N must be at least 1");
    if (!(cfg.alpha > 0.0)) throw ConfigError("alpha must be positive");
}

} // namespace

FunctionSequence::FunctionSequence(std::vector<SpikingFunction> fns) : functions(std::move(fns)) {
    if (functions.empty()) throw ConfigError("a function sequence needs at least one function");
}

std::int64_t FunctionSequence::total_param_count() const {
    std::int64_t total = 0;
    for (const auto& f : functions) total += f.size();
    return total;
}

Attribution attribute_spikes(const FunctionSequence& seq, const SampleMatrix& samples,
                             int threads) {
    std::size_t K = seq.functions.size();
    Attribution result;
    result.counts.assign(K, 0);

    std::mutex merge_mutex;
    parallel_for_chunks(samples.rows, threads, [&](std::size_t begin, std::size_t end) {
        std::vector<std::int64_t> local(K, 0);
        std::int64_t local_un = 0;
        for (std::size_t i = begin; i < end; ++i) {
            auto row = samples.row(i);
            bool hit = false;
            for (std::size_t k = 0; k < K; ++k) {
                if (seq.functions[k].spikes(row)) {
                    ++local[k];
                    hit = true;
                    break;
                }
            }
            if (!hit) ++local_un;
        }
        std::lock_guard<std::mutex> lock(merge_mutex);
        for (std::size_t k = 0; k < K; ++k) result.counts[k] += local[k];
        result.unattributed += local_un;
    });
    return result;
}

ExpectedCounts expected_counts(const FunctionSequence& seq, const DataDistribution& dist,
                               std::int64_t N, const std::optional<McConfig>& mc) {
    require_indicators(seq, "expected-count evaluation");
    if (N < 1) throw ConfigError("evaluation N must be at least 1");

    const DataSpace& space = dist.space();
    double S = space.measure();

    ExpectedCounts out;
    out.totals.N = N;

    // Cumulative union of the independent spiking regions seen so far.
    RegionPtr covered;
    for (const auto& f : seq.functions) {
        SpikeCounts c;
        c.N = N;
        double data_mass = 0.0;
        double ref_mass = 0.0;
        if (!is_inert(f)) {
            RegionPtr ind = borrow_region(f);

            MeasureResult m_ind = dist.mass(ind, mc);
            MeasureResult v_ind = measure(ind, space, mc);
            out.measures_exact = out.measures_exact && m_ind.exact() && v_ind.exact();
            std::int64_t data_cum = round_half_away(N * m_ind.value);
            std::int64_t ref_cum = round_half_away(N * v_ind.value / S);

            std::int64_t data_prev = 0;
            std::int64_t ref_prev = 0;
            double data_mass_prev = 0.0;
            double ref_mass_prev = 0.0;
            if (covered) {
                // The masked count is the difference of rounded cumulative
                // counts: round(N q(region)) - round(N q(region ∩ earlier)).
                RegionPtr overlap = region_intersection({ind, covered});
                MeasureResult m_int = dist.mass(overlap, mc);
                MeasureResult v_int = measure(overlap, space, mc);
                out.measures_exact = out.measures_exact && m_int.exact() && v_int.exact();
                data_prev = round_half_away(N * m_int.value);
                ref_prev = round_half_away(N * v_int.value / S);
                data_mass_prev = m_int.value;
                ref_mass_prev = v_int.value / S;
            }
            c.M = std::max<std::int64_t>(data_cum - data_prev, 0);
            c.Mp = std::max<std::int64_t>(ref_cum - ref_prev, 0);
            data_mass = std::max(m_ind.value - data_mass_prev, 0.0);
            ref_mass = std::max(v_ind.value / S - ref_mass_prev, 0.0);

            covered = covered ? region_union({covered, ind}) : ind;
        }
        out.per_function.push_back(c);
        out.masked_data_mass.push_back(data_mass);
        out.masked_ref_mass.push_back(ref_mass);
    }

    if (covered) {
        MeasureResult m_total = dist.mass(covered, mc);
        MeasureResult v_total = measure(covered, space, mc);
        out.measures_exact = out.measures_exact && m_total.exact() && v_total.exact();
        out.totals.M = round_half_away(N * m_total.value);
        out.totals.Mp = round_half_away(N * v_total.value / S);
    }
    return out;
}

namespace {

EfficiencyReport finish_simple_report(const FunctionSequence& seq,
                                      const std::vector<SpikeCounts>& per_fn,
                                      const SpikeCounts& totals, const EvalConfig& cfg,
                                      bool measures_exact) {
    EfficiencyReport rep;
    rep.mode = cfg.mode;
    rep.N = cfg.N;
    rep.seed = cfg.seed;
    rep.alpha = cfg.alpha;
    rep.measures_exact = measures_exact;

    double total_ability = 0.0;
    for (std::size_t k = 0; k < seq.functions.size(); ++k) {
        FunctionStats fs;
        fs.M = per_fn[k].M;
        fs.Mp = per_fn[k].Mp;
        fs.size = seq.functions[k].size();
        fs.conciseness = seq.functions[k].conciseness();
        fs.se = observed_se(per_fn[k], cfg.alpha);
        fs.ability = ability(fs.se, fs.size);
        total_ability += fs.ability;
        rep.per_function.push_back(std::move(fs));
    }
    rep.totals.M = totals.M;
    rep.totals.Mp = totals.Mp;
    rep.totals.se = observed_se(totals, cfg.alpha);
    rep.totals.ability = total_ability;
    return rep;
}

} // namespace

EfficiencyReport evaluate_sequence(const FunctionSequence& seq, const DataDistribution& dist,
                                   const EvalConfig& cfg) {
    if (cfg.contour.has_value()) return evaluate_sequence_contour(seq, dist, cfg);
    validate_cfg(cfg);

    if (cfg.mode == EvalMode::Expected) {
        ExpectedCounts ec = expected_counts(seq, dist, cfg.N, cfg.mc_measure);
        return finish_simple_report(seq, ec.per_function, ec.totals, cfg, ec.measures_exact);
    }

    // Monte Carlo: one data stream, one reference stream, first-spike
    // attribution on both.
    SampleMatrix data = dist.sample(static_cast<std::size_t>(cfg.N), cfg.seed, cfg.threads);
    SampleMatrix ref = UniformNull(dist.space())
                           .sample(static_cast<std::size_t>(cfg.N), cfg.seed, cfg.threads);
    Attribution att_data = attribute_spikes(seq, data, cfg.threads);
    Attribution att_ref = attribute_spikes(seq, ref, cfg.threads);

    std::vector<SpikeCounts> per_fn(seq.functions.size());
    SpikeCounts totals{0, 0, cfg.N};
    for (std::size_t k = 0; k < seq.functions.size(); ++k) {
        per_fn[k] = {att_data.counts[k], att_ref.counts[k], cfg.N};
        totals.M += per_fn[k].M;
        totals.Mp += per_fn[k].Mp;
    }
    return finish_simple_report(seq, per_fn, totals, cfg, true);
}

EfficiencyReport evaluate_sequence_contour(const FunctionSequence& seq,
                                           const DataDistribution& dist, const EvalConfig& cfg) {
    validate_cfg(cfg);
    if (!cfg.contour.has_value()) {
        throw ConfigError("contour evaluation needs an explicit contour configuration");
    }
    const ContourConfig& contour = *cfg.contour;
    contour.validate();

    std::size_t K = seq.functions.size();
    std::size_t levels = static_cast<std::size_t>(contour.level_count());
    // lvl[k][idx] with idx 0 = level -1, idx l+1 = level l.
    std::vector<std::vector<std::int64_t>> lvl_data(K, std::vector<std::int64_t>(levels, 0));
    std::vector<std::vector<std::int64_t>> lvl_ref(K, std::vector<std::int64_t>(levels, 0));
    bool measures_exact = true;
    std::optional<ExpectedCounts> expected;

    if (cfg.mode == EvalMode::Expected) {
        // Indicators place their whole masked region at one level (the level
        // of the inside value), so the simple expected counts carry over.
        require_indicators(seq, "expected-count contour evaluation");
        expected = expected_counts(seq, dist, cfg.N, cfg.mc_measure);
        const ExpectedCounts& ec = *expected;
        measures_exact = ec.measures_exact;
        for (std::size_t k = 0; k < K; ++k) {
            int level = value_level(seq.functions[k].inside_value(), contour);
            if (level >= 0) {
                lvl_data[k][static_cast<std::size_t>(level) + 1] = ec.per_function[k].M;
                lvl_ref[k][static_cast<std::size_t>(level) + 1] = ec.per_function[k].Mp;
            }
        }
    } else {
        auto tally = [&](const SampleMatrix& samples,
                         std::vector<std::vector<std::int64_t>>& sink) {
            std::mutex merge_mutex;
            parallel_for_chunks(samples.rows, cfg.threads, [&](std::size_t begin,
                                                               std::size_t end) {
                std::vector<std::vector<std::int64_t>> local(
                    K, std::vector<std::int64_t>(levels, 0));
                for (std::size_t i = begin; i < end; ++i) {
                    auto row = samples.row(i);
                    for (std::size_t k = 0; k < K; ++k) {
                        int level = value_level(seq.functions[k].evaluate(row), contour);
                        if (level >= 0) {
                            ++local[k][static_cast<std::size_t>(level) + 1];
                            break; // masked for every later function
                        }
                    }
                }
                std::lock_guard<std::mutex> lock(merge_mutex);
                for (std::size_t k = 0; k < K; ++k) {
                    for (std::size_t l = 0; l < levels; ++l) sink[k][l] += local[k][l];
                }
            });
        };
        SampleMatrix data = dist.sample(static_cast<std::size_t>(cfg.N), cfg.seed, cfg.threads);
        SampleMatrix ref = UniformNull(dist.space())
                               .sample(static_cast<std::size_t>(cfg.N), cfg.seed, cfg.threads);
        tally(data, lvl_data);
        tally(ref, lvl_ref);
    }

    EfficiencyReport rep;
    rep.mode = cfg.mode;
    rep.N = cfg.N;
    rep.seed = cfg.seed;
    rep.alpha = cfg.alpha;
    rep.contour = contour;
    rep.measures_exact = measures_exact;

    std::vector<std::int64_t> tot_data(levels, 0), tot_ref(levels, 0);
    double total_ability = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        std::int64_t spike_data = 0, spike_ref = 0;
        for (std::size_t l = 1; l < levels; ++l) {
            spike_data += lvl_data[k][l];
            spike_ref += lvl_ref[k][l];
            tot_data[l] += lvl_data[k][l];
            tot_ref[l] += lvl_ref[k][l];
        }
        lvl_data[k][0] = cfg.N - spike_data;
        lvl_ref[k][0] = cfg.N - spike_ref;

        FunctionStats fs;
        fs.M = spike_data;
        fs.Mp = spike_ref;
        fs.size = seq.functions[k].size();
        fs.conciseness = seq.functions[k].conciseness();
        fs.se = observed_se_leveled({lvl_data[k], lvl_ref[k], cfg.N}, cfg.alpha);
        fs.ability = ability(fs.se, fs.size);
        fs.leveled_M = lvl_data[k];
        fs.leveled_Mp = lvl_ref[k];
        total_ability += fs.ability;
        rep.per_function.push_back(std::move(fs));
    }

    if (expected.has_value()) {
        // Sampled attribution partitions rows, so summing per-function level
        // counts gives the union counts exactly. Expected counts do not: each
        // is rounded separately. Round the level-group masses instead, the
        // same way the flat totals round the union mass, which also makes a
        // zero-band run reduce bit-for-bit to the flat evaluator.
        tot_data.assign(levels, 0);
        tot_ref.assign(levels, 0);
        if (contour.top_level == 0) {
            tot_data[1] = expected->totals.M;
            tot_ref[1] = expected->totals.Mp;
        } else {
            std::vector<double> mass_data(levels, 0.0), mass_ref(levels, 0.0);
            for (std::size_t k = 0; k < K; ++k) {
                int level = value_level(seq.functions[k].inside_value(), contour);
                if (level < 0) continue;
                mass_data[static_cast<std::size_t>(level) + 1] += expected->masked_data_mass[k];
                mass_ref[static_cast<std::size_t>(level) + 1] += expected->masked_ref_mass[k];
            }
            for (std::size_t l = 1; l < levels; ++l) {
                tot_data[l] = round_half_away(static_cast<double>(cfg.N) * mass_data[l]);
                tot_ref[l] = round_half_away(static_cast<double>(cfg.N) * mass_ref[l]);
            }
        }
    }

    std::int64_t spike_data = 0, spike_ref = 0;
    for (std::size_t l = 1; l < levels; ++l) {
        spike_data += tot_data[l];
        spike_ref += tot_ref[l];
    }
    tot_data[0] = cfg.N - spike_data;
    tot_ref[0] = cfg.N - spike_ref;
    rep.totals.M = spike_data;
    rep.totals.Mp = spike_ref;
    rep.totals.se = observed_se_leveled({tot_data, tot_ref, cfg.N}, cfg.alpha);
    rep.totals.ability = total_ability;
    rep.totals.leveled_M = std::move(tot_data);
    rep.totals.leveled_Mp = std::move(tot_ref);
    return rep;
}

bool spiking_equivalent(const EfficiencyReport& a, const EfficiencyReport& b, double tol) {
    if (a.mode != b.mode) {
        throw ConfigError("spiking equivalence compares reports from the same evaluation mode");
    }
    return std::abs(a.totals.se - b.totals.se) <= tol;
}

} // namespace spikelab
