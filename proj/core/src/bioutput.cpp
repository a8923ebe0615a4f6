#include "spikelab/bioutput.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "spikelab/parallel.hpp"
#include "spikelab/rng.hpp"

namespace spikelab {

std::int64_t BiOutputCounts::total_M1() const {
    std::int64_t t = 0;
    for (const auto& pf : per_function) t += pf.M1;
    return t;
}

std::int64_t BiOutputCounts::total_Mp1() const {
    std::int64_t t = 0;
    for (const auto& pf : per_function) t += pf.Mp1;
    return t;
}

FixedRandomSet FixedRandomSet::draw(const UniformNull& null_dist, std::size_t count,
                                    std::uint64_t seed, int threads) {
    if (count == 0) throw ConfigError("fixed random set needs at least one sample");
    const DataSpace& space = null_dist.space();
    std::size_t dim = static_cast<std::size_t>(space.dim());

    FixedRandomSet out;
    out.seed = seed;
    out.samples.rows = count;
    out.samples.cols = dim;
    out.samples.data.resize(count * dim);
    parallel_for_chunks(count, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            for (std::size_t a = 0; a < dim; ++a) {
                double u = uniform01(seed, RngStream::FixedSet,
                                     static_cast<std::uint64_t>(i * dim + a));
                out.samples.data[i * dim + a] =
                    space.lower[a] + u * (space.upper[a] - space.lower[a]);
            }
        }
    });
    return out;
}

namespace {

void check_matrix(const std::vector<BiOutputFunction>& fns, const SampleMatrix& m,
                  const char* name) {
    if (m.rows == 0) throw ConfigError(std::string(name) + " sample matrix is empty");
    for (const auto& f : fns) {
        if (f.dim != 0 && static_cast<std::size_t>(f.dim) != m.cols) {
            throw DimensionError("bi-output function dimension does not match the samples");
        }
    }
}

} // namespace

BiOutputCounts count_bioutput(const std::vector<BiOutputFunction>& fns, const SampleMatrix& data,
                              const SampleMatrix& reference, const FixedRandomSet& fixed,
                              int threads) {
    if (fns.empty()) throw ConfigError("bi-output sequence is empty");
    check_matrix(fns, data, "data");
    check_matrix(fns, reference, "reference");
    check_matrix(fns, fixed.samples, "fixed");
    if (data.rows != reference.rows) {
        throw ConfigError("data and reference streams must have the same sample count");
    }

    std::size_t K = fns.size();
    BiOutputCounts out;
    out.per_function.resize(K);
    out.N = static_cast<std::int64_t>(data.rows);
    out.L = static_cast<std::int64_t>(fixed.samples.rows);

    // First head: masked first-spike attribution. Second head: raw tallies,
    // every function sees every sample.
    auto sweep = [&](const SampleMatrix& samples, auto&& credit) {
        std::mutex merge_mutex;
        parallel_for_chunks(samples.rows, threads, [&](std::size_t begin, std::size_t end) {
            std::vector<BiOutputCounts::PerFunction> local(K);
            for (std::size_t i = begin; i < end; ++i) {
                auto row = samples.row(i);
                bool masked = false;
                for (std::size_t k = 0; k < K; ++k) {
                    std::array<double, 2> y = fns[k](row);
                    credit(local[k], !masked && y[0] > 0.0, y[1] > 0.0);
                    if (y[0] > 0.0) masked = true;
                }
            }
            std::lock_guard<std::mutex> lock(merge_mutex);
            for (std::size_t k = 0; k < K; ++k) {
                out.per_function[k].M1 += local[k].M1;
                out.per_function[k].Mp1 += local[k].Mp1;
                out.per_function[k].M2 += local[k].M2;
                out.per_function[k].Mp2 += local[k].Mp2;
                out.per_function[k].Lfix += local[k].Lfix;
            }
        });
    };

    sweep(data, [](BiOutputCounts::PerFunction& pf, bool first, bool second) {
        if (first) ++pf.M1;
        if (second) ++pf.M2;
    });
    sweep(reference, [](BiOutputCounts::PerFunction& pf, bool first, bool second) {
        if (first) ++pf.Mp1;
        if (second) ++pf.Mp2;
    });
    sweep(fixed.samples, [](BiOutputCounts::PerFunction& pf, bool /*first*/, bool second) {
        if (second) ++pf.Lfix;
    });
    return out;
}

double estimate_first_head_size(std::int64_t total_size, int m, std::int64_t l_fix,
                                std::int64_t m2, std::int64_t mp2, double lambda) {
    if (m < 1) throw ConfigError("size estimate needs the data dimension m >= 1");
    if (lambda < 0.0) throw ConfigError("lambda must be non-negative");
    double est = static_cast<double>(total_size) -
                 static_cast<double>(m) *
                     (static_cast<double>(l_fix) -
                      lambda * static_cast<double>(m2 + mp2));
    // Sizes are never below 1; an estimate driven nonpositive by a heavily
    // memorizing second head is clamped so the objective stays finite.
    return std::max(est, 1.0);
}

void ObjectiveConfig::validate() const {
    if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
    if (lambda < 0.0) throw ConfigError("lambda must be non-negative");
    if (m < 1) throw ConfigError("objective needs the data dimension m >= 1");
}

ObjectiveBreakdown objective(const BiOutputCounts& counts,
                             const std::vector<std::int64_t>& total_sizes,
                             const ObjectiveConfig& cfg) {
    cfg.validate();
    if (counts.per_function.empty()) throw ConfigError("objective needs at least one function");
    if (total_sizes.size() != counts.per_function.size()) {
        throw ConfigError("one total size per function is required");
    }

    ObjectiveBreakdown out;
    out.sequence_term =
        observed_se({counts.total_M1(), counts.total_Mp1(), counts.N}, cfg.alpha);
    out.value = cfg.lambda1 * out.sequence_term;

    for (std::size_t k = 0; k < counts.per_function.size(); ++k) {
        const auto& pf = counts.per_function[k];
        double est = estimate_first_head_size(total_sizes[k], cfg.m, pf.Lfix, pf.M2, pf.Mp2,
                                              cfg.lambda);
        double se_k = observed_se({pf.M1, pf.Mp1, counts.N}, cfg.alpha);
        double term = se_k / est;
        out.per_function_terms.push_back(term);
        out.estimated_sizes.push_back(est);
        out.value += cfg.lambda2 * term;
    }
    return out;
}

SearchResult random_search(const ParametricFamily& family, const DataDistribution& dist,
                           const ObjectiveConfig& cfg, const SearchEvalSetup& setup,
                           std::int64_t budget, std::uint64_t seed) {
    if (budget < 1) throw ConfigError("search budget must be at least 1 evaluation");
    if (!family.build) throw ConfigError("parametric family has no build function");
    if (family.initial.empty()) throw ConfigError("parametric family has no parameters");
    if (setup.N < 1 || setup.L < 1) throw ConfigError("search needs N >= 1 and L >= 1");
    cfg.validate();

    // All evaluations share one frozen set of samples, so objective values
    // are comparable across parameter vectors.
    SampleMatrix data =
        dist.sample(static_cast<std::size_t>(setup.N), setup.sample_seed, setup.threads);
    UniformNull null_dist(dist.space());
    SampleMatrix reference =
        null_dist.sample(static_cast<std::size_t>(setup.N), setup.sample_seed, setup.threads);
    FixedRandomSet fixed = FixedRandomSet::draw(null_dist, static_cast<std::size_t>(setup.L),
                                                setup.sample_seed, setup.threads);

    auto score = [&](const std::vector<double>& params) {
        std::vector<BiOutputFunction> fns = family.build(params);
        if (fns.empty()) throw ConfigError("parametric family built an empty sequence");
        std::vector<std::int64_t> sizes;
        sizes.reserve(fns.size());
        for (const auto& f : fns) sizes.push_back(f.total_size);
        BiOutputCounts counts = count_bioutput(fns, data, reference, fixed, setup.threads);
        return objective(counts, sizes, cfg).value;
    };

    SearchResult result;
    result.best_params = family.initial;
    result.best_objective = score(family.initial);
    result.trace.push_back(result.best_objective);

    std::size_t dim = family.initial.size();
    for (std::int64_t step = 1; step < budget; ++step) {
        std::vector<double> candidate = result.best_params;
        for (std::size_t j = 0; j < dim; ++j) {
            std::uint64_t counter = static_cast<std::uint64_t>(step) * dim + j;
            candidate[j] += family.sigma * standard_normal(seed, RngStream::SearchPerturb, counter);
        }
        double value = score(candidate);
        if (value > result.best_objective) {
            result.best_objective = value;
            result.best_params = std::move(candidate);
        }
        result.trace.push_back(result.best_objective);
    }
    return result;
}

} // namespace spikelab
