// Hot paths of a Monte Carlo evaluation: drawing samples from the data
// distribution and attributing spikes across a sequence.

#include "benchmark/benchmark.h"

#include "spikelab/sequence.hpp"

namespace {

using namespace spikelab;

DataDistribution two_circle_distribution() {
    DataSpace space({0.0, 0.0}, {7.0, 4.0});
    return DataDistribution(space, {{make_ball({2.0, 2.0}, 1.0), 1.0},
                                    {make_ball({5.0, 2.0}, 1.0), 1.0}});
}

FunctionSequence per_circle_sequence() {
    return FunctionSequence({SpikingFunction::indicator(make_ball({2.0, 2.0}, 1.0)),
                             SpikingFunction::indicator(make_ball({5.0, 2.0}, 1.0))});
}

void BM_DistributionSample(benchmark::State& state) {
    DataDistribution dist = two_circle_distribution();
    std::size_t n = static_cast<std::size_t>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(dist.sample(n, seed++).data.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DistributionSample)->Arg(10000)->Arg(100000);

void BM_AttributeSpikes(benchmark::State& state) {
    DataDistribution dist = two_circle_distribution();
    FunctionSequence seq = per_circle_sequence();
    SampleMatrix samples = dist.sample(static_cast<std::size_t>(state.range(0)), 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(attribute_spikes(seq, samples).counts.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AttributeSpikes)->Arg(10000)->Arg(100000);

void BM_EvaluateSequenceMc(benchmark::State& state) {
    DataDistribution dist = two_circle_distribution();
    FunctionSequence seq = per_circle_sequence();
    EvalConfig cfg;
    cfg.mode = EvalMode::MonteCarlo;
    cfg.N = state.range(0);
    for (auto _ : state) {
        cfg.seed++;
        benchmark::DoNotOptimize(evaluate_sequence(seq, dist, cfg).totals.se);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EvaluateSequenceMc)->Arg(10000)->Arg(100000);

void BM_EvaluateSequenceExpected(benchmark::State& state) {
    DataDistribution dist = two_circle_distribution();
    FunctionSequence seq = per_circle_sequence();
    EvalConfig cfg;
    for (auto _ : state) {
        benchmark::DoNotOptimize(evaluate_sequence(seq, dist, cfg).totals.se);
    }
}
BENCHMARK(BM_EvaluateSequenceExpected);

} // namespace
