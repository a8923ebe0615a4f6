// Measure-engine throughput: closed-form region measures vs the Monte Carlo
// fallback, on the shapes the bundled scenes actually use.

#include "benchmark/benchmark.h"

#include "spikelab/measure.hpp"

namespace {

using namespace spikelab;

DataSpace make_space() { return DataSpace({0.0, 0.0}, {7.0, 4.0}); }

RegionPtr two_circles() {
    return region_union({make_ball({2.0, 2.0}, 1.0), make_ball({5.0, 2.0}, 1.0)});
}

RegionPtr annulus() {
    return region_difference(make_ball({4.0, 2.0}, 2.0), make_ball({4.0, 2.0}, 1.0));
}

RegionPtr diamond_overlap() {
    double edge = 2.8284271247461903;
    return region_intersection({make_rotated_square(4.0, 3.0, edge, 0.7853981633974483),
                                make_rotated_square(6.0, 3.0, edge, 0.7853981633974483)});
}

void BM_AnalyticUnionOfBalls(benchmark::State& state) {
    DataSpace space = make_space();
    RegionPtr region = two_circles();
    for (auto _ : state) {
        benchmark::DoNotOptimize(measure(*region, space).value);
    }
}
BENCHMARK(BM_AnalyticUnionOfBalls);

void BM_AnalyticAnnulus(benchmark::State& state) {
    DataSpace space = make_space();
    RegionPtr region = annulus();
    for (auto _ : state) {
        benchmark::DoNotOptimize(measure(*region, space).value);
    }
}
BENCHMARK(BM_AnalyticAnnulus);

void BM_AnalyticDiamondOverlap(benchmark::State& state) {
    DataSpace space({0.0, 0.0}, {10.0, 6.0});
    RegionPtr region = diamond_overlap();
    for (auto _ : state) {
        benchmark::DoNotOptimize(measure(*region, space).value);
    }
}
BENCHMARK(BM_AnalyticDiamondOverlap);

void BM_MonteCarloMeasure(benchmark::State& state) {
    DataSpace space = make_space();
    RegionPtr region = two_circles();
    McConfig mc;
    mc.samples = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(monte_carlo_measure(*region, space, mc).value);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarloMeasure)->Arg(100000)->Arg(1000000);

} // namespace

BENCHMARK_MAIN();
