#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "spikelab/stats.hpp"

using namespace spikelab;

namespace {
constexpr double kPi = std::numbers::pi;

double se(std::int64_t m, std::int64_t mp, std::int64_t n) {
    return observed_se({m, mp, n});
}
}

TEST_CASE("count validation") {
    CHECK_THROWS_AS(SpikeCounts({-1, 0, 10}).validate(), ConfigError);
    CHECK_THROWS_AS(SpikeCounts({11, 0, 10}).validate(), ConfigError);
    CHECK_THROWS_AS(SpikeCounts({0, 11, 10}).validate(), ConfigError);
    CHECK_THROWS_AS(SpikeCounts({0, 0, 0}).validate(), ConfigError);
    CHECK_NOTHROW(SpikeCounts({10, 0, 10}).validate());

    LeveledCounts lc;
    lc.N = 10;
    lc.M = {5, 5};
    lc.Mp = {5, 4}; // does not sum to N
    CHECK_THROWS_AS(lc.validate(), ConfigError);
    lc.Mp = {5, 5};
    CHECK_NOTHROW(lc.validate());
}

TEST_CASE("z statistic reproduces the worked vignettes") {
    CHECK(z_score({100, 5, 1000}) == doctest::Approx(9.5244).epsilon(5e-5));
    CHECK(z_score({1000, 50, 10000}) == doctest::Approx(30.1189).epsilon(5e-5));
    CHECK(z_score({10000, 197, 10000}) == doctest::Approx(138.6623).epsilon(5e-5));

    // Hand-checkable small case: M=3, Mp=1, N=4 gives
    // (3-1)*sqrt(8/(4*(8-4))) = 2*sqrt(0.5).
    CHECK(z_score({3, 1, 4}) == doctest::Approx(2.0 * std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("z statistic is antisymmetric and degenerate at the endpoints") {
    for (auto [m, mp, n] : {std::tuple<std::int64_t, std::int64_t, std::int64_t>{100, 5, 1000},
                            {777, 123, 1000},
                            {1, 999, 1000}}) {
        CHECK(z_score({m, mp, n}) == doctest::Approx(-z_score({mp, m, n})).epsilon(1e-12));
    }

    CHECK_THROWS_AS(z_score({0, 0, 1000}), DegenerateCountsError);
    CHECK_THROWS_AS(z_score({1000, 1000, 1000}), DegenerateCountsError);
    CHECK_NOTHROW(z_score({1000, 999, 1000}));
    CHECK_NOTHROW(z_score({0, 1, 1000}));
}

TEST_CASE("observed efficiency matches the frozen oracle table") {
    // Values computed independently (natural log, alpha = 1e-10) from the
    // expected counts of the bundled scenes; frozen to 6 decimals.
    CHECK(se(10000, 2244, 10000) == doctest::Approx(1.494325).epsilon(5e-7));
    CHECK(se(5000, 1122, 10000) == doctest::Approx(0.460093).epsilon(5e-7));
    CHECK(se(2500, 561, 10000) == doctest::Approx(0.201121).epsilon(5e-7));
    CHECK(se(1250, 280, 10000) == doctest::Approx(0.095023).epsilon(5e-7));
    CHECK(se(7500, 1683, 10000) == doctest::Approx(0.820241).epsilon(5e-7));
    CHECK(se(3750, 842, 10000) == doctest::Approx(0.321370).epsilon(5e-7));
    CHECK(se(4200, 980, 4200) == doctest::Approx(1.455287).epsilon(5e-7));
    CHECK(se(2400, 560, 4200) == doctest::Approx(0.529794).epsilon(5e-7));
    CHECK(se(1800, 420, 4200) == doctest::Approx(0.364120).epsilon(5e-7));
    CHECK(se(11200, 1500, 11200) == doctest::Approx(2.010449).epsilon(5e-7));
    CHECK(se(747, 100, 11200) == doctest::Approx(0.078069).epsilon(5e-7));
    CHECK(se(10000, 1963, 10000) == doctest::Approx(1.628111).epsilon(5e-7));
    CHECK(se(6250, 491, 10000) == doctest::Approx(1.241002).epsilon(5e-7));
    CHECK(se(3750, 1472, 10000) == doctest::Approx(0.156442).epsilon(5e-7));

    // Identical spike behavior on both sides carries zero information.
    CHECK(se(500, 500, 1000) == doctest::Approx(0.0));

    CHECK_THROWS_AS(observed_se({100, 5, 1000}, 0.0), ConfigError);
}

TEST_CASE("the leveled efficiency collapses exactly at one band") {
    // Index 0 is the no-spike level; index 1 the single spike band. The
    // leveled sum must be bit-for-bit equal to the two-bin form.
    for (auto [m, mp, n] : {std::tuple<std::int64_t, std::int64_t, std::int64_t>{2244, 561, 10000},
                            {100, 5, 1000},
                            {747, 100, 11200},
                            {0, 42, 1000}}) {
        LeveledCounts lc;
        lc.N = n;
        lc.M = {n - m, m};
        lc.Mp = {n - mp, mp};
        CHECK(observed_se_leveled(lc) == observed_se({m, mp, n}));
    }

    // Multi-band case against a by-hand sum.
    LeveledCounts lc;
    lc.N = 100;
    lc.M = {40, 30, 30};
    lc.Mp = {80, 15, 5};
    double a = 1e-10;
    double hand = 0.30 * std::log((30 + a) / (5 + a)) + 0.30 * std::log((30 + a) / (15 + a)) +
                  0.40 * std::log((40 + a) / (80 + a));
    CHECK(observed_se_leveled(lc) == doctest::Approx(hand).epsilon(1e-12));
}

TEST_CASE("efficiency spread estimate behaves like a standard deviation") {
    // Monotone in N: more samples, tighter estimate.
    double s1 = observed_se_stddev({100, 5, 1000});
    double s2 = observed_se_stddev({1000, 50, 10000});
    CHECK(s1 > 0.0);
    CHECK(s2 > 0.0);
    CHECK(s2 < s1);
    // Degenerate proportions have zero binomial variance.
    CHECK(observed_se_stddev({1000, 0, 1000}) == doctest::Approx(0.0));
}

TEST_CASE("ability divides efficiency by size") {
    CHECK(ability(1.5, 3) == doctest::Approx(0.5));
    CHECK(ability(0.0, 7) == 0.0);
    CHECK_THROWS_AS(ability(1.0, 0), ConfigError);
}

TEST_CASE("the learning verdict needs significance and conciseness together") {
    // Strong z, small function: learns.
    CHECK(learns_regularities(9.52, 6, 2.0, 0.01));
    // Strong negative z counts via |z|.
    CHECK(learns_regularities(-9.52, 6, 2.0, 0.01));
    // Weak z fails clause one.
    CHECK_FALSE(learns_regularities(1.2, 6, 2.0, 0.01));
    // Huge function fails clause two even with a giant z.
    CHECK_FALSE(learns_regularities(120.0, 47'040'000, 2.0, 0.01));
    // Threshold boundaries are inclusive.
    CHECK(learns_regularities(2.0, 100, 2.0, 0.01));
    CHECK_THROWS_AS(learns_regularities(1.0, 0, 2.0, 0.01), ConfigError);
}

TEST_CASE("theoretical efficiency matches closed forms on the bundled layouts") {
    DataSpace circles({0.0, 0.0}, {7.0, 4.0});
    auto left = make_ball({2.0, 2.0}, 1.0);
    auto right = make_ball({5.0, 2.0}, 1.0);
    DataDistribution dist(circles, {{left, 1.0}, {right, 1.0}});

    // Full support: p = 1, so SE = ln(S/R) = ln(28 / 2pi).
    CHECK(theoretical_se(dist, region_union({left, right})) ==
          doctest::Approx(std::log(28.0 / (2.0 * kPi))).epsilon(1e-12));

    // One ball: p = 1/2, R = pi.
    double expect = 0.5 * std::log(0.5 * 28.0 / kPi) +
                    0.5 * std::log(0.5 * 28.0 / (28.0 - kPi));
    CHECK(theoretical_se(dist, left) == doctest::Approx(expect).epsilon(1e-12));

    // Region with zero mass but positive measure: p = 0 gives the q-side
    // term only.
    auto cold = make_box({3.2, 0.2}, {3.8, 0.8});
    double q_only = std::log(28.0 / (28.0 - 0.36));
    CHECK(theoretical_se(dist, cold) == doctest::Approx(q_only).epsilon(1e-12));

    // Concentric layout: full-support disc gives ln(64 / 4pi).
    DataSpace sq({0.0, 0.0}, {8.0, 8.0});
    auto inner = make_ball({4.0, 4.0}, 1.0);
    auto ring = region_difference(make_ball({4.0, 4.0}, 2.0), make_ball({4.0, 4.0}, 1.0));
    DataDistribution cdist(sq, {{inner, 5.0}, {ring, 3.0}});
    CHECK(theoretical_se(cdist, make_ball({4.0, 4.0}, 2.0)) ==
          doctest::Approx(std::log(64.0 / (4.0 * kPi))).epsilon(1e-12));
}

TEST_CASE("the efficiency upper bound is omega S ln(omega S)") {
    // Two-circle layout: omega = (1/2)/pi, S = 28.
    double omega = 0.5 / kPi;
    double x = omega * 28.0;
    CHECK(se_upper_bound(omega, 28.0) == doctest::Approx(x * std::log(x)).epsilon(1e-12));
    CHECK(se_upper_bound(omega, 28.0) == doctest::Approx(6.6592).epsilon(1e-4));

    // The uniform density itself bounds to zero extra efficiency.
    CHECK(se_upper_bound(1.0 / 28.0, 28.0) == doctest::Approx(0.0));

    // A density bound below 1/|S| cannot be a density bound at all.
    CHECK_THROWS_AS(se_upper_bound(0.5 / 28.0, 28.0), ConfigError);
    CHECK_THROWS_AS(se_upper_bound(omega, 0.0), ConfigError);
}
