#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spikelab/distribution.hpp"
#include "spikelab/geometry.hpp"

using namespace spikelab;

namespace {
constexpr double kPi = std::numbers::pi;

DataDistribution two_circles() {
    DataSpace space({0.0, 0.0}, {7.0, 4.0});
    return DataDistribution(space, {{make_ball({2.0, 2.0}, 1.0), 1.0},
                                    {make_ball({5.0, 2.0}, 1.0), 1.0}});
}
}

TEST_CASE("density, omega and mass for the two-circle mixture") {
    auto dist = two_circles();
    // Each component holds half the probability spread over area pi.
    double expect = 0.5 / kPi;
    CHECK(dist.density(std::vector<double>{2.0, 2.0}) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(dist.density(std::vector<double>{5.5, 2.0}) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(dist.density(std::vector<double>{3.5, 2.0}) == 0.0);
    CHECK(dist.omega() == doctest::Approx(expect).epsilon(1e-12));

    // Whole-support mass is 1; one ball holds half; off-support regions hold 0.
    auto support = region_union({make_ball({2.0, 2.0}, 1.0), make_ball({5.0, 2.0}, 1.0)});
    CHECK(dist.mass(support).value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dist.mass(make_ball({2.0, 2.0}, 1.0)).value == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(dist.mass(make_box({3.2, 0.2}, {3.8, 0.8})).value == doctest::Approx(0.0));

    // Half of the left ball is a quarter of the mass.
    auto half = region_intersection({make_ball({2.0, 2.0}, 1.0), make_half_space({1.0, 0.0}, 2.0)});
    CHECK(dist.mass(half).value == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("weighted components scale density and omega") {
    // Inner disc weight 5, annulus weight 3 (the concentric-circles layout).
    DataSpace space({0.0, 0.0}, {8.0, 8.0});
    auto inner = make_ball({4.0, 4.0}, 1.0);
    auto ring = region_difference(make_ball({4.0, 4.0}, 2.0), make_ball({4.0, 4.0}, 1.0));
    DataDistribution dist(space, {{inner, 5.0}, {ring, 3.0}});

    double inner_density = (5.0 / 8.0) / kPi;
    double ring_density = (3.0 / 8.0) / (3.0 * kPi);
    CHECK(dist.density(std::vector<double>{4.0, 4.0}) ==
          doctest::Approx(inner_density).epsilon(1e-12));
    CHECK(dist.density(std::vector<double>{5.5, 4.0}) ==
          doctest::Approx(ring_density).epsilon(1e-12));
    CHECK(dist.omega() == doctest::Approx(inner_density).epsilon(1e-12));
    CHECK(dist.mass(inner).value == doctest::Approx(5.0 / 8.0).epsilon(1e-12));

    // The outer disc covers everything.
    CHECK(dist.mass(make_ball({4.0, 4.0}, 2.0)).value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("declared overlaps widen the density bound") {
    DataSpace space({0.0, 0.0}, {10.0, 6.0});
    double e = 2.0 * std::sqrt(2.0), a = kPi / 4.0;
    auto d1 = make_rotated_square(4.0, 3.0, e, a);
    auto d2 = make_rotated_square(6.0, 3.0, e, a);

    // Densities add where components overlap regardless of the flag; the
    // flag's job is to make omega() dominate the doubled density.
    double one = 0.5 / 8.0;
    DataDistribution undeclared(space, {{d1, 1.0}, {d2, 1.0}});
    CHECK(undeclared.density(std::vector<double>{5.0, 3.0}) ==
          doctest::Approx(2.0 * one).epsilon(1e-12));
    CHECK(undeclared.omega() == doctest::Approx(one).epsilon(1e-12));

    DataDistribution dist(space, {{d1, 1.0}, {d2, 1.0}}, /*overlaps_declared=*/true);
    CHECK(dist.density(std::vector<double>{3.0, 3.0}) == doctest::Approx(one).epsilon(1e-12));
    CHECK(dist.density(std::vector<double>{5.0, 3.0}) ==
          doctest::Approx(2.0 * one).epsilon(1e-12)); // in both diamonds
    CHECK(dist.omega() == doctest::Approx(2.0 * one).epsilon(1e-12));
}

TEST_CASE("construction rejects bad inputs") {
    DataSpace space({0.0, 0.0}, {7.0, 4.0});
    CHECK_THROWS_AS(DataDistribution(space, {}), ConfigError);
    CHECK_THROWS_AS(DataDistribution(space, {{make_ball({2.0, 2.0}, 1.0), 0.0}}), ConfigError);
    CHECK_THROWS_AS(DataDistribution(space, {{make_ball({2.0, 2.0}, 1.0), -1.0}}), ConfigError);
    // Component outside the space has zero clipped measure.
    CHECK_THROWS_AS(DataDistribution(space, {{make_ball({20.0, 20.0}, 1.0), 1.0}}), ConfigError);
    // Dimension mismatch between space and component.
    CHECK_THROWS_AS(DataDistribution(space, {{make_ball({2.0}, 1.0), 1.0}}), DimensionError);
}

TEST_CASE("sampling is deterministic and lands on the support") {
    auto dist = two_circles();
    SampleMatrix s1 = dist.sample(500, 123);
    SampleMatrix s2 = dist.sample(500, 123);
    SampleMatrix s3 = dist.sample(500, 124);
    CHECK(s1.rows == 500);
    CHECK(s1.cols == 2);
    CHECK(s1.data == s2.data);
    CHECK(s1.data != s3.data);

    // Thread count must not change the draws.
    SampleMatrix s4 = dist.sample(500, 123, 4);
    CHECK(s1.data == s4.data);

    auto support = region_union({make_ball({2.0, 2.0}, 1.0), make_ball({5.0, 2.0}, 1.0)});
    std::size_t left = 0;
    for (std::size_t i = 0; i < s1.rows; ++i) {
        CHECK(contains(support, s1.row(i)));
        double dx = s1.row(i)[0] - 2.0, dy = s1.row(i)[1] - 2.0;
        if (dx * dx + dy * dy <= 1.0) ++left;
    }
    // Components are equally weighted; 500 draws split roughly evenly.
    CHECK(left > 180);
    CHECK(left < 320);
}

TEST_CASE("uniform null fills the data space") {
    DataSpace space({0.0, 0.0}, {7.0, 4.0});
    UniformNull null(space);
    CHECK(null.density() == doctest::Approx(1.0 / 28.0).epsilon(1e-12));

    SampleMatrix s = null.sample(2000, 99);
    CHECK(s.rows == 2000);
    for (std::size_t i = 0; i < s.rows; ++i) CHECK(space.contains(s.row(i)));
    CHECK(null.sample(2000, 99).data == s.data);
    CHECK(null.sample(2000, 99, 8).data == s.data);

    // Crude uniformity check: about half the draws in the left half.
    std::size_t left = 0;
    for (std::size_t i = 0; i < s.rows; ++i) {
        if (s.row(i)[0] < 3.5) ++left;
    }
    CHECK(left > 850);
    CHECK(left < 1150);
}
