#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "spikelab/geometry.hpp"
#include "spikelab/measure.hpp"

namespace spikelab {

// Flat row-major sample matrix; rows are points.
struct SampleMatrix {
    std::vector<double> data;
    std::size_t rows = 0;
    std::size_t cols = 0;

    std::span<const double> row(std::size_t i) const {
        return {data.data() + i * cols, cols};
    }
};

// Piecewise-uniform data distribution: a weighted list of regions, each
// carrying uniform density weight/(total_weight * |region|). This covers
// every distribution the statistics layer is specified against, and makes
// the density bound exact instead of estimated.
class DataDistribution {
public:
    struct Component {
        RegionPtr region;
        double weight = 1.0;
        // Resolved at construction.
        double region_measure = 0.0;
        bool measure_exact = true;
        BoundingBox box;
    };

    // Components are assumed pairwise disjoint unless `overlaps_declared`;
    // where they do overlap, densities add. The mc config is only needed if
    // a component has no closed-form measure.
    DataDistribution(DataSpace space, std::vector<std::pair<RegionPtr, double>> components,
                     bool overlaps_declared = false,
                     const std::optional<McConfig>& mc = std::nullopt);

    const DataSpace& space() const { return space_; }
    const std::vector<Component>& components() const { return components_; }
    bool overlaps_declared() const { return overlaps_declared_; }

    // Piecewise-constant density; 0 outside all components.
    double density(std::span<const double> point) const;

    // P(region) in [0,1]: sum over components of
    // weight_share * |region ∩ component| / |component|.
    MeasureResult mass(const Region& region, const std::optional<McConfig>& mc = std::nullopt) const;
    MeasureResult mass(const RegionPtr& region, const std::optional<McConfig>& mc = std::nullopt) const {
        return mass(*region, mc);
    }

    // Upper bound on density. Exact max component density for disjoint
    // components; with declared overlaps this is the sum of component maxima,
    // still a valid bound (it only needs to dominate the density).
    double omega() const { return omega_; }

    // n i.i.d. draws: component picked by weight, then rejection sampling
    // from the component's bounding box. Deterministic in (seed, index) and
    // thread-count independent.
    SampleMatrix sample(std::size_t n, std::uint64_t seed, int threads = 0) const;

private:
    DataSpace space_;
    std::vector<Component> components_;
    bool overlaps_declared_ = false;
    double total_weight_ = 0.0;
    double omega_ = 0.0;
    // Cumulative weight fractions for component picking.
    std::vector<double> pick_cdf_;
};

// The uniform reference distribution on the data space.
class UniformNull {
public:
    explicit UniformNull(DataSpace space) : space_(std::move(space)) {}

    const DataSpace& space() const { return space_; }
    double density() const { return 1.0 / space_.measure(); }

    SampleMatrix sample(std::size_t n, std::uint64_t seed, int threads = 0) const;

private:
    DataSpace space_;
};

} // namespace spikelab
