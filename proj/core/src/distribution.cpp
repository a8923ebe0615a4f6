#include "spikelab/distribution.hpp"

#include <algorithm>
#include <cmath>

#include "spikelab/parallel.hpp"
#include "spikelab/rng.hpp"

namespace spikelab {

namespace {

// Give up on a degenerate component after this many straight misses.
constexpr std::uint64_t kMaxRejection = 1'000'000;
// Counter stride per sample index; must exceed kMaxRejection so attempt
// counters never collide across indices.
constexpr std::uint64_t kAttemptStride = 1'048'576;

// Borrow a region reference as a non-owning RegionPtr (for building
// short-lived intersection nodes).
RegionPtr borrow(const Region& r) {
    return RegionPtr(&r, [](const Region*) {});
}

} // namespace

DataDistribution::DataDistribution(DataSpace space,
                                   std::vector<std::pair<RegionPtr, double>> components,
                                   bool overlaps_declared, const std::optional<McConfig>& mc)
    : space_(std::move(space)), overlaps_declared_(overlaps_declared) {
    if (components.empty()) {
        throw ConfigError("DataDistribution needs at least one component");
    }
    for (auto& [region, weight] : components) {
        if (!region) throw ConfigError("DataDistribution component region is null");
        if (region_dim(*region) != space_.dim()) {
            throw DimensionError("component region dimension does not match the space");
        }
        if (!(weight > 0.0) || !std::isfinite(weight)) {
            throw ConfigError("DataDistribution component weight must be positive and finite");
        }
        Component c;
        c.region = region;
        c.weight = weight;
        MeasureResult m = measure(*region, space_, mc);
        if (m.value <= 0.0) {
            throw ConfigError("DataDistribution component has zero measure: " + describe(*region));
        }
        c.region_measure = m.value;
        c.measure_exact = m.exact();
        c.box = bounding_box(*region, space_);
        components_.push_back(std::move(c));
        total_weight_ += weight;
    }

    double cum = 0.0;
    for (const Component& c : components_) {
        cum += c.weight / total_weight_;
        pick_cdf_.push_back(cum);
    }
    pick_cdf_.back() = 1.0;

    // Density bound: exact per-component maximum when components are
    // disjoint. Declared overlaps add densities, so the sum of component
    // maxima is used instead; coarser, but still dominates the density,
    // which is all the efficiency bound needs.
    double max_single = 0.0;
    double sum_all = 0.0;
    for (const Component& c : components_) {
        double d = (c.weight / total_weight_) / c.region_measure;
        max_single = std::max(max_single, d);
        sum_all += d;
    }
    omega_ = overlaps_declared ? sum_all : max_single;
}

double DataDistribution::density(std::span<const double> point) const {
    if (point.size() != space_.dim()) {
        throw DimensionError("point dimension does not match the distribution's space");
    }
    double d = 0.0;
    for (const Component& c : components_) {
        if (contains(*c.region, point)) {
            d += (c.weight / total_weight_) / c.region_measure;
        }
    }
    return d;
}

MeasureResult DataDistribution::mass(const Region& region,
                                     const std::optional<McConfig>& mc) const {
    RegionPtr target = borrow(region);
    double total = 0.0;
    MeasureMethod method = MeasureMethod::Analytic;
    for (const Component& c : components_) {
        MeasureResult part = measure(*region_intersection({target, c.region}), space_, mc);
        if (!part.exact()) method = MeasureMethod::MonteCarlo;
        total += (c.weight / total_weight_) * part.value / c.region_measure;
    }
    // Guard against Monte Carlo noise nudging past the endpoints.
    return {std::clamp(total, 0.0, 1.0), method};
}

SampleMatrix DataDistribution::sample(std::size_t n, std::uint64_t seed, int threads) const {
    std::size_t dim = space_.dim();
    SampleMatrix out;
    out.rows = n;
    out.cols = dim;
    out.data.resize(n * dim);

    parallel_for_chunks(n, threads, [&](std::size_t begin, std::size_t end) {
        std::vector<double> p(dim);
        for (std::size_t i = begin; i < end; ++i) {
            double u = uniform01(seed, RngStream::ComponentPick, i);
            std::size_t ci =
                std::upper_bound(pick_cdf_.begin(), pick_cdf_.end(), u) - pick_cdf_.begin();
            if (ci >= components_.size()) ci = components_.size() - 1;
            const Component& comp = components_[ci];

            bool found = false;
            for (std::uint64_t attempt = 0; attempt < kMaxRejection; ++attempt) {
                std::uint64_t base = (i * kAttemptStride + attempt) * dim;
                for (std::size_t a = 0; a < dim; ++a) {
                    double v = uniform01(seed, RngStream::RejectionSample, base + a);
                    p[a] = comp.box.lower[a] + v * (comp.box.upper[a] - comp.box.lower[a]);
                }
                if (contains(*comp.region, p)) {
                    found = true;
                    break;
                }
            }
            if (!found) {
                throw ConfigError("rejection sampling failed " + std::to_string(kMaxRejection) +
                                  " consecutive times for component " + describe(*comp.region) +
                                  "; region is degenerate within its bounding box");
            }
            std::copy(p.begin(), p.end(), out.data.begin() + i * dim);
        }
    });
    return out;
}

SampleMatrix UniformNull::sample(std::size_t n, std::uint64_t seed, int threads) const {
    std::size_t dim = space_.dim();
    SampleMatrix out;
    out.rows = n;
    out.cols = dim;
    out.data.resize(n * dim);
    parallel_for_chunks(n, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            for (std::size_t a = 0; a < dim; ++a) {
                double u = uniform01(seed, RngStream::NullSample, i * dim + a);
                out.data[i * dim + a] = space_.lower[a] + u * (space_.upper[a] - space_.lower[a]);
            }
        }
    });
    return out;
}

} // namespace spikelab
