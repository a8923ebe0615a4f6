#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "spikelab/geometry.hpp"

namespace spikelab {

// Reference set for max-correlation functions: rows stored centered and
// scaled to unit norm so a correlation is just a dot product. Zero-variance
// rows are stored as zero vectors (correlation 0 by convention: a constant
// image carries no linear similarity).
struct ReferenceSet {
    std::size_t count = 0;
    std::size_t dim = 0;
    std::vector<float> normalized; // count x dim, row-major

    static ReferenceSet from_rows(std::size_t count, std::size_t dim,
                                  const std::function<double(std::size_t, std::size_t)>& at);
};

// Center and unit-normalize one vector (the probe side of a correlation).
void normalize_row(std::span<const double> in, std::span<float> out);

// Contour discretization: level -1 below zero, levels 0..L-1 are kappa-wide
// bands, level L is everything above L*kappa. L = 0 collapses to the plain
// spike predicate.
struct ContourConfig {
    double kappa = 1.0;
    int top_level = 0;

    void validate() const;
    int level_count() const { return top_level + 2; } // including level -1
};

// A spiking function: maps a point to a real value and spikes where the
// value is strictly positive. Carries an explicit parameter count (its
// "size"); conciseness is 1/size.
class SpikingFunction {
public:
    enum class Kind { Indicator, MaxCorrelation, Custom };

    // Indicator of a region: inside_value inside, outside_value elsewhere.
    // Size defaults to default_param_count(region).
    static SpikingFunction indicator(RegionPtr region, double inside_value = 1.0,
                                     double outside_value = 0.0,
                                     std::optional<std::int64_t> size_override = std::nullopt);

    // max over references of Pearson correlation, minus threshold.
    // Size = dim * reference count (each stored pixel is a parameter).
    // tag defaults to "maxcorr"; scene files store the reference path there.
    static SpikingFunction max_correlation(std::shared_ptr<const ReferenceSet> refs,
                                           double threshold, std::string tag = "maxcorr");

    // Arbitrary callable with an explicitly declared size.
    static SpikingFunction custom(std::function<double(std::span<const double>)> body,
                                  std::int64_t size, std::string tag = "custom");

    Kind kind() const { return kind_; }
    std::int64_t size() const { return size_; }
    double conciseness() const { return 1.0 / static_cast<double>(size_); }

    // Indicator-only accessors (used by the expected-count evaluator).
    const RegionPtr& region() const { return region_; }
    double inside_value() const { return inside_value_; }

    // Max-correlation-only accessor (used by scene serialization).
    double threshold() const { return threshold_; }

    double evaluate(std::span<const double> point) const;
    bool spikes(std::span<const double> point) const { return evaluate(point) > 0.0; }
    int spike_level(std::span<const double> point, const ContourConfig& contour) const;

    const std::string& tag() const { return tag_; }

private:
    SpikingFunction() = default;

    Kind kind_ = Kind::Custom;
    std::int64_t size_ = 1;
    std::string tag_;

    RegionPtr region_;
    double inside_value_ = 1.0;
    double outside_value_ = 0.0;

    std::shared_ptr<const ReferenceSet> refs_;
    double threshold_ = 0.0;

    std::function<double(std::span<const double>)> body_;
};

// Level of a raw function value under a contour config; shared by
// SpikingFunction::spike_level and the expected-count path.
int value_level(double value, const ContourConfig& contour);

} // namespace spikelab
