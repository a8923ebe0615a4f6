#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "spikelab/errors.hpp"

namespace spikelab {

using Point = std::vector<double>;

// Axis-aligned bounding box used for pruning and rejection sampling.
struct BoundingBox {
    std::vector<double> lower;
    std::vector<double> upper;

    std::size_t dim() const { return lower.size(); }
    bool empty() const;
    double volume() const;
    BoundingBox intersect(const BoundingBox& other) const;
    BoundingBox hull(const BoundingBox& other) const;
};

// Bounded box-shaped data space; all regions are interpreted clipped to it.
struct DataSpace {
    std::vector<double> lower;
    std::vector<double> upper;

    DataSpace() = default;
    DataSpace(std::vector<double> lo, std::vector<double> hi);

    std::size_t dim() const { return lower.size(); }
    double measure() const;
    BoundingBox box() const { return {lower, upper}; }
    bool contains(std::span<const double> p) const;
};

// Primitive shapes. Membership is closed (<= comparisons) everywhere;
// boundaries have measure zero so none of the statistics care, and closed
// sets keep the region algebra simple.
struct Ball {
    std::vector<double> center;
    double radius = 0.0;
};

struct AxisBox {
    std::vector<double> lower;
    std::vector<double> upper;
};

// Square of side `edge` centered at (cx, cy), rotated by `angle` radians.
// Two-dimensional on purpose: it exists to express diamonds.
struct RotatedSquare {
    double cx = 0.0;
    double cy = 0.0;
    double edge = 0.0;
    double angle = 0.0;
};

// Closed half-space {x : normal . x <= offset}.
struct HalfSpace {
    std::vector<double> normal;
    double offset = 0.0;
};

class Region;
using RegionPtr = std::shared_ptr<const Region>;

// Immutable region tree: primitives combined by union / intersection /
// difference. Shared freely across threads.
class Region {
public:
    enum class Kind { Ball, Box, RotSquare, HalfSpace, Union, Intersect, Diff };

    Kind kind() const { return kind_; }
    const std::vector<RegionPtr>& children() const { return children_; }

    const Ball& ball() const { return std::get<Ball>(prim_); }
    const AxisBox& box() const { return std::get<AxisBox>(prim_); }
    const RotatedSquare& rot_square() const { return std::get<RotatedSquare>(prim_); }
    const HalfSpace& half_space() const { return std::get<HalfSpace>(prim_); }

    bool is_primitive() const {
        return kind_ == Kind::Ball || kind_ == Kind::Box || kind_ == Kind::RotSquare ||
               kind_ == Kind::HalfSpace;
    }

    // Explicit parameter-count override (regions built from scene files may
    // declare one); see default_param_count for the accounting rules.
    std::optional<std::int64_t> declared_size;

private:
    friend RegionPtr make_ball(std::vector<double>, double);
    friend RegionPtr make_box(std::vector<double>, std::vector<double>);
    friend RegionPtr make_rotated_square(double, double, double, double);
    friend RegionPtr make_half_space(std::vector<double>, double);
    friend RegionPtr make_combo(Kind, std::vector<RegionPtr>);

    Region() = default;

    Kind kind_ = Kind::Ball;
    std::variant<std::monostate, Ball, AxisBox, RotatedSquare, HalfSpace> prim_;
    std::vector<RegionPtr> children_;
};

// Factories validate their inputs and are the only way to build regions.
RegionPtr make_ball(std::vector<double> center, double radius);
RegionPtr make_box(std::vector<double> lower, std::vector<double> upper);
RegionPtr make_rotated_square(double cx, double cy, double edge, double angle);
RegionPtr make_half_space(std::vector<double> normal, double offset);
RegionPtr region_union(std::vector<RegionPtr> parts);
RegionPtr region_intersection(std::vector<RegionPtr> parts);
// Difference takes exactly base \ removed.
RegionPtr region_difference(RegionPtr base, RegionPtr removed);

// Closed-boundary membership. Throws DimensionError if the point dimension
// does not match the region's.
bool contains(const Region& region, std::span<const double> point);
inline bool contains(const RegionPtr& region, std::span<const double> point) {
    return contains(*region, point);
}

std::size_t region_dim(const Region& region);

// Bounding box of the region clipped to the given space.
BoundingBox bounding_box(const Region& region, const DataSpace& space);

// Parameter accounting for indicator functions over a region, mirroring how
// the worked examples count "adjustable" numbers:
//   Ball            dim + 1        (center + radius)
//   AxisBox         dim + 1 if all edges equal (center + edge), else 2*dim
//   RotatedSquare   4              (center, edge, angle)
//   HalfSpace       1              (offset; the unit normal is structural)
//   combinators     sum over operands (difference included)
// Respects declared_size overrides at any node.
std::int64_t default_param_count(const Region& region);

// Human-readable one-line description, used in diagnostics.
std::string describe(const Region& region);

} // namespace spikelab
