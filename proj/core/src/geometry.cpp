#include "spikelab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace spikelab {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw GeometryError(msg);
}

bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

} // namespace

bool BoundingBox::empty() const {
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (lower[i] > upper[i]) return true;
    }
    return false;
}

double BoundingBox::volume() const {
    double v = 1.0;
    for (std::size_t i = 0; i < lower.size(); ++i) {
        double side = upper[i] - lower[i];
        if (side <= 0.0) return 0.0;
        v *= side;
    }
    return v;
}

BoundingBox BoundingBox::intersect(const BoundingBox& other) const {
    BoundingBox r = *this;
    for (std::size_t i = 0; i < lower.size(); ++i) {
        r.lower[i] = std::max(r.lower[i], other.lower[i]);
        r.upper[i] = std::min(r.upper[i], other.upper[i]);
    }
    return r;
}

BoundingBox BoundingBox::hull(const BoundingBox& other) const {
    BoundingBox r = *this;
    for (std::size_t i = 0; i < lower.size(); ++i) {
        r.lower[i] = std::min(r.lower[i], other.lower[i]);
        r.upper[i] = std::max(r.upper[i], other.upper[i]);
    }
    return r;
}

DataSpace::DataSpace(std::vector<double> lo, std::vector<double> hi)
    : lower(std::move(lo)), upper(std::move(hi)) {
    require(!lower.empty(), "DataSpace must have at least one dimension");
    require(lower.size() == upper.size(), "DataSpace lower/upper dimension mismatch");
    require(all_finite(lower) && all_finite(upper), "DataSpace bounds must be finite");
    for (std::size_t i = 0; i < lower.size(); ++i) {
        require(lower[i] < upper[i], "DataSpace requires lower < upper on every axis");
    }
}

double DataSpace::measure() const {
    double v = 1.0;
    for (std::size_t i = 0; i < lower.size(); ++i) v *= upper[i] - lower[i];
    return v;
}

bool DataSpace::contains(std::span<const double> p) const {
    if (p.size() != lower.size()) {
        throw DimensionError("point dimension " + std::to_string(p.size()) +
                             " does not match space dimension " + std::to_string(lower.size()));
    }
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (p[i] < lower[i] || p[i] > upper[i]) return false;
    }
    return true;
}

RegionPtr make_ball(std::vector<double> center, double radius) {
    require(!center.empty(), "ball center must have at least one coordinate");
    require(all_finite(center) && std::isfinite(radius), "ball parameters must be finite");
    require(radius > 0.0, "ball radius must be positive");
    auto r = std::shared_ptr<Region>(new Region());
    r->kind_ = Region::Kind::Ball;
    r->prim_ = Ball{std::move(center), radius};
    return r;
}

RegionPtr make_box(std::vector<double> lower, std::vector<double> upper) {
    require(!lower.empty() && lower.size() == upper.size(), "box lower/upper dimension mismatch");
    require(all_finite(lower) && all_finite(upper), "box bounds must be finite");
    for (std::size_t i = 0; i < lower.size(); ++i) {
        require(lower[i] < upper[i], "box requires lower < upper on every axis");
    }
    auto r = std::shared_ptr<Region>(new Region());
    r->kind_ = Region::Kind::Box;
    r->prim_ = AxisBox{std::move(lower), std::move(upper)};
    return r;
}

RegionPtr make_rotated_square(double cx, double cy, double edge, double angle) {
    require(std::isfinite(cx) && std::isfinite(cy) && std::isfinite(edge) && std::isfinite(angle),
            "rotated square parameters must be finite");
    require(edge > 0.0, "rotated square edge must be positive");
    auto r = std::shared_ptr<Region>(new Region());
    r->kind_ = Region::Kind::RotSquare;
    r->prim_ = RotatedSquare{cx, cy, edge, angle};
    return r;
}

RegionPtr make_half_space(std::vector<double> normal, double offset) {
    require(!normal.empty(), "half-space normal must have at least one coordinate");
    require(all_finite(normal) && std::isfinite(offset), "half-space parameters must be finite");
    double norm2 = 0.0;
    for (double c : normal) norm2 += c * c;
    require(norm2 > 0.0, "half-space normal must be nonzero");
    auto r = std::shared_ptr<Region>(new Region());
    r->kind_ = Region::Kind::HalfSpace;
    r->prim_ = HalfSpace{std::move(normal), offset};
    return r;
}

RegionPtr make_combo(Region::Kind kind, std::vector<RegionPtr> parts) {
    require(!parts.empty(), "combinator needs at least one operand");
    for (const auto& p : parts) require(p != nullptr, "combinator operand is null");
    std::size_t d = region_dim(*parts.front());
    for (const auto& p : parts) {
        require(region_dim(*p) == d, "combinator operands must share a dimension");
    }
    auto r = std::shared_ptr<Region>(new Region());
    r->kind_ = kind;
    r->children_ = std::move(parts);
    return r;
}

RegionPtr region_union(std::vector<RegionPtr> parts) {
    require(parts.size() >= 2, "union needs at least two operands");
    return make_combo(Region::Kind::Union, std::move(parts));
}

RegionPtr region_intersection(std::vector<RegionPtr> parts) {
    require(parts.size() >= 2, "intersection needs at least two operands");
    return make_combo(Region::Kind::Intersect, std::move(parts));
}

RegionPtr region_difference(RegionPtr base, RegionPtr removed) {
    require(base != nullptr && removed != nullptr, "difference operands must be non-null");
    return make_combo(Region::Kind::Diff, {std::move(base), std::move(removed)});
}

std::size_t region_dim(const Region& region) {
    switch (region.kind()) {
        case Region::Kind::Ball: return region.ball().center.size();
        case Region::Kind::Box: return region.box().lower.size();
        case Region::Kind::RotSquare: return 2;
        case Region::Kind::HalfSpace: return region.half_space().normal.size();
        default: return region_dim(*region.children().front());
    }
}

namespace {

bool contains_impl(const Region& region, std::span<const double> p) {
    switch (region.kind()) {
        case Region::Kind::Ball: {
            const Ball& b = region.ball();
            double d2 = 0.0;
            for (std::size_t i = 0; i < b.center.size(); ++i) {
                double d = p[i] - b.center[i];
                d2 += d * d;
            }
            return d2 <= b.radius * b.radius;
        }
        case Region::Kind::Box: {
            const AxisBox& b = region.box();
            for (std::size_t i = 0; i < b.lower.size(); ++i) {
                if (p[i] < b.lower[i] || p[i] > b.upper[i]) return false;
            }
            return true;
        }
        case Region::Kind::RotSquare: {
            const RotatedSquare& s = region.rot_square();
            // Rotate the point into the square's frame and box-test.
            double c = std::cos(s.angle), sn = std::sin(s.angle);
            double dx = p[0] - s.cx, dy = p[1] - s.cy;
            double lx = c * dx + sn * dy;
            double ly = -sn * dx + c * dy;
            double h = s.edge / 2.0;
            return lx >= -h && lx <= h && ly >= -h && ly <= h;
        }
        case Region::Kind::HalfSpace: {
            const HalfSpace& hs = region.half_space();
            double dot = 0.0;
            for (std::size_t i = 0; i < hs.normal.size(); ++i) dot += hs.normal[i] * p[i];
            return dot <= hs.offset;
        }
        case Region::Kind::Union:
            for (const auto& ch : region.children()) {
                if (contains_impl(*ch, p)) return true;
            }
            return false;
        case Region::Kind::Intersect:
            for (const auto& ch : region.children()) {
                if (!contains_impl(*ch, p)) return false;
            }
            return true;
        case Region::Kind::Diff:
            return contains_impl(*region.children()[0], p) &&
                   !contains_impl(*region.children()[1], p);
    }
    return false;
}

} // namespace

bool contains(const Region& region, std::span<const double> point) {
    std::size_t d = region_dim(region);
    if (point.size() != d) {
        throw DimensionError("point dimension " + std::to_string(point.size()) +
                             " does not match region dimension " + std::to_string(d));
    }
    return contains_impl(region, point);
}

BoundingBox bounding_box(const Region& region, const DataSpace& space) {
    switch (region.kind()) {
        case Region::Kind::Ball: {
            const Ball& b = region.ball();
            BoundingBox r{b.center, b.center};
            for (std::size_t i = 0; i < b.center.size(); ++i) {
                r.lower[i] -= b.radius;
                r.upper[i] += b.radius;
            }
            return r.intersect(space.box());
        }
        case Region::Kind::Box:
            return BoundingBox{region.box().lower, region.box().upper}.intersect(space.box());
        case Region::Kind::RotSquare: {
            const RotatedSquare& s = region.rot_square();
            double c = std::abs(std::cos(s.angle)), sn = std::abs(std::sin(s.angle));
            double half = (c + sn) * s.edge / 2.0;
            BoundingBox r{{s.cx - half, s.cy - half}, {s.cx + half, s.cy + half}};
            return r.intersect(space.box());
        }
        case Region::Kind::HalfSpace:
            // A half-space is unbounded; within the clipped world it can fill
            // the whole space.
            return space.box();
        case Region::Kind::Union: {
            BoundingBox r = bounding_box(*region.children().front(), space);
            for (std::size_t i = 1; i < region.children().size(); ++i) {
                r = r.hull(bounding_box(*region.children()[i], space));
            }
            return r;
        }
        case Region::Kind::Intersect: {
            BoundingBox r = bounding_box(*region.children().front(), space);
            for (std::size_t i = 1; i < region.children().size(); ++i) {
                r = r.intersect(bounding_box(*region.children()[i], space));
            }
            return r;
        }
        case Region::Kind::Diff:
            return bounding_box(*region.children()[0], space);
    }
    return space.box();
}

std::int64_t default_param_count(const Region& region) {
    if (region.declared_size.has_value()) return *region.declared_size;
    switch (region.kind()) {
        case Region::Kind::Ball:
            return static_cast<std::int64_t>(region.ball().center.size()) + 1;
        case Region::Kind::Box: {
            const AxisBox& b = region.box();
            double first = b.upper[0] - b.lower[0];
            bool cube = true;
            for (std::size_t i = 1; i < b.lower.size(); ++i) {
                if (std::abs((b.upper[i] - b.lower[i]) - first) > 1e-12) {
                    cube = false;
                    break;
                }
            }
            // A cube is center + one edge length; a general box needs both
            // corners.
            return cube ? static_cast<std::int64_t>(b.lower.size()) + 1
                        : static_cast<std::int64_t>(2 * b.lower.size());
        }
        case Region::Kind::RotSquare:
            return 4;
        case Region::Kind::HalfSpace:
            return 1;
        default: {
            std::int64_t total = 0;
            for (const auto& ch : region.children()) total += default_param_count(*ch);
            return total;
        }
    }
}

std::string describe(const Region& region) {
    std::ostringstream os;
    switch (region.kind()) {
        case Region::Kind::Ball: {
            const Ball& b = region.ball();
            os << "ball(c=(";
            for (std::size_t i = 0; i < b.center.size(); ++i) {
                os << (i ? "," : "") << b.center[i];
            }
            os << "), r=" << b.radius << ")";
            break;
        }
        case Region::Kind::Box:
            os << "box(dim=" << region.box().lower.size() << ")";
            break;
        case Region::Kind::RotSquare: {
            const RotatedSquare& s = region.rot_square();
            os << "rotsquare(c=(" << s.cx << "," << s.cy << "), e=" << s.edge
               << ", a=" << s.angle << ")";
            break;
        }
        case Region::Kind::HalfSpace:
            os << "halfspace(offset=" << region.half_space().offset << ")";
            break;
        case Region::Kind::Union: os << "union[" << region.children().size() << "]"; break;
        case Region::Kind::Intersect: os << "intersect[" << region.children().size() << "]"; break;
        case Region::Kind::Diff: os << "diff"; break;
    }
    return os.str();
}

} // namespace spikelab
