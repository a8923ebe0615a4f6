#include "spikelab/spiking.hpp"

#include <cmath>

namespace spikelab {

ReferenceSet ReferenceSet::from_rows(std::size_t count, std::size_t dim,
                                     const std::function<double(std::size_t, std::size_t)>& at) {
    if (count == 0) throw ConfigError("reference set must not be empty");
    if (dim == 0) throw ConfigError("reference vectors must have at least one element");
    ReferenceSet rs;
    rs.count = count;
    rs.dim = dim;
    rs.normalized.resize(count * dim);
    std::vector<double> row(dim);
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = 0; j < dim; ++j) row[j] = at(i, j);
        normalize_row(row, std::span<float>(rs.normalized.data() + i * dim, dim));
    }
    return rs;
}

void normalize_row(std::span<const double> in, std::span<float> out) {
    double mean = 0.0;
    for (double v : in) mean += v;
    mean /= static_cast<double>(in.size());
    double ss = 0.0;
    for (double v : in) ss += (v - mean) * (v - mean);
    if (ss <= 0.0) {
        // Constant vector: no linear similarity to anything; store zeros so
        // every correlation against it is 0.
        for (auto& o : out) o = 0.0f;
        return;
    }
    double inv = 1.0 / std::sqrt(ss);
    for (std::size_t j = 0; j < in.size(); ++j) {
        out[j] = static_cast<float>((in[j] - mean) * inv);
    }
}

void ContourConfig::validate() const {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) {
        throw ConfigError("contour grid kappa must be positive and finite");
    }
    if (top_level < 0) throw ConfigError("contour top level must be nonnegative");
}

int value_level(double value, const ContourConfig& contour) {
    if (value <= 0.0) return -1;
    if (value > contour.top_level * contour.kappa) return contour.top_level;
    // value lies in (l*kappa, (l+1)*kappa] for some l < top_level.
    int l = static_cast<int>(std::ceil(value / contour.kappa)) - 1;
    if (l < 0) l = 0;
    if (l > contour.top_level) l = contour.top_level;
    return l;
}

SpikingFunction SpikingFunction::indicator(RegionPtr region, double inside_value,
                                           double outside_value,
                                           std::optional<std::int64_t> size_override) {
    if (!region) throw ConfigError("indicator function needs a region");
    SpikingFunction f;
    f.kind_ = Kind::Indicator;
    f.region_ = std::move(region);
    f.inside_value_ = inside_value;
    f.outside_value_ = outside_value;
    f.size_ = size_override.value_or(default_param_count(*f.region_));
    if (f.size_ < 1) throw ConfigError("function size must be at least 1");
    f.tag_ = "indicator";
    return f;
}

SpikingFunction SpikingFunction::max_correlation(std::shared_ptr<const ReferenceSet> refs,
                                                 double threshold, std::string tag) {
    if (!refs || refs->count == 0) {
        throw ConfigError("max-correlation function needs a nonempty reference set");
    }
    SpikingFunction f;
    f.kind_ = Kind::MaxCorrelation;
    f.refs_ = std::move(refs);
    f.threshold_ = threshold;
    f.size_ = static_cast<std::int64_t>(f.refs_->dim) * static_cast<std::int64_t>(f.refs_->count);
    f.tag_ = std::move(tag);
    return f;
}

SpikingFunction SpikingFunction::custom(std::function<double(std::span<const double>)> body,
                                        std::int64_t size, std::string tag) {
    if (!body) throw ConfigError("custom function needs a callable body");
    if (size < 1) throw ConfigError("function size must be at least 1");
    SpikingFunction f;
    f.kind_ = Kind::Custom;
    f.body_ = std::move(body);
    f.size_ = size;
    f.tag_ = std::move(tag);
    return f;
}

double SpikingFunction::evaluate(std::span<const double> point) const {
    switch (kind_) {
        case Kind::Indicator:
            return contains(*region_, point) ? inside_value_ : outside_value_;
        case Kind::MaxCorrelation: {
            if (point.size() != refs_->dim) {
                throw DimensionError("probe dimension does not match reference set");
            }
            std::vector<float> probe(refs_->dim);
            normalize_row(point, probe);
            double best = -1.0;
            const float* ref = refs_->normalized.data();
            for (std::size_t i = 0; i < refs_->count; ++i, ref += refs_->dim) {
                double dot = 0.0;
                for (std::size_t j = 0; j < refs_->dim; ++j) {
                    dot += static_cast<double>(ref[j]) * probe[j];
                }
                if (dot > best) best = dot;
            }
            return best - threshold_;
        }
        case Kind::Custom: return body_(point);
    }
    return 0.0;
}

int SpikingFunction::spike_level(std::span<const double> point,
                                 const ContourConfig& contour) const {
    contour.validate();
    return value_level(evaluate(point), contour);
}

} // namespace spikelab
