#pragma once

#include <stdexcept>
#include <string>

namespace spikelab {

// Base class for everything this library throws on purpose, so callers can
// separate our diagnostics from std::bad_alloc and friends.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Point/space dimensionality disagreement.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Bad geometric construction (negative radius, malformed tree, ...).
class GeometryError : public Error {
public:
    using Error::Error;
};

// A composite region has no closed-form measure and no Monte Carlo
// configuration was supplied.
class NeedsMonteCarloError : public GeometryError {
public:
    using GeometryError::GeometryError;
};

// Z-test inputs where M + M' is 0 or 2N; the statistic is undefined there
// and those runs carry no usable signal.
class DegenerateCountsError : public Error {
public:
    using Error::Error;
};

// Invalid configuration or arguments at the library level.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Scene/report schema violations; message carries a JSON-path-like locator.
class SchemaError : public Error {
public:
    using Error::Error;
};

// File ingestion problems (missing file, bad magic, truncation).
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace spikelab
