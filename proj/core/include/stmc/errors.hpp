#pragma once

#include <stdexcept>
#include <string>

namespace stmc {

// Bad user input: unknown keys, out-of-range parameters, malformed files.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Evaluation outside the valid ambient domain (e.g. inside r_min).
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Metric not positive definite at an evaluation point.
struct SingularMetricError : std::runtime_error {
  explicit SingularMetricError(const std::string& msg) : std::runtime_error(msg) {}
};

// Induced metric lost rank somewhere on the surface.
struct DegenerateImmersionError : std::runtime_error {
  explicit DegenerateImmersionError(const std::string& msg) : std::runtime_error(msg) {}
};

// H^q - |P|^q <= 0 somewhere: the generalized curvature is undefined.
struct AdmissibilityError : std::runtime_error {
  explicit AdmissibilityError(const std::string& msg) : std::runtime_error(msg) {}
};

// The evolving surface stopped being a radial graph over its center.
struct GraphBreakdownError : std::runtime_error {
  explicit GraphBreakdownError(const std::string& msg) : std::runtime_error(msg) {}
};

// NaN/Inf appeared in a state field.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Not enough samples for a requested fit or statistic.
struct InsufficientDataError : std::runtime_error {
  explicit InsufficientDataError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace stmc
