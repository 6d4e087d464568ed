#pragma once

#include <stdexcept>
#include <string>

namespace avf {

/// Dimensions or explicit description do not define a valid graph.
struct GeometryError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A parent assignment that is not a boundary-rooted spanning forest.
struct ForestError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A configuration that was required to be recurrent is not.
struct NotRecurrentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Exhaustive enumeration would exceed its search-space guard.
struct GuardExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Singular or ill-conditioned linear algebra, or non-converged quadrature.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Not enough data for an estimator.
struct InsufficientData : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace avf
