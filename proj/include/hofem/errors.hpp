#pragma once

#include <stdexcept>

namespace hofem {

// Invalid scalar arguments are reported with std::invalid_argument directly.
// The types below mark the failure classes callers are expected to tell apart.

/// Tensor or vector extents do not match what an operation requires.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An element map has a (near) vanishing Jacobian determinant.
class DegenerateGeometry : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input field contains NaN or infinity.
class NonFiniteInput : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Requested operator variant is not defined for the benchmark.
class UnsupportedVariant : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Memory could not be obtained for a buffer.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hofem
