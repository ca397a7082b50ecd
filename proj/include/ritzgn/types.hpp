#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace ritzgn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Flat parameter vector of a discretization model, the optimizer state.
using ParamVector = Eigen::VectorXd;

/// Closed interval [lo, hi] of the real line.
struct Interval {
  double lo = -1.0;
  double hi = 1.0;

  [[nodiscard]] double length() const { return hi - lo; }
  [[nodiscard]] bool contains(double x) const { return x >= lo && x <= hi; }
  bool operator==(const Interval&) const = default;
};

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sizes of θ, a rule, or a matrix do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A configuration or argument is outside its valid range.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An iteration produced a non-finite quantity.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

[[nodiscard]] inline bool all_finite(const Eigen::Ref<const Matrix>& m) { return m.allFinite(); }

}  // namespace ritzgn
