#pragma once

#include "ritzgn/types.hpp"

#include <functional>
#include <optional>
#include <string>

namespace ritzgn {

using ScalarField = std::function<double(double)>;

/// -a·Δv + c·v = f on `domain` with zero Neumann data.
struct Problem {
  double a = 1.0;
  double c = 1.0;
  ScalarField f;
  Interval domain;
  std::optional<ScalarField> exact;       // v, metrics only
  std::optional<ScalarField> exact_grad;  // v'

  /// Throws ConfigError unless a >= 0, c > 0, f is set, and the domain is proper.
  void validate() const;
  [[nodiscard]] bool has_exact() const { return exact.has_value() && exact_grad.has_value(); }
};

/// Registry lookup. Known names: "cos-neumann-1d" (a = c = 1 on (-1, 1),
/// f = (π² + 1)·cos(πx), exact cos(πx)), "zero" (f ≡ 0, exact 0),
/// "one" (f ≡ 1, exact 1/c). Throws ConfigError for unknown names.
[[nodiscard]] Problem builtin_problem(const std::string& name, double a = 1.0, double c = 1.0);

/// The minimum energy of cos-neumann-1d: -(π² + 1) / 2.
[[nodiscard]] double cos_neumann_min_energy();

}  // namespace ritzgn
