#include "ritzgn/problem.hpp"

#include <cmath>
#include <numbers>

namespace ritzgn {

void Problem::validate() const {
  if (!(a >= 0.0) || !std::isfinite(a)) throw ConfigError("diffusion coefficient a must be >= 0");
  if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("reaction coefficient c must be > 0");
  if (!f) throw ConfigError("problem has no source term");
  if (!(domain.lo < domain.hi)) throw ConfigError("problem domain is degenerate");
}

Problem builtin_problem(const std::string& name, double a, double c) {
  constexpr double pi = std::numbers::pi;
  Problem p;
  p.a = a;
  p.c = c;
  p.domain = {-1.0, 1.0};
  if (name == "cos-neumann-1d") {
    // cos(πx) has zero flux at ±1, so it solves the Neumann problem for any a, c.
    p.f = [a, c](double x) { return (a * pi * pi + c) * std::cos(pi * x); };
    p.exact = [](double x) { return std::cos(pi * x); };
    p.exact_grad = [](double x) { return -pi * std::sin(pi * x); };
  } else if (name == "zero") {
    p.f = [](double) { return 0.0; };
    p.exact = [](double) { return 0.0; };
    p.exact_grad = [](double) { return 0.0; };
  } else if (name == "one") {
    p.f = [](double) { return 1.0; };
    p.exact = [c](double) { return 1.0 / c; };
    p.exact_grad = [](double) { return 0.0; };
  } else {
    throw ConfigError("unknown builtin problem '" + name + "'");
  }
  p.validate();
  return p;
}

double cos_neumann_min_energy() {
  constexpr double pi = std::numbers::pi;
  return -(pi * pi + 1.0) / 2.0;
}

}  // namespace ritzgn
