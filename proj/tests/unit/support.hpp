#pragma once

// Generators and finite-difference oracles shared by the unit tests.

#include "ritzgn/model.hpp"
#include "ritzgn/problem.hpp"
#include "ritzgn/quadrature.hpp"
#include "ritzgn/random.hpp"

#include <cmath>
#include <functional>

namespace ritzgn::testing {

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

inline double rel_err(const Vector& a, const Vector& b) {
  return (a - b).norm() / std::max(1.0, std::max(a.norm(), b.norm()));
}

inline double rel_err(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max(1.0, std::max(a.norm(), b.norm()));
}

/// A tanh network of random width in [1, max_width] with θ of moderate size.
struct NetDraw {
  NetworkModel model;
  ParamVector theta;
};

inline NetDraw random_tanh_net(Rng& rng, int max_width = 12, TrainableMask mask = {}) {
  const int width = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_width)));
  NetworkModel model(width, 1, ActivationSpec::tanh(), mask);
  ParamVector theta(model.num_params());
  for (Index i = 0; i < theta.size(); ++i) theta[i] = rng.uniform(-1.5, 1.5);
  return {model, theta};
}

inline ParamVector random_theta(Rng& rng, int m, double scale = 1.0) {
  ParamVector t(m);
  for (Index i = 0; i < m; ++i) t[i] = rng.uniform(-scale, scale);
  return t;
}

/// Central difference of a scalar function of θ.
inline Vector fd_gradient(const std::function<double(const ParamVector&)>& f, const ParamVector& theta, double h) {
  Vector g(theta.size());
  for (Index i = 0; i < theta.size(); ++i) {
    ParamVector p = theta, q = theta;
    p[i] += h;
    q[i] -= h;
    g[i] = (f(p) - f(q)) / (2 * h);
  }
  return g;
}

/// Central difference of a vector function of θ, one column per parameter.
inline Matrix fd_jacobian(const std::function<Vector(const ParamVector&)>& f, const ParamVector& theta, double h) {
  const Vector f0 = f(theta);
  Matrix J(f0.size(), theta.size());
  for (Index i = 0; i < theta.size(); ++i) {
    ParamVector p = theta, q = theta;
    p[i] += h;
    q[i] -= h;
    J.col(i) = (f(p) - f(q)) / (2 * h);
  }
  return J;
}

}  // namespace ritzgn::testing
