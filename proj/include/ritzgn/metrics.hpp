#pragma once

#include "ritzgn/model.hpp"
#include "ritzgn/problem.hpp"
#include "ritzgn/quadrature.hpp"

#include <string>
#include <vector>

namespace ritzgn {

/// Errors of u(·, θ) against the exact solution v.
struct ErrorReport {
  double l2 = 0.0;           // ‖u − v‖_L²
  double h1_semi = 0.0;      // ‖∇(u − v)‖_L²
  double h1 = 0.0;           // full norm, √(l2² + h1_semi²)
  double energy_norm = 0.0;  // √∫ (a/2)|∇(u−v)|² + (c/2)(u−v)²
  double energy_gap = 0.0;   // L(u) − L(v)
};

/// Throws ConfigError when the problem has no exact solution.
[[nodiscard]] ErrorReport error_norms(const Model& model, const ParamVector& theta, const Problem& problem,
                                      const QuadratureRule& fine_rule);

/// Same quantities with v given by a second model (for example a FEM interpolant).
[[nodiscard]] ErrorReport error_norms_against(const Model& model, const ParamVector& theta, const Model& reference,
                                              const ParamVector& reference_theta, const Problem& problem,
                                              const QuadratureRule& fine_rule);

/// The default error rule: Gauss-Legendre of order 400 on the domain.
[[nodiscard]] QuadratureRule default_error_rule(Interval domain, int order = 400);

enum class Phase { quadratic, linear, stalled };

[[nodiscard]] std::string to_string(Phase p);

struct PhaseSegment {
  Phase phase;
  int begin = 0;  // index into the step-norm sequence, inclusive
  int end = 0;    // exclusive
};

struct ConvergenceReport {
  std::vector<double> ratios;          // s_{k+1} / s_k
  std::vector<double> orders;          // log(s_{k+1}/s_k) / log(s_k/s_{k−1})
  std::vector<Phase> step_phase;       // one per step norm
  std::vector<PhaseSegment> segments;  // maximal runs of equal phase, covering every step
  double terminal_coefficient = 0.0;   // geometric mean of the last window of ratios
  int iterations_to_tolerance = -1;    // first 1-based k with s_k ≤ tolerance, −1 if never
  int contracting_in_last_20 = 0;      // ratios ≤ 1 among the last 20
};

/// Classifies step norms: order ≥ 1.5 with shrinking steps is quadratic-like,
/// ratio < stall_ratio is linear, anything else stalled. Throws ConfigError
/// for fewer than 4 steps.
[[nodiscard]] ConvergenceReport convergence_phases(const std::vector<double>& step_norms, double tolerance = 1e-8,
                                                   int window = 5, double stall_ratio = 0.95);

}  // namespace ritzgn
