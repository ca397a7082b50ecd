#pragma once

#include "ritzgn/linalg.hpp"
#include "ritzgn/model.hpp"
#include "ritzgn/problem.hpp"
#include "ritzgn/quadrature.hpp"

#include <string>

namespace ritzgn {

/// Which gradient field the stationarity analysis differentiates: the volume
/// form ∫ a∇_θ∇u·∇u + (cu − f)∇_θu, or the divergence form G·F.
enum class GradientForm { volume, divergence };

struct SemiregularityReport {
  int m = 0;
  int rank_j = 0;
  int rank_h = 0;
  int nullity = 0;         // m − rank_h
  int branch_dim = 0;      // near-null H directions along which ∇L stays zero
  bool stationary = true;  // ‖∇L(θ*)‖ ≤ 1e-6
  double grad_norm = 0.0;
  Vector sigma_h;
  [[nodiscard]] bool consistent() const { return branch_dim + rank_h == m; }
  [[nodiscard]] bool regular() const { return consistent() && nullity == 0; }
  /// "regular zero", "semiregular zero, dim k", or "not semiregular".
  [[nodiscard]] std::string classification() const;
};

struct SemiregularityOptions {
  GradientForm form = GradientForm::volume;
  double tau_rel = 1e-8;      // rank threshold for J and H
  double flat_tol = 1e-8;     // ‖∇L(θ* + t·e)‖ bound on a branch
  double fd_step = 1e-4;
};

/// H is the central-difference Jacobian of the chosen gradient (symmetrized for
/// the volume form). Each right-singular direction of H beyond its numerical
/// rank is probed at t ∈ {±1e-3, ±1e-2}; it counts toward the branch when the
/// gradient norm stays within flat_tol at all four points.
[[nodiscard]] SemiregularityReport semiregularity_report(const Model& model, const ParamVector& theta_star,
                                                         const Problem& problem, const QuadratureRule& rule,
                                                         const SemiregularityOptions& options = {});

/// The gradient in the requested form.
[[nodiscard]] Vector gradient_in_form(const Model& model, const ParamVector& theta, const Problem& problem,
                                      const QuadratureRule& rule, GradientForm form);

/// Central-difference Jacobian of gradient_in_form, not symmetrized.
[[nodiscard]] Matrix gradient_jacobian_fd(const Model& model, const ParamVector& theta, const Problem& problem,
                                          const QuadratureRule& rule, GradientForm form, double h = 1e-4);

}  // namespace ritzgn
