#pragma once

// Strong-form residual F, its Jacobian JF, and the weighting matrix G with
// ∇L = G·F and J = G·JF. Rows: interior nodes first, then boundary nodes.

#include "ritzgn/model.hpp"
#include "ritzgn/problem.hpp"
#include "ritzgn/quadrature.hpp"

namespace ritzgn {

struct ResidualSystem {
  Vector residual;  // N + n
  Matrix jacobian;  // (N + n) × m
  Matrix weighting; // m × (N + n)
};

/// Interior: −a·Δu + c·u − f. Boundary: a·∇u·n (the flux, so that G·F is the
/// integrated-by-parts gradient for every a). Throws ConfigError without a
/// boundary part.
[[nodiscard]] Vector residual_vector(const Model& model, const ParamVector& theta, const Problem& problem,
                                     const QuadratureRule& rule);

/// Interior rows −a·∇_θΔu + c·∇_θu, boundary rows a·∇_θ∇u·n.
[[nodiscard]] Matrix residual_jacobian(const Model& model, const ParamVector& theta, const Problem& problem,
                                       const QuadratureRule& rule);

/// Column p is w_p·∇_θu(x_p); boundary weights come from the rule.
[[nodiscard]] Matrix weighting_matrix(const Model& model, const ParamVector& theta, const QuadratureRule& rule);

[[nodiscard]] ResidualSystem residual_system(const Model& model, const ParamVector& theta, const Problem& problem,
                                             const QuadratureRule& rule);

struct ConsistencyReport {
  double identity_error = 0.0;     // max |J_div − G·JF|
  double volume_form_gap = 0.0;    // max |J_volume − G·JF|, a quadrature-error diagnostic
  int rank_g = 0;
  int columns_g = 0;               // N + n
  Vector variational_step;         // (G·JF)†·(G·F)
  Vector collocation_step;         // JF†·F
  double step_difference = 0.0;    // ‖variational − collocation‖
  bool steps_equal = false;        // difference ≤ 1e-8·(1 + ‖collocation‖)
  [[nodiscard]] bool full_column_rank() const { return rank_g == columns_g; }
};

[[nodiscard]] ConsistencyReport consistency_report(const Model& model, const ParamVector& theta,
                                                   const Problem& problem, const QuadratureRule& rule,
                                                   double tau_rank = 1e-10, double tau_pinv = 1e-10);

}  // namespace ritzgn
