#pragma once

// Ritz energy L(θ) = ∫ (a/2)|∇u|² + (c/2)u² − f·u, its gradient, and the
// Gauss-Newton matrix, all from one quadrature rule.

#include "ritzgn/model.hpp"
#include "ritzgn/problem.hpp"
#include "ritzgn/quadrature.hpp"

namespace ritzgn {

struct EnergyAssembly {
  double loss = 0.0;
  Vector gradient;
  Matrix gn_matrix;  // empty unless requested
};

/// Throws ConfigError when the rule does not cover problem.domain and
/// DimensionError when θ or the model dimension do not fit.
void check_assembly_inputs(const Model& model, const ParamVector& theta, const Problem& problem,
                           const QuadratureRule& rule);

[[nodiscard]] double energy(const Model& model, const ParamVector& theta, const Problem& problem,
                            const QuadratureRule& rule);

/// ∫ a·∇_θ∇u·∇u + (c·u − f)·∇_θu.
[[nodiscard]] Vector energy_gradient(const Model& model, const ParamVector& theta, const Problem& problem,
                                     const QuadratureRule& rule);

/// ∫ a·(∇_θ∇u)(∇_θ∇u)ᵀ + c·(∇_θu)(∇_θu)ᵀ, exactly symmetric.
[[nodiscard]] Matrix gauss_newton_matrix(const Model& model, const ParamVector& theta, const Problem& problem,
                                         const QuadratureRule& rule);

/// Loss and gradient, plus J when `with_matrix`.
[[nodiscard]] EnergyAssembly assemble_energy(const Model& model, const ParamVector& theta, const Problem& problem,
                                             const QuadratureRule& rule, bool with_matrix = true);

/// B with J = BᵀB: rows √(w·a)·∇_θ∇u followed by rows √(w·c)·∇_θu.
[[nodiscard]] Matrix gauss_newton_factor(const Model& model, const ParamVector& theta, const Problem& problem,
                                         const QuadratureRule& rule);

/// G·F from the collocation residual and weighting matrix (rule needs a boundary part).
[[nodiscard]] Vector gradient_divergence_form(const Model& model, const ParamVector& theta,
                                              const Problem& problem, const QuadratureRule& rule);

/// Σ_p w_p·∇_θu(x_p)·(row p of JF) accumulated point by point; equals G·JF.
[[nodiscard]] Matrix gn_matrix_divergence_form(const Model& model, const ParamVector& theta,
                                               const Problem& problem, const QuadratureRule& rule);

/// Central differences of the analytic gradient, symmetrized.
[[nodiscard]] Matrix fd_hessian(const Model& model, const ParamVector& theta, const Problem& problem,
                                const QuadratureRule& rule, double h = 1e-4);

struct QEstimate {
  Matrix q;        // H_fd − J
  double q_norm = 0.0;
  double j_norm = 0.0;
  [[nodiscard]] double ratio() const { return j_norm > 0.0 ? q_norm / j_norm : 0.0; }
};

/// Q = H_fd − J with spectral norms from power iteration (tol 1e-8).
[[nodiscard]] QEstimate q_matrix_estimate(const Model& model, const ParamVector& theta, const Problem& problem,
                                          const QuadratureRule& rule, double h = 1e-4);

}  // namespace ritzgn
