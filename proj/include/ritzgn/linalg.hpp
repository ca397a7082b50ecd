#pragma once

#include "ritzgn/types.hpp"

namespace ritzgn {

inline constexpr double kDefaultRankTol = 1e-10;

/// Thin SVD A = U·diag(σ)·Vᵀ with σ nonincreasing. `rank` is the numerical
/// rank at the threshold passed to svd().
struct SvdResult {
  Matrix U;
  Vector sigma;
  Matrix V;
  int rank = 0;
  double tau_rel = kDefaultRankTol;

  [[nodiscard]] Index rows() const { return U.rows(); }
  [[nodiscard]] Index cols() const { return V.rows(); }
};

/// Throws Error on non-finite input.
[[nodiscard]] SvdResult svd(const Matrix& A, double tau_rel = kDefaultRankTol);

/// Count of σ_i > τ_rel·σ_1; 0 for the zero matrix.
[[nodiscard]] int numerical_rank(const SvdResult& s, double tau_rel);
[[nodiscard]] int numerical_rank(const Matrix& A, double tau_rel = kDefaultRankTol);

/// V·Σ_r⁻¹·Uᵀ keeping σ_i > τ_rel·σ_1. Throws ConfigError unless 0 < τ_rel < 1.
[[nodiscard]] Matrix pinv_rank_r(const SvdResult& s, double tau_rel);
[[nodiscard]] Matrix pinv_rank_r(const Matrix& A, double tau_rel = kDefaultRankTol);

/// A†·b without forming A†. Returns the rank used through `rank_used`.
[[nodiscard]] Vector pinv_apply(const SvdResult& s, const Vector& b, double tau_rel, int* rank_used = nullptr);

/// Solves (BᵀB)†·g from the SVD of the factor B: J = BᵀB has singular values
/// σ_i(B)², truncated at τ_rel relative to σ_1(B)².
[[nodiscard]] Vector gram_pinv_apply(const SvdResult& factor, const Vector& g, double tau_rel,
                                     int* rank_used = nullptr);

/// Largest singular value by power iteration on MᵀM.
[[nodiscard]] double spectral_norm(const Matrix& M, double tol = 1e-8, int max_iters = 10000);

/// Residuals of the four Penrose conditions for X ≈ A†, in max-abs norm.
struct PenroseResiduals {
  double axa = 0, xax = 0, ax_sym = 0, xa_sym = 0;
  [[nodiscard]] double max() const;
};
[[nodiscard]] PenroseResiduals penrose_residuals(const Matrix& A, const Matrix& X);

/// ‖(A+E)† − A†‖ against μ·‖A†‖·‖(A+E)†‖·‖E‖ in the spectral and Frobenius norms.
struct WedinReport {
  bool applicable = true;  // rank(A + E) == rank(A) at τ_rel
  int rank_a = 0;
  int rank_b = 0;
  double lhs_2 = 0, rhs_2 = 0, mu_2 = 0;  // rhs at μ = 1; mu = smallest μ that holds
  double lhs_f = 0, rhs_f = 0, mu_f = 0;
  double pinv_norm_a = 0, pinv_norm_b = 0, e_norm_2 = 0;
  /// ‖A†‖/(1 − ‖A†‖‖E‖) when ‖A†‖‖E‖ < 1, else +inf.
  double pinv_growth_bound = 0;
};
[[nodiscard]] WedinReport wedin_check(const Matrix& A, const Matrix& E, double tau_rel = kDefaultRankTol);

}  // namespace ritzgn
