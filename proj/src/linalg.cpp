#include "ritzgn/linalg.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace ritzgn {
namespace {

void check_tau(double tau_rel) {
  if (!(tau_rel > 0.0 && tau_rel < 1.0)) throw ConfigError("rank threshold must lie in (0, 1)");
}

int count_above(const Vector& sigma, double threshold_rel) {
  if (sigma.size() == 0 || !(sigma[0] > 0.0)) return 0;
  const double cut = threshold_rel * sigma[0];
  int r = 0;
  while (r < sigma.size() && sigma[r] > cut) ++r;
  return r;
}

}  // namespace

SvdResult svd(const Matrix& A, double tau_rel) {
  check_tau(tau_rel);
  if (!A.allFinite()) throw Error("svd: matrix has non-finite entries");
  SvdResult out;
  out.tau_rel = tau_rel;
  if (A.size() == 0) {
    out.U = Matrix::Zero(A.rows(), 0);
    out.V = Matrix::Zero(A.cols(), 0);
    out.sigma = Vector::Zero(0);
    return out;
  }
  Eigen::BDCSVD<Matrix> dec(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.U = dec.matrixU();
  out.sigma = dec.singularValues();
  out.V = dec.matrixV();
  out.rank = count_above(out.sigma, tau_rel);
  return out;
}

int numerical_rank(const SvdResult& s, double tau_rel) {
  check_tau(tau_rel);
  return count_above(s.sigma, tau_rel);
}

int numerical_rank(const Matrix& A, double tau_rel) { return svd(A, tau_rel).rank; }

Matrix pinv_rank_r(const SvdResult& s, double tau_rel) {
  check_tau(tau_rel);
  const int r = count_above(s.sigma, tau_rel);
  Matrix X = Matrix::Zero(s.cols(), s.rows());
  if (r == 0) return X;
  const Vector inv = s.sigma.head(r).cwiseInverse();
  X.noalias() = s.V.leftCols(r) * inv.asDiagonal() * s.U.leftCols(r).transpose();
  return X;
}

Matrix pinv_rank_r(const Matrix& A, double tau_rel) { return pinv_rank_r(svd(A, tau_rel), tau_rel); }

Vector pinv_apply(const SvdResult& s, const Vector& b, double tau_rel, int* rank_used) {
  check_tau(tau_rel);
  if (b.size() != s.rows()) throw DimensionError("pinv_apply: right-hand side has the wrong length");
  const int r = count_above(s.sigma, tau_rel);
  if (rank_used) *rank_used = r;
  if (r == 0) return Vector::Zero(s.cols());
  const Vector coeff = (s.U.leftCols(r).transpose() * b).cwiseQuotient(s.sigma.head(r));
  return s.V.leftCols(r) * coeff;
}

Vector gram_pinv_apply(const SvdResult& factor, const Vector& g, double tau_rel, int* rank_used) {
  check_tau(tau_rel);
  if (g.size() != factor.cols()) throw DimensionError("gram_pinv_apply: vector has the wrong length");
  const Vector s2 = factor.sigma.cwiseAbs2();
  const int r = count_above(s2, tau_rel);
  if (rank_used) *rank_used = r;
  if (r == 0) return Vector::Zero(g.size());
  const Vector coeff = (factor.V.leftCols(r).transpose() * g).cwiseQuotient(s2.head(r));
  return factor.V.leftCols(r) * coeff;
}

double spectral_norm(const Matrix& M, double tol, int max_iters) {
  if (M.size() == 0) return 0.0;
  if (!M.allFinite()) throw Error("spectral_norm: matrix has non-finite entries");
  Vector v(M.cols());
  for (Index i = 0; i < v.size(); ++i) v[i] = 1.0 + 0.1 * std::sin(1.0 + static_cast<double>(i));
  v.normalize();
  double est = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    const Vector mv = M * v;
    Vector w = M.transpose() * mv;
    const double next = std::sqrt(mv.squaredNorm());
    const double wn = w.norm();
    if (wn == 0.0) return next;
    v = w / wn;
    if (std::abs(next - est) <= tol * std::max(next, std::numeric_limits<double>::min())) return next;
    est = next;
  }
  return est;
}

double PenroseResiduals::max() const { return std::max({axa, xax, ax_sym, xa_sym}); }

PenroseResiduals penrose_residuals(const Matrix& A, const Matrix& X) {
  if (X.rows() != A.cols() || X.cols() != A.rows()) throw DimensionError("penrose: shapes do not match");
  PenroseResiduals r;
  const Matrix AX = A * X;
  const Matrix XA = X * A;
  r.axa = (AX * A - A).cwiseAbs().maxCoeff();
  r.xax = (XA * X - X).cwiseAbs().maxCoeff();
  r.ax_sym = (AX - AX.transpose()).cwiseAbs().maxCoeff();
  r.xa_sym = (XA - XA.transpose()).cwiseAbs().maxCoeff();
  return r;
}

WedinReport wedin_check(const Matrix& A, const Matrix& E, double tau_rel) {
  if (A.rows() != E.rows() || A.cols() != E.cols()) throw DimensionError("wedin: A and E differ in shape");
  const Matrix B = A + E;
  const SvdResult sa = svd(A, tau_rel);
  const SvdResult sb = svd(B, tau_rel);
  WedinReport rep;
  rep.rank_a = sa.rank;
  rep.rank_b = sb.rank;
  rep.applicable = sa.rank == sb.rank;
  const Matrix Ap = pinv_rank_r(sa, tau_rel);
  const Matrix Bp = pinv_rank_r(sb, tau_rel);
  const Matrix D = Bp - Ap;

  const auto norm2 = [&](const Matrix& M) { return M.size() == 0 ? 0.0 : svd(M, tau_rel).sigma[0]; };
  rep.pinv_norm_a = sa.rank > 0 ? 1.0 / sa.sigma[sa.rank - 1] : 0.0;
  rep.pinv_norm_b = sb.rank > 0 ? 1.0 / sb.sigma[sb.rank - 1] : 0.0;
  rep.e_norm_2 = norm2(E);
  rep.lhs_2 = norm2(D);
  rep.rhs_2 = rep.pinv_norm_a * rep.pinv_norm_b * rep.e_norm_2;
  rep.lhs_f = D.norm();
  rep.rhs_f = Ap.norm() * Bp.norm() * E.norm();
  rep.mu_2 = rep.rhs_2 > 0.0 ? rep.lhs_2 / rep.rhs_2 : 0.0;
  rep.mu_f = rep.rhs_f > 0.0 ? rep.lhs_f / rep.rhs_f : 0.0;
  const double prod = rep.pinv_norm_a * rep.e_norm_2;
  rep.pinv_growth_bound =
      prod < 1.0 ? rep.pinv_norm_a / (1.0 - prod) : std::numeric_limits<double>::infinity();
  return rep;
}

}  // namespace ritzgn
