#include "ritzgn/diagnostics.hpp"

#include "ritzgn/collocation.hpp"
#include "ritzgn/variational.hpp"

namespace ritzgn {

std::string SemiregularityReport::classification() const {
  if (!consistent()) return "not semiregular";
  if (nullity == 0) return "regular zero";
  return "semiregular zero, dim " + std::to_string(branch_dim);
}

Vector gradient_in_form(const Model& model, const ParamVector& theta, const Problem& problem,
                        const QuadratureRule& rule, GradientForm form) {
  return form == GradientForm::volume ? energy_gradient(model, theta, problem, rule)
                                      : gradient_divergence_form(model, theta, problem, rule);
}

Matrix gradient_jacobian_fd(const Model& model, const ParamVector& theta, const Problem& problem,
                            const QuadratureRule& rule, GradientForm form, double h) {
  if (!(h > 0.0)) throw ConfigError("finite-difference step must be positive");
  const Index m = theta.size();
  Matrix H(m, m);
  ParamVector probe = theta;
  for (Index k = 0; k < m; ++k) {
    probe[k] = theta[k] + h;
    const Vector gp = gradient_in_form(model, probe, problem, rule, form);
    probe[k] = theta[k] - h;
    const Vector gm = gradient_in_form(model, probe, problem, rule, form);
    probe[k] = theta[k];
    H.col(k) = (gp - gm) / (2.0 * h);
  }
  return H;
}

SemiregularityReport semiregularity_report(const Model& model, const ParamVector& theta_star,
                                           const Problem& problem, const QuadratureRule& rule,
                                           const SemiregularityOptions& o) {
  SemiregularityReport rep;
  rep.m = static_cast<int>(theta_star.size());
  rep.grad_norm = gradient_in_form(model, theta_star, problem, rule, o.form).norm();
  rep.stationary = rep.grad_norm <= 1e-6;

  const Matrix J = o.form == GradientForm::volume ? gauss_newton_matrix(model, theta_star, problem, rule)
                                                  : gn_matrix_divergence_form(model, theta_star, problem, rule);
  rep.rank_j = numerical_rank(J, o.tau_rel);

  Matrix H = gradient_jacobian_fd(model, theta_star, problem, rule, o.form, o.fd_step);
  if (o.form == GradientForm::volume) H = 0.5 * (H + H.transpose());
  const SvdResult sh = svd(H, o.tau_rel);
  rep.sigma_h = sh.sigma;
  rep.rank_h = sh.rank;
  rep.nullity = rep.m - rep.rank_h;

  // Thin SVD of a square matrix returns all m right-singular vectors.
  const double ts[] = {-1e-2, -1e-3, 1e-3, 1e-2};
  for (int k = rep.rank_h; k < rep.m; ++k) {
    const Vector e = sh.V.col(k);
    bool flat = true;
    for (double t : ts) {
      const ParamVector probe = theta_star + t * e;
      if (gradient_in_form(model, probe, problem, rule, o.form).norm() > o.flat_tol) {
        flat = false;
        break;
      }
    }
    if (flat) ++rep.branch_dim;
  }
  return rep;
}

}  // namespace ritzgn
