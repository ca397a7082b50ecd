#include "ritzgn/collocation.hpp"

#include "ritzgn/linalg.hpp"
#include "ritzgn/variational.hpp"

namespace ritzgn {
namespace {

void check_collocation_inputs(const Model& model, const ParamVector& theta, const Problem& problem,
                              const QuadratureRule& rule) {
  check_assembly_inputs(model, theta, problem, rule);
  if (!rule.has_boundary()) throw ConfigError("collocation needs boundary nodes in the rule");
  if (rule.boundary_normals.size() != rule.boundary_size() || rule.boundary_weights.size() != rule.boundary_size()) {
    throw DimensionError("boundary nodes, normals and weights differ in length");
  }
}

}  // namespace

ResidualSystem residual_system(const Model& model, const ParamVector& theta, const Problem& problem,
                               const QuadratureRule& rule) {
  check_collocation_inputs(model, theta, problem, rule);
  const Index ni = static_cast<Index>(rule.interior_size());
  const Index rows = static_cast<Index>(rule.size());
  ResidualSystem s;
  s.residual.resize(rows);
  s.jacobian.resize(rows, theta.size());
  s.weighting.resize(theta.size(), rows);
  for (Index p = 0; p < ni; ++p) {
    const auto pi = static_cast<std::size_t>(p);
    const double x = rule.interior_nodes[pi];
    const PointJet j = point_jet(model, theta, x);
    s.residual[p] = -problem.a * j.laplacian + problem.c * j.u - problem.f(x);
    s.jacobian.row(p) = (-problem.a * j.d_laplacian + problem.c * j.d_u).transpose();
    s.weighting.col(p) = rule.interior_weights[pi] * j.d_u;
  }
  for (Index q = 0; q < static_cast<Index>(rule.boundary_size()); ++q) {
    const auto qi = static_cast<std::size_t>(q);
    const PointJet j = point_jet(model, theta, rule.boundary_nodes[qi]);
    const double an = problem.a * rule.boundary_normals[qi];
    s.residual[ni + q] = an * j.grad_x[0];
    s.jacobian.row(ni + q) = an * j.d_grad_x.col(0).transpose();
    s.weighting.col(ni + q) = rule.boundary_weights[qi] * j.d_u;
  }
  return s;
}

Vector residual_vector(const Model& model, const ParamVector& theta, const Problem& problem,
                       const QuadratureRule& rule) {
  return residual_system(model, theta, problem, rule).residual;
}

Matrix residual_jacobian(const Model& model, const ParamVector& theta, const Problem& problem,
                         const QuadratureRule& rule) {
  return residual_system(model, theta, problem, rule).jacobian;
}

Matrix weighting_matrix(const Model& model, const ParamVector& theta, const QuadratureRule& rule) {
  if (!rule.has_boundary()) throw ConfigError("collocation needs boundary nodes in the rule");
  if (theta.size() != num_params(model)) throw DimensionError("θ length does not match the model");
  const Index ni = static_cast<Index>(rule.interior_size());
  Matrix G(theta.size(), static_cast<Index>(rule.size()));
  for (Index p = 0; p < ni; ++p) {
    const auto pi = static_cast<std::size_t>(p);
    G.col(p) = rule.interior_weights[pi] * point_jet(model, theta, rule.interior_nodes[pi]).d_u;
  }
  for (Index q = 0; q < static_cast<Index>(rule.boundary_size()); ++q) {
    const auto qi = static_cast<std::size_t>(q);
    G.col(ni + q) = rule.boundary_weights[qi] * point_jet(model, theta, rule.boundary_nodes[qi]).d_u;
  }
  return G;
}

ConsistencyReport consistency_report(const Model& model, const ParamVector& theta, const Problem& problem,
                                     const QuadratureRule& rule, double tau_rank, double tau_pinv) {
  const ResidualSystem s = residual_system(model, theta, problem, rule);
  ConsistencyReport rep;
  const Matrix GJ = s.weighting * s.jacobian;
  rep.identity_error = (gn_matrix_divergence_form(model, theta, problem, rule) - GJ).cwiseAbs().maxCoeff();
  rep.volume_form_gap = (gauss_newton_matrix(model, theta, problem, rule) - GJ).cwiseAbs().maxCoeff();
  rep.columns_g = static_cast<int>(s.weighting.cols());
  rep.rank_g = numerical_rank(s.weighting, tau_rank);

  rep.variational_step = pinv_apply(svd(GJ, tau_pinv), s.weighting * s.residual, tau_pinv);
  rep.collocation_step = pinv_apply(svd(s.jacobian, tau_pinv), s.residual, tau_pinv);
  rep.step_difference = (rep.variational_step - rep.collocation_step).norm();
  rep.steps_equal = rep.step_difference <= 1e-8 * (1.0 + rep.collocation_step.norm());
  return rep;
}

}  // namespace ritzgn
