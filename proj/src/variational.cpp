#include "ritzgn/variational.hpp"

#include "ritzgn/collocation.hpp"
#include "ritzgn/linalg.hpp"

#include <cmath>

namespace ritzgn {

void check_assembly_inputs(const Model& model, const ParamVector& theta, const Problem& problem,
                           const QuadratureRule& rule) {
  problem.validate();
  if (!(rule.domain == problem.domain)) throw ConfigError("quadrature rule does not cover the problem domain");
  if (spatial_dim(model) != 1) throw DimensionError("assembly is implemented for 1D models only");
  if (theta.size() != num_params(model)) throw DimensionError("θ length does not match the model");
  if (rule.interior_weights.size() != rule.interior_nodes.size()) {
    throw DimensionError("interior nodes and weights differ in length");
  }
}

EnergyAssembly assemble_energy(const Model& model, const ParamVector& theta, const Problem& problem,
                               const QuadratureRule& rule, bool with_matrix) {
  check_assembly_inputs(model, theta, problem, rule);
  const Index m = theta.size();
  EnergyAssembly out;
  out.gradient = Vector::Zero(m);
  if (with_matrix) out.gn_matrix = Matrix::Zero(m, m);
  for (std::size_t p = 0; p < rule.interior_size(); ++p) {
    const double x = rule.interior_nodes[p];
    const double w = rule.interior_weights[p];
    const PointJet j = point_jet(model, theta, x);
    const double fx = problem.f(x);
    const double ux = j.grad_x[0];
    out.loss += w * (0.5 * problem.a * ux * ux + 0.5 * problem.c * j.u * j.u - fx * j.u);
    out.gradient.noalias() += (w * problem.a * ux) * j.d_grad_x.col(0);
    out.gradient.noalias() += (w * (problem.c * j.u - fx)) * j.d_u;
    if (with_matrix) {
      auto lower = out.gn_matrix.selfadjointView<Eigen::Lower>();
      lower.rankUpdate(j.d_grad_x.col(0), w * problem.a);
      lower.rankUpdate(j.d_u, w * problem.c);
    }
  }
  if (with_matrix) {
    out.gn_matrix.triangularView<Eigen::StrictlyUpper>() = out.gn_matrix.transpose();
  }
  return out;
}

double energy(const Model& model, const ParamVector& theta, const Problem& problem, const QuadratureRule& rule) {
  check_assembly_inputs(model, theta, problem, rule);
  double loss = 0.0;
  for (std::size_t p = 0; p < rule.interior_size(); ++p) {
    const double x = rule.interior_nodes[p];
    const auto [u, gx] = eval_with_grad(model, theta, std::span<const double>(&x, 1));
    loss += rule.interior_weights[p] *
            (0.5 * problem.a * gx[0] * gx[0] + 0.5 * problem.c * u * u - problem.f(x) * u);
  }
  return loss;
}

Vector energy_gradient(const Model& model, const ParamVector& theta, const Problem& problem,
                       const QuadratureRule& rule) {
  return assemble_energy(model, theta, problem, rule, false).gradient;
}

Matrix gauss_newton_matrix(const Model& model, const ParamVector& theta, const Problem& problem,
                           const QuadratureRule& rule) {
  return assemble_energy(model, theta, problem, rule, true).gn_matrix;
}

Matrix gauss_newton_factor(const Model& model, const ParamVector& theta, const Problem& problem,
                           const QuadratureRule& rule) {
  check_assembly_inputs(model, theta, problem, rule);
  const Index n = static_cast<Index>(rule.interior_size());
  Matrix B(2 * n, theta.size());
  for (Index p = 0; p < n; ++p) {
    const double x = rule.interior_nodes[static_cast<std::size_t>(p)];
    const double w = rule.interior_weights[static_cast<std::size_t>(p)];
    const PointJet j = point_jet(model, theta, x);
    B.row(p) = std::sqrt(w * problem.a) * j.d_grad_x.col(0).transpose();
    B.row(n + p) = std::sqrt(w * problem.c) * j.d_u.transpose();
  }
  return B;
}

Vector gradient_divergence_form(const Model& model, const ParamVector& theta, const Problem& problem,
                                const QuadratureRule& rule) {
  const Vector F = residual_vector(model, theta, problem, rule);
  const Matrix G = weighting_matrix(model, theta, rule);
  return G * F;
}

Matrix gn_matrix_divergence_form(const Model& model, const ParamVector& theta, const Problem& problem,
                                 const QuadratureRule& rule) {
  check_assembly_inputs(model, theta, problem, rule);
  if (!rule.has_boundary()) throw ConfigError("divergence form needs boundary nodes");
  const Index m = theta.size();
  Matrix J = Matrix::Zero(m, m);
  for (std::size_t p = 0; p < rule.interior_size(); ++p) {
    const double x = rule.interior_nodes[p];
    const PointJet j = point_jet(model, theta, x);
    const Vector row = -problem.a * j.d_laplacian + problem.c * j.d_u;
    J.noalias() += (rule.interior_weights[p] * j.d_u) * row.transpose();
  }
  for (std::size_t q = 0; q < rule.boundary_size(); ++q) {
    const double x = rule.boundary_nodes[q];
    const PointJet j = point_jet(model, theta, x);
    const Vector row = (problem.a * rule.boundary_normals[q]) * j.d_grad_x.col(0);
    J.noalias() += (rule.boundary_weights[q] * j.d_u) * row.transpose();
  }
  return J;
}

Matrix fd_hessian(const Model& model, const ParamVector& theta, const Problem& problem, const QuadratureRule& rule,
                  double h) {
  if (!(h > 0.0)) throw ConfigError("finite-difference step must be positive");
  const Index m = theta.size();
  Matrix H(m, m);
  ParamVector probe = theta;
  for (Index k = 0; k < m; ++k) {
    probe[k] = theta[k] + h;
    const Vector gp = energy_gradient(model, probe, problem, rule);
    probe[k] = theta[k] - h;
    const Vector gm = energy_gradient(model, probe, problem, rule);
    probe[k] = theta[k];
    H.col(k) = (gp - gm) / (2.0 * h);
  }
  return 0.5 * (H + H.transpose());
}

QEstimate q_matrix_estimate(const Model& model, const ParamVector& theta, const Problem& problem,
                            const QuadratureRule& rule, double h) {
  QEstimate out;
  const Matrix J = gauss_newton_matrix(model, theta, problem, rule);
  out.q = fd_hessian(model, theta, problem, rule, h) - J;
  out.q_norm = spectral_norm(out.q, 1e-8);
  out.j_norm = spectral_norm(J, 1e-8);
  return out;
}

}  // namespace ritzgn
