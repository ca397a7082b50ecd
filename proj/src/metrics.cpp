#include "ritzgn/metrics.hpp"

#include "ritzgn/variational.hpp"

#include <algorithm>
#include <cmath>

namespace ritzgn {
namespace {

struct Sums {
  double l2 = 0, semi = 0, energy = 0, lu = 0, lv = 0;
};

template <class Ref>
ErrorReport finish(const Model& model, const ParamVector& theta, const Problem& problem, const QuadratureRule& rule,
                   Ref&& reference) {
  check_assembly_inputs(model, theta, problem, rule);
  Sums s;
  for (std::size_t p = 0; p < rule.interior_size(); ++p) {
    const double x = rule.interior_nodes[p];
    const double w = rule.interior_weights[p];
    const auto [u, gu] = eval_with_grad(model, theta, std::span<const double>(&x, 1));
    const double du = gu[0];
    const auto [v, dv] = reference(x);
    const double e = u - v;
    const double de = du - dv;
    const double fx = problem.f(x);
    s.l2 += w * e * e;
    s.semi += w * de * de;
    s.energy += w * (0.5 * problem.a * de * de + 0.5 * problem.c * e * e);
    s.lu += w * (0.5 * problem.a * du * du + 0.5 * problem.c * u * u - fx * u);
    s.lv += w * (0.5 * problem.a * dv * dv + 0.5 * problem.c * v * v - fx * v);
  }
  ErrorReport r;
  r.l2 = std::sqrt(s.l2);
  r.h1_semi = std::sqrt(s.semi);
  r.h1 = std::sqrt(s.l2 + s.semi);
  r.energy_norm = std::sqrt(s.energy);
  r.energy_gap = s.lu - s.lv;
  return r;
}

}  // namespace

ErrorReport error_norms(const Model& model, const ParamVector& theta, const Problem& problem,
                        const QuadratureRule& fine_rule) {
  if (!problem.has_exact()) throw ConfigError("error norms need an exact solution");
  return finish(model, theta, problem, fine_rule,
                [&](double x) { return std::pair{(*problem.exact)(x), (*problem.exact_grad)(x)}; });
}

ErrorReport error_norms_against(const Model& model, const ParamVector& theta, const Model& reference,
                                const ParamVector& reference_theta, const Problem& problem,
                                const QuadratureRule& fine_rule) {
  if (reference_theta.size() != num_params(reference)) throw DimensionError("reference θ has the wrong length");
  return finish(model, theta, problem, fine_rule, [&](double x) {
    const auto [v, dv] = eval_with_grad(reference, reference_theta, std::span<const double>(&x, 1));
    return std::pair{v, dv[0]};
  });
}

QuadratureRule default_error_rule(Interval domain, int order) { return gauss_legendre(order, domain); }

std::string to_string(Phase p) {
  switch (p) {
    case Phase::quadratic: return "quadratic";
    case Phase::linear: return "linear";
    case Phase::stalled: return "stalled";
  }
  return "?";
}

ConvergenceReport convergence_phases(const std::vector<double>& s, double tolerance, int window,
                                     double stall_ratio) {
  if (s.size() < 4) throw ConfigError("convergence analysis needs at least 4 steps");
  if (window < 1) throw ConfigError("window must be >= 1");
  for (double v : s) {
    if (!std::isfinite(v) || v < 0.0) throw ConfigError("step norms must be finite and >= 0");
  }
  ConvergenceReport rep;
  const std::size_t n = s.size();
  rep.ratios.resize(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    rep.ratios[k] = s[k] > 0.0 ? s[k + 1] / s[k] : (s[k + 1] > 0.0 ? HUGE_VAL : 0.0);
  }
  rep.orders.assign(n - 1, 0.0);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double num = std::log(rep.ratios[k]);
    const double den = std::log(rep.ratios[k - 1]);
    rep.orders[k] = (std::isfinite(num) && std::isfinite(den) && den != 0.0) ? num / den : 0.0;
  }

  // Step k is labelled by the ratio that produced it (k ≥ 1); step 0 copies step 1.
  rep.step_phase.resize(n);
  for (std::size_t k = 1; k < n; ++k) {
    const double r = rep.ratios[k - 1];
    const double q = rep.orders[k - 1];
    if (r < 1.0 && k >= 2 && rep.ratios[k - 2] < 1.0 && q >= 1.5) {
      rep.step_phase[k] = Phase::quadratic;
    } else if (r < stall_ratio) {
      rep.step_phase[k] = Phase::linear;
    } else {
      rep.step_phase[k] = Phase::stalled;
    }
  }
  // A quadratic run starts one step before the first doubled order.
  for (std::size_t k = 2; k < n; ++k) {
    if (rep.step_phase[k] == Phase::quadratic && rep.step_phase[k - 1] == Phase::linear) {
      rep.step_phase[k - 1] = Phase::quadratic;
    }
  }
  rep.step_phase[0] = rep.step_phase[1];
  for (std::size_t k = 0; k < n; ++k) {
    if (rep.segments.empty() || rep.segments.back().phase != rep.step_phase[k]) {
      rep.segments.push_back({rep.step_phase[k], static_cast<int>(k), static_cast<int>(k) + 1});
    } else {
      rep.segments.back().end = static_cast<int>(k) + 1;
    }
  }

  const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(window), rep.ratios.size());
  double log_sum = 0.0;
  std::size_t used = 0;
  for (std::size_t k = rep.ratios.size() - w; k < rep.ratios.size(); ++k) {
    if (rep.ratios[k] > 0.0 && std::isfinite(rep.ratios[k])) {
      log_sum += std::log(rep.ratios[k]);
      ++used;
    }
  }
  rep.terminal_coefficient = used > 0 ? std::exp(log_sum / static_cast<double>(used)) : 0.0;

  for (std::size_t k = 0; k < n; ++k) {
    if (s[k] <= tolerance) {
      rep.iterations_to_tolerance = static_cast<int>(k) + 1;
      break;
    }
  }
  const std::size_t last = std::min<std::size_t>(20, rep.ratios.size());
  for (std::size_t k = rep.ratios.size() - last; k < rep.ratios.size(); ++k) {
    if (rep.ratios[k] <= 1.0) ++rep.contracting_in_last_20;
  }
  return rep;
}

}  // namespace ritzgn
