#include "ritzgn/optimize.hpp"

#include "ritzgn/collocation.hpp"
#include "ritzgn/linalg.hpp"
#include "ritzgn/metrics.hpp"
#include "ritzgn/random.hpp"
#include "ritzgn/variational.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace ritzgn {

void StepSchedule::validate() const {
  if (!(initial > 0.0) || !std::isfinite(initial)) throw ConfigError("schedule initial step must be > 0");
  if (period < 1) throw ConfigError("schedule period must be >= 1");
  if (!(factor > 0.0)) throw ConfigError("schedule factor must be > 0");
  if (kind == ScheduleKind::geometric_up && !cap) throw ConfigError("geometric_up schedule needs a cap");
  if (kind == ScheduleKind::geometric_down && !(factor < 1.0)) {
    throw ConfigError("geometric_down schedule needs factor < 1");
  }
}

double StepSchedule::at(int k) const {
  if (kind == ScheduleKind::fixed) return initial;
  const double eta = initial * std::pow(factor, static_cast<double>(k / period));
  if (kind == ScheduleKind::geometric_up) return std::min(eta, *cap);
  return eta;
}

std::string to_string(Method m) {
  switch (m) {
    case Method::gn_variational: return "gn_variational";
    case Method::gn_collocation: return "gn_collocation";
    case Method::gn_random: return "gn_random";
    case Method::gd: return "gd";
    case Method::sgd: return "sgd";
    case Method::adam: return "adam";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  for (Method m : {Method::gn_variational, Method::gn_collocation, Method::gn_random, Method::gd, Method::sgd,
                   Method::adam}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown optimizer method '" + name + "'");
}

bool is_randomized(Method m) { return m == Method::gn_random || m == Method::sgd; }

void OptimizerConfig::validate() const {
  schedule.validate();
  if (max_iters < 0) throw ConfigError("max_iters must be >= 0");
  if (grad_tol < 0.0 || step_tol < 0.0) throw ConfigError("tolerances must be >= 0");
  if (!(pinv_tau > 0.0 && pinv_tau < 1.0)) throw ConfigError("pinv_tau must lie in (0, 1)");
  if (is_randomized(method) != batch.has_value()) {
    throw ConfigError("a batch is required for gn_random and sgd and not allowed otherwise");
  }
  if (batch && batch->interior == 0 && batch->boundary == 0) throw ConfigError("batch is empty");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("Adam betas must lie in [0, 1)");
  if (!(adam_eps > 0.0)) throw ConfigError("Adam epsilon must be > 0");
  if (warm_start) {
    if (warm_start->iters < 0) throw ConfigError("warm start iterations must be >= 0");
    if (!(warm_start->lr > 0.0)) throw ConfigError("warm start rate must be > 0");
  }
}

std::vector<double> IterTrace::step_norms() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.step_norm);
  return out;
}

namespace {

StepResult finish_step(const ParamVector& theta, const Vector& direction, double eta, int rank, double sigma_min) {
  StepResult out;
  out.increment = -eta * direction;
  if (!out.increment.allFinite()) {
    std::ostringstream msg;
    msg << "non-finite Gauss-Newton step (rank " << rank << ", sigma_min " << sigma_min << ")";
    throw DivergenceError(msg.str());
  }
  out.theta = theta + out.increment;
  out.rank = rank;
  out.sigma_min = sigma_min;
  return out;
}

}  // namespace

StepResult gn_variational_step(const Model& model, const ParamVector& theta, const Problem& problem,
                               const QuadratureRule& rule, double eta, double tau_rel) {
  const Vector g = assemble_energy(model, theta, problem, rule, false).gradient;
  const SvdResult f = svd(gauss_newton_factor(model, theta, problem, rule));
  int rank = 0;
  const Vector d = gram_pinv_apply(f, g, tau_rel, &rank);
  const double smin = rank > 0 ? f.sigma[rank - 1] * f.sigma[rank - 1] : 0.0;
  return finish_step(theta, d, eta, rank, smin);
}

StepResult gn_collocation_step(const Model& model, const ParamVector& theta, const Problem& problem,
                               const QuadratureRule& rule, double eta, double tau_rel) {
  const ResidualSystem s = residual_system(model, theta, problem, rule);
  const SvdResult f = svd(s.jacobian);
  int rank = 0;
  const Vector d = pinv_apply(f, s.residual, tau_rel, &rank);
  const double smin = rank > 0 ? f.sigma[rank - 1] : 0.0;
  return finish_step(theta, d, eta, rank, smin);
}

StepResult gn_random_step(const Model& model, const ParamVector& theta, const Problem& problem,
                          const QuadratureRule& rule, const SampleBatch& batch, double eta, double tau_rel) {
  return gn_variational_step(model, theta, problem, restrict_rule(rule, batch), eta, tau_rel);
}

ParamVector gd_step(const Model& model, const ParamVector& theta, const Problem& problem, const QuadratureRule& rule,
                    double eta) {
  return theta - eta * energy_gradient(model, theta, problem, rule);
}

ParamVector sgd_step(const Model& model, const ParamVector& theta, const Problem& problem,
                     const QuadratureRule& rule, const SampleBatch& batch, double eta) {
  return gd_step(model, theta, problem, restrict_rule(rule, batch), eta);
}

void AdamState::reset(Index size) {
  m = Vector::Zero(size);
  v = Vector::Zero(size);
  t = 0;
}

ParamVector adam_update(const ParamVector& theta, const Vector& g, double eta, AdamState& s, double beta1,
                        double beta2, double eps) {
  if (s.m.size() != theta.size()) s.reset(theta.size());
  ++s.t;
  s.m = beta1 * s.m + (1.0 - beta1) * g;
  s.v = beta2 * s.v + (1.0 - beta2) * g.cwiseAbs2();
  const double c1 = 1.0 - std::pow(beta1, s.t);
  const double c2 = 1.0 - std::pow(beta2, s.t);
  const Vector mhat = s.m / c1;
  const Vector vhat = s.v / c2;
  return theta - eta * mhat.cwiseQuotient((vhat.cwiseSqrt().array() + eps).matrix());
}

ParamVector adam_step(const Model& model, const ParamVector& theta, const Problem& problem,
                      const QuadratureRule& rule, double eta, AdamState& state, double beta1, double beta2,
                      double eps) {
  return adam_update(theta, energy_gradient(model, theta, problem, rule), eta, state, beta1, beta2, eps);
}

ParamVector warm_start_adam(const Model& model, const ParamVector& theta, const Problem& problem,
                            const QuadratureRule& rule, const WarmStart& warm) {
  AdamState state;
  state.reset(theta.size());
  ParamVector th = theta;
  for (int k = 0; k < warm.iters; ++k) th = adam_step(model, th, problem, rule, warm.lr, state);
  if (!th.allFinite()) throw DivergenceError("warm start produced non-finite parameters");
  return th;
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::max_iters: return "max_iters";
    case StopReason::grad_tol: return "grad_tol";
    case StopReason::step_tol: return "step_tol";
    case StopReason::diverged: return "diverged";
  }
  return "?";
}

RunResult run(const Model& model, const ParamVector& theta0, const Problem& problem, const QuadratureRule& rule,
              const OptimizerConfig& config, const RunOptions& options) {
  config.validate();
  check_assembly_inputs(model, theta0, problem, rule);
  const bool with_errors = options.error_rule != nullptr && problem.has_exact();

  RunResult res;
  res.theta = theta0;
  try {
    if (config.warm_start && config.warm_start->iters > 0) {
      res.theta = warm_start_adam(model, theta0, problem, rule, *config.warm_start);
    }
  } catch (const DivergenceError& e) {
    res.stop = StopReason::diverged;
    res.message = e.what();
    res.start = res.theta;
    return res;
  }
  res.start = res.theta;
  if (config.max_iters == 0) return res;

  Rng seeds(config.batch ? config.batch->seed : 0);
  AdamState adam;
  adam.reset(res.theta.size());
  const auto t_start = std::chrono::steady_clock::now();

  if (config.grad_tol > 0.0 && energy_gradient(model, res.theta, problem, rule).norm() <= config.grad_tol) {
    res.stop = StopReason::grad_tol;
    return res;
  }

  for (int k = 0; k < config.max_iters; ++k) {
    const double eta = config.schedule.at(k);
    IterRecord rec;
    rec.iter = k + 1;
    ParamVector next;
    try {
      switch (config.method) {
        case Method::gn_variational: {
          const StepResult s = gn_variational_step(model, res.theta, problem, rule, eta, config.pinv_tau);
          next = s.theta;
          rec.rank = s.rank;
          break;
        }
        case Method::gn_collocation: {
          const StepResult s = gn_collocation_step(model, res.theta, problem, rule, eta, config.pinv_tau);
          next = s.theta;
          rec.rank = s.rank;
          break;
        }
        case Method::gn_random: {
          rec.batch_seed = seeds.next_u64();
          const SampleBatch b = subsample(rule, config.batch->interior, config.batch->boundary, rec.batch_seed,
                                          config.batch->sampling);
          const StepResult s = gn_random_step(model, res.theta, problem, rule, b, eta, config.pinv_tau);
          next = s.theta;
          rec.rank = s.rank;
          break;
        }
        case Method::gd:
          next = gd_step(model, res.theta, problem, rule, eta);
          break;
        case Method::sgd: {
          rec.batch_seed = seeds.next_u64();
          const SampleBatch b = subsample(rule, config.batch->interior, config.batch->boundary, rec.batch_seed,
                                          config.batch->sampling);
          next = sgd_step(model, res.theta, problem, rule, b, eta);
          break;
        }
        case Method::adam:
          next = adam_step(model, res.theta, problem, rule, eta, adam, config.beta1, config.beta2, config.adam_eps);
          break;
      }
    } catch (const DivergenceError& e) {
      res.stop = StopReason::diverged;
      res.message = e.what();
      return res;
    }

    rec.step_norm = (next - res.theta).norm();
    res.theta = next;
    const EnergyAssembly a = assemble_energy(model, res.theta, problem, rule, false);
    rec.loss = a.loss;
    rec.grad_norm = a.gradient.norm();
    if (with_errors) {
      const ErrorReport e = error_norms(model, res.theta, problem, *options.error_rule);
      rec.l2_err = e.l2;
      rec.h1_err = e.h1;
    } else {
      rec.l2_err = std::numeric_limits<double>::quiet_NaN();
      rec.h1_err = std::numeric_limits<double>::quiet_NaN();
    }
    if (options.record_time) {
      rec.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start).count();
    }
    res.trace.records.push_back(rec);

    if (!std::isfinite(rec.loss) || !res.theta.allFinite()) {
      res.stop = StopReason::diverged;
      res.message = "loss became non-finite at iteration " + std::to_string(rec.iter);
      return res;
    }
    if (config.grad_tol > 0.0 && rec.grad_norm <= config.grad_tol) {
      res.stop = StopReason::grad_tol;
      return res;
    }
    if (config.step_tol > 0.0 && rec.step_norm <= config.step_tol) {
      res.stop = StopReason::step_tol;
      return res;
    }
  }
  res.stop = StopReason::max_iters;
  return res;
}

}  // namespace ritzgn
