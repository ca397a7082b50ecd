#pragma once

#include "ritzgn/model.hpp"
#include "ritzgn/problem.hpp"
#include "ritzgn/quadrature.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ritzgn {

enum class ScheduleKind { fixed, geometric_up, geometric_down };

/// η_k = initial·factor^⌊k/period⌋, clipped at `cap` for geometric_up.
struct StepSchedule {
  ScheduleKind kind = ScheduleKind::fixed;
  double initial = 1.0;
  double factor = 1.0;
  int period = 1;
  std::optional<double> cap;

  static StepSchedule fixed(double eta) { return {ScheduleKind::fixed, eta, 1.0, 1, std::nullopt}; }
  static StepSchedule up(double eta, double factor, int period, double cap) {
    return {ScheduleKind::geometric_up, eta, factor, period, cap};
  }
  static StepSchedule down(double eta, double factor, int period) {
    return {ScheduleKind::geometric_down, eta, factor, period, std::nullopt};
  }

  void validate() const;
  /// Step size at 0-based iteration k.
  [[nodiscard]] double at(int k) const;
};

enum class Method { gn_variational, gn_collocation, gn_random, gd, sgd, adam };

[[nodiscard]] std::string to_string(Method m);
[[nodiscard]] Method parse_method(const std::string& name);
[[nodiscard]] bool is_randomized(Method m);

struct BatchSpec {
  std::size_t interior = 200;
  std::size_t boundary = 0;
  std::uint64_t seed = 0;
  SamplingKind sampling = SamplingKind::uniform;
};

struct WarmStart {
  int iters = 1000;
  double lr = 1e-3;
};

struct OptimizerConfig {
  Method method = Method::gn_variational;
  StepSchedule schedule;
  int max_iters = 100;
  double grad_tol = 0.0;  // stop when ‖∇L(θ_k)‖ ≤ grad_tol
  double step_tol = 0.0;  // stop when ‖θ_k − θ_{k−1}‖ ≤ step_tol
  double pinv_tau = 1e-10;
  std::optional<BatchSpec> batch;  // required iff the method is randomized
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::optional<WarmStart> warm_start;  // Adam on the full rule before the main loop

  void validate() const;
};

/// One iteration: values at θ_k after the k-th update. Randomized methods
/// still report loss and gradient on the full rule.
struct IterRecord {
  int iter = 0;
  double loss = 0.0;
  double grad_norm = 0.0;
  double step_norm = 0.0;
  int rank = 0;  // rank of the pseudo-inverse used; 0 for first-order methods
  double l2_err = 0.0;
  double h1_err = 0.0;
  double ms = 0.0;
  std::uint64_t batch_seed = 0;
};

struct IterTrace {
  std::vector<IterRecord> records;
  [[nodiscard]] bool empty() const { return records.empty(); }
  [[nodiscard]] std::size_t size() const { return records.size(); }
  [[nodiscard]] const IterRecord& back() const { return records.back(); }
  [[nodiscard]] std::vector<double> step_norms() const;
};

struct StepResult {
  ParamVector theta;
  Vector increment;  // θ_{k+1} − θ_k
  int rank = 0;
  double sigma_min = 0.0;  // smallest retained singular value of J (or JF)
};

/// θ − η·J†∇L with J = BᵀB from gauss_newton_factor. Throws DivergenceError
/// on a non-finite step.
[[nodiscard]] StepResult gn_variational_step(const Model& model, const ParamVector& theta, const Problem& problem,
                                             const QuadratureRule& rule, double eta, double tau_rel);

/// θ − η·JF†·F.
[[nodiscard]] StepResult gn_collocation_step(const Model& model, const ParamVector& theta, const Problem& problem,
                                             const QuadratureRule& rule, double eta, double tau_rel);

/// The variational step on the subsampled, rescaled rule.
[[nodiscard]] StepResult gn_random_step(const Model& model, const ParamVector& theta, const Problem& problem,
                                        const QuadratureRule& rule, const SampleBatch& batch, double eta,
                                        double tau_rel);

[[nodiscard]] ParamVector gd_step(const Model& model, const ParamVector& theta, const Problem& problem,
                                  const QuadratureRule& rule, double eta);

[[nodiscard]] ParamVector sgd_step(const Model& model, const ParamVector& theta, const Problem& problem,
                                   const QuadratureRule& rule, const SampleBatch& batch, double eta);

struct AdamState {
  Vector m;
  Vector v;
  int t = 0;
  void reset(Index size);
};

/// Bias-corrected Adam update from the gradient g.
[[nodiscard]] ParamVector adam_update(const ParamVector& theta, const Vector& g, double eta, AdamState& state,
                                      double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

[[nodiscard]] ParamVector adam_step(const Model& model, const ParamVector& theta, const Problem& problem,
                                    const QuadratureRule& rule, double eta, AdamState& state, double beta1 = 0.9,
                                    double beta2 = 0.999, double eps = 1e-8);

/// Adam for `warm.iters` iterations at fixed rate `warm.lr` on the full rule.
[[nodiscard]] ParamVector warm_start_adam(const Model& model, const ParamVector& theta, const Problem& problem,
                                          const QuadratureRule& rule, const WarmStart& warm);

enum class StopReason { max_iters, grad_tol, step_tol, diverged };

[[nodiscard]] std::string to_string(StopReason r);

struct RunOptions {
  const QuadratureRule* error_rule = nullptr;  // per-iteration L2/H1 errors when set
  bool record_time = false;                    // wall-clock ms; off keeps traces byte-stable
};

struct RunResult {
  ParamVector theta;
  ParamVector start;  // after the warm start
  IterTrace trace;
  StopReason stop = StopReason::max_iters;
  std::string message;
  [[nodiscard]] bool diverged() const { return stop == StopReason::diverged; }
  [[nodiscard]] bool converged() const { return stop == StopReason::grad_tol || stop == StopReason::step_tol; }
};

/// Warm start, then the main loop. Divergence stops the run with the trace kept.
[[nodiscard]] RunResult run(const Model& model, const ParamVector& theta0, const Problem& problem,
                            const QuadratureRule& rule, const OptimizerConfig& config, const RunOptions& options = {});

}  // namespace ritzgn
