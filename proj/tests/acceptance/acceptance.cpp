// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "ritzgn/collocation.hpp"
#include "ritzgn/config.hpp"
#include "ritzgn/diagnostics.hpp"
#include "ritzgn/experiments.hpp"
#include "ritzgn/linalg.hpp"
#include "ritzgn/report.hpp"
#include "ritzgn/variational.hpp"

#include "../unit/support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace ritzgn;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
  std::string csv;  // artifacts compared by the determinism check
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

RunConfig config_file(const std::string& name) { return load_config(std::string(RITZGN_CONFIG_DIR) + "/" + name); }

Outcome derivatives() {
  const auto t0 = Clock::now();
  Rng rng(2024);
  const auto rule = with_boundary(gauss_legendre(40, {-1.0, 1.0}));
  double worst_g = 0.0, worst_j = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto d = testing::random_tanh_net(rng, 16);
    const auto p = builtin_problem("cos-neumann-1d", rng.uniform(0.1, 2.0), rng.uniform(0.1, 2.0));
    const Vector g = energy_gradient(d.model, d.theta, p, rule);
    const Vector fd_g =
        testing::fd_gradient([&](const ParamVector& t) { return energy(d.model, t, p, rule); }, d.theta, 1e-6);
    const Matrix J = residual_jacobian(d.model, d.theta, p, rule);
    const Matrix fd_j = testing::fd_jacobian(
        [&](const ParamVector& t) { return residual_vector(d.model, t, p, rule); }, d.theta, 1e-6);
    worst_g = std::max(worst_g, testing::rel_err(g, fd_g));
    worst_j = std::max(worst_j, testing::rel_err(J, fd_j));
  }
  const double secs = seconds_since(t0);
  return {worst_g <= 1e-6 && worst_j <= 1e-5 && secs < 10.0,
          "max rel err grad " + fmt("%.2e", worst_g) + " (tol 1e-6), JF " + fmt("%.2e", worst_j) +
              " (tol 1e-5), " + fmt("%.2f", secs) + " s (limit 10)",
          {}};
}

Outcome quadrature() {
  double worst = 0.0;
  for (int q = 1; q <= 20; ++q) {
    const auto r = gauss_legendre(q, {-1.0, 1.0});
    for (int p = 0; p <= 2 * q - 1; ++p) {
      double s = 0.0;
      for (std::size_t i = 0; i < r.interior_size(); ++i) s += r.interior_weights[i] * std::pow(r.interior_nodes[i], p);
      worst = std::max(worst, std::abs(s - (p % 2 ? 0.0 : 2.0 / (p + 1))));
    }
  }
  return {worst <= 1e-12, "max monomial error " + fmt("%.2e", worst) + " over q = 1..20 (tol 1e-12)", {}};
}

Outcome penrose() {
  Rng rng(7);
  double worst = 0.0;
  int deficient = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index r = 1 + static_cast<Index>(rng.below(50)), c = 1 + static_cast<Index>(rng.below(30));
    const Index full = std::min(r, c);
    const Index k = trial % 2 ? full : 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(full)));
    if (k < full) ++deficient;
    Matrix L(r, k), R(k, c);
    for (Index i = 0; i < L.size(); ++i) L.data()[i] = rng.normal();
    for (Index i = 0; i < R.size(); ++i) R.data()[i] = rng.normal();
    const Matrix A = L * R;
    worst = std::max(worst, penrose_residuals(A, pinv_rank_r(A, 1e-10)).max());
  }
  return {worst <= 1e-10,
          "max Penrose residual " + fmt("%.2e", worst) + " on 100 matrices, " + std::to_string(deficient) +
              " rank-deficient (tol 1e-10)",
          {}};
}

Outcome fem_one_step() {
  const Model fem = FemModel::uniform({-1.0, 1.0}, 101);
  const auto p = builtin_problem("cos-neumann-1d");
  const auto rule = composite_gauss_legendre(3, std::get<FemModel>(fem).nodes());
  OptimizerConfig cfg;
  cfg.method = Method::gn_variational;
  cfg.schedule = StepSchedule::fixed(1.0);
  cfg.max_iters = 5;
  cfg.grad_tol = 1e-8;
  Rng rng(11);
  int exact_one = 0;
  double worst = 0.0;
  std::ostringstream csv;
  for (int start = 0; start < 20; ++start) {
    const RunResult r = run(fem, testing::random_theta(rng, 101, 5.0), p, rule, cfg);
    if (r.trace.size() == 1 && r.trace.back().grad_norm <= 1e-8) ++exact_one;
    if (!r.trace.empty()) worst = std::max(worst, r.trace.records.front().grad_norm);
    write_trace_csv(csv, r.trace);
  }
  return {exact_one == 20,
          std::to_string(exact_one) + "/20 starts stop after exactly 1 iteration, max ||grad|| after it " +
              fmt("%.2e", worst) + " (tol 1e-8)",
          csv.str()};
}

Outcome consistency() {
  Rng rng(5);
  double identity = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto d = testing::random_tanh_net(rng, 20);
    const auto p = builtin_problem("cos-neumann-1d", rng.uniform(0.1, 2.0), rng.uniform(0.1, 2.0));
    const auto rule = with_boundary(gauss_legendre(10 + static_cast<int>(rng.below(60)), {-1.0, 1.0}));
    identity = std::max(identity, consistency_report(d.model, d.theta, p, rule).identity_error);
  }
  const RunConfig c = config_file("consistency.ini");
  const auto runs = run_consistency(c);
  std::map<int, double> max_rel;
  std::map<int, std::size_t> steps;
  for (const auto& r : runs) {
    identity = std::max(identity, r.identity_error);
    double m = 0.0;
    for (const auto& s : r.steps) m = std::max(m, s.relative_difference);
    max_rel[r.n] = m;
    steps[r.n] = r.steps.size();
  }
  std::ostringstream csv;
  write_consistency_csv(csv, runs);
  write_table2_csv(csv, runs);
  const bool ok = identity <= 1e-10 && steps[100] == 10 && max_rel[100] <= 1e-8 && steps[500] >= 1 &&
                  max_rel[500] > 1e-3;
  return {ok,
          "identity " + fmt("%.2e", identity) + " (tol 1e-10); N=100 max rel step diff " + fmt("%.2e", max_rel[100]) +
              " over " + std::to_string(steps[100]) + " steps (tol 1e-8); N=500 " + fmt("%.2e", max_rel[500]) +
              " (need > 1e-3)",
          csv.str()};
}

Outcome table_widths() {
  const auto t0 = Clock::now();
  const auto rows = run_table_widths(config_file("table.ini"));
  const double secs = seconds_since(t0);
  const std::map<int, std::pair<double, double>> reference = {{32, {6.33e-3, 5.44e-2}},
                                                           {64, {5.82e-3, 5.17e-2}},
                                                           {128, {3.97e-3, 4.14e-2}},
                                                           {256, {2.50e-3, 3.55e-2}},
                                                           {512, {2.38e-3, 3.37e-2}}};
  bool ok = secs <= 600.0 && rows.size() == reference.size();
  std::string detail;
  for (const auto& r : rows) {
    const auto it = reference.find(r.width);
    const bool row_ok = it != reference.end() && !r.failed && r.l2 <= 3.0 * it->second.first &&
                        r.h1 <= 3.0 * it->second.second;
    ok = ok && row_ok;
    detail += std::to_string(r.width) + ": L2 " + fmt("%.2e", r.l2) + " H1 " + fmt("%.2e", r.h1) + "; ";
  }
  std::ostringstream csv;
  write_table_csv(csv, rows);
  return {ok, detail + fmt("%.1f", secs) + " s (limit 600), bound 3x the reference column", csv.str()};
}

Outcome gn_vs_adam() {
  RunConfig c = default_config();
  c.model.width = 100;
  const Setup s = build_setup(c);
  OptimizerConfig gn = c.optimizer;
  gn.max_iters = 50;
  gn.step_tol = 0.0;
  gn.grad_tol = 0.0;
  OptimizerConfig adam = gn;
  adam.method = Method::adam;
  adam.schedule = StepSchedule::fixed(1e-3);
  adam.max_iters = 1000;
  const RunResult g = run(s.model, s.theta0, s.problem, s.rule, gn);
  const RunResult a = run(s.model, s.theta0, s.problem, s.rule, adam);
  std::ostringstream csv;
  write_trace_csv(csv, g.trace);
  write_trace_csv(csv, a.trace);
  if (g.trace.empty() || a.trace.empty()) return {false, "empty trace", csv.str()};
  const double lg = g.trace.back().loss, la = a.trace.back().loss;
  return {lg <= la && !g.diverged(),
          "GN loss after " + std::to_string(g.trace.size()) + " iters " + fmt("%.10f", lg) + " vs Adam after " +
              std::to_string(a.trace.size()) + " more " + fmt("%.10f", la),
          csv.str()};
}

Outcome race() {
  const RaceOutcome r = run_race(config_file("race.ini"));
  std::ostringstream csv;
  write_race_csv(csv, r);
  if (r.gn.trace.empty() || r.adam.trace.empty() || r.sgd.trace.empty()) return {false, "empty trace", csv.str()};
  const double g = r.gn.trace.back().l2_err, a = r.adam.trace.back().l2_err, s = r.sgd.trace.back().l2_err;
  const bool grid = r.gn.trace.size() == r.adam.trace.size() && r.adam.trace.size() == r.sgd.trace.size();
  return {grid && g <= 0.1 && g < a && g < s,
          "final L2: random GN " + fmt("%.3e", g) + ", Adam " + fmt("%.3e", a) + ", SGD " + fmt("%.3e", s) +
              " after " + std::to_string(r.gn.trace.size()) + " iters",
          csv.str()};
}

Outcome energy_gap_identity() {
  const auto p = builtin_problem("cos-neumann-1d");
  const FemModel fem = FemModel::uniform({-1.0, 1.0}, 20001);
  const ParamVector v = fem.interpolate([](double x) { return std::cos(std::numbers::pi * x); });
  const auto rule = composite_gauss_legendre(3, fem.nodes());
  Rng rng(9);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto d = testing::random_tanh_net(rng, 32);
    const auto e = error_norms_against(d.model, d.theta, fem, v, p, rule);
    const double sq = e.energy_norm * e.energy_norm;
    worst = std::max(worst, std::abs(e.energy_gap - sq) / (1.0 + sq));
  }
  return {worst <= 1e-3, "max |gap - norm^2| / (1 + norm^2) = " + fmt("%.2e", worst) + " (tol 1e-3)", {}};
}

Outcome semiregularity() {
  const auto p = builtin_problem("cos-neumann-1d");
  const FemModel base = FemModel::uniform({-1.0, 1.0}, 101);
  const auto rule = composite_gauss_legendre(3, base.nodes());
  auto minimizer = [&](const Model& m) {
    return gn_variational_step(m, ParamVector::Zero(num_params(m)), p, rule, 1.0, 1e-12).theta;
  };
  const Model full = base;
  const auto r1 = semiregularity_report(full, minimizer(full), p, rule);
  std::vector<int> frame = base.frame();
  frame.push_back(50);
  const Model dup = FemModel(base.nodes(), frame);
  const auto r2 = semiregularity_report(dup, minimizer(dup), p, rule);
  const int rank_a = numerical_rank(gauss_newton_matrix(dup, ParamVector::Zero(102), p, rule), 1e-8);
  const auto c = relu_branch_case(2);
  SemiregularityOptions o;
  o.form = GradientForm::divergence;
  const auto r3 = semiregularity_report(c.model, c.theta_star, c.problem, c.rule, o);
  const bool ok = r1.regular() && r2.consistent() && r2.nullity == r2.m - rank_a && r2.branch_dim == 1 &&
                  r3.consistent() && r3.rank_h == 1 && r3.branch_dim == 1;
  return {ok,
          "FEM: " + r1.classification() + "; duplicated hat: " + r2.classification() + " (nullity " +
              std::to_string(r2.nullity) + ", m - r = " + std::to_string(r2.m - rank_a) + "); inactive ReLU^2: " +
              r3.classification() + " (rank_H " + std::to_string(r3.rank_h) + ")",
          {}};
}

Outcome q_ratio() {
  const SolveOutcome s = run_solve(config_file("solve.ini"));
  const auto q = q_matrix_estimate(s.setup.model, s.run.theta, s.setup.problem, s.setup.rule);
  return {q.ratio() < 1.0 && s.run.converged(),
          "||Q|| / ||J|| = " + fmt("%.3e", q.ratio()) + " at the width-128 minimizer (||Q|| " + fmt("%.3e", q.q_norm) +
              ", ||J|| " + fmt("%.3e", q.j_norm) + ", stop " + to_string(s.run.stop) + ")",
          {}};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria = {
      {1, "derivative correctness", derivatives},
      {2, "Gauss-Legendre exactness", quadrature},
      {3, "pseudo-inverse Penrose conditions", penrose},
      {4, "FEM one-step convergence", fem_one_step},
      {5, "variational/collocation consistency", consistency},
      {6, "width table", table_widths},
      {7, "GN vs Adam from a shared warm start", gn_vs_adam},
      {8, "random GN race", race},
      {9, "energy gap identity", energy_gap_identity},
      {10, "semiregularity cases", semiregularity},
      {11, "Q/J ratio", q_ratio},
  };

  auto evaluate = [](const Criterion& c) {
    try {
      return c.check();
    } catch (const std::exception& e) {
      return Outcome{false, std::string("exception: ") + e.what(), {}};
    }
  };

  int failures = 0;
  std::map<int, std::string> first_csv;
  for (const auto& c : criteria) {
    const auto t0 = Clock::now();
    const Outcome o = evaluate(c);
    if (!o.pass) ++failures;
    if (c.id >= 4 && c.id <= 8) first_csv[c.id] = o.csv;
    std::printf("criterion %2d %s  %s: %s [%.1f s]\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }

  const auto t0 = Clock::now();
  std::string mismatched;
  for (const auto& c : criteria) {
    if (c.id < 4 || c.id > 8) continue;
    const Outcome o = evaluate(c);
    if (o.csv.empty() || o.csv != first_csv[c.id]) mismatched += " " + std::to_string(c.id);
  }
  const bool same = mismatched.empty();
  if (!same) ++failures;
  std::printf("criterion 12 %s  determinism: %s [%.1f s]\n", same ? "PASS" : "FAIL",
              same ? "criteria 4-8 CSVs byte-identical on rerun" : ("differing CSVs for" + mismatched).c_str(),
              seconds_since(t0));

  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
