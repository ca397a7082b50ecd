#include "ritzgn/experiments.hpp"

#include "ritzgn/random.hpp"
#include "ritzgn/report.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace ritzgn {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ErrorReport nan_errors() { return {kNaN, kNaN, kNaN, kNaN, kNaN}; }

std::vector<double> uniform_breakpoints(Interval d, int cells) {
  std::vector<double> bp(static_cast<std::size_t>(cells) + 1);
  for (int i = 0; i <= cells; ++i) bp[static_cast<std::size_t>(i)] = d.lo + d.length() * i / cells;
  bp.back() = d.hi;
  return bp;
}

}  // namespace

QuadratureRule build_rule(const QuadratureConfig& q, Interval domain) {
  QuadratureRule rule;
  switch (q.kind) {
    case QuadratureKind::gauss: rule = gauss_legendre(q.order, domain); break;
    case QuadratureKind::composite_gauss:
      rule = composite_gauss_legendre(q.order, uniform_breakpoints(domain, q.cells));
      break;
    case QuadratureKind::monte_carlo: rule = monte_carlo_rule(q.order, domain, q.seed); break;
  }
  return q.boundary ? with_boundary(std::move(rule)) : rule;
}

Model build_model(const ModelConfig& m, Interval domain) {
  if (m.kind == ModelKind::fem) {
    FemModel base = FemModel::uniform(domain, m.fem_nodes);
    std::vector<int> frame = base.frame();
    frame.insert(frame.end(), m.fem_duplicate.begin(), m.fem_duplicate.end());
    return FemModel(base.nodes(), frame);
  }
  return NetworkModel(m.width, 1, m.activation, m.mask);
}

ParamVector build_init(const ModelConfig& m, const Model& model, const QuadratureRule& rule) {
  InitOptions o;
  o.scheme = m.init;
  o.seed = m.seed;
  o.delta = m.delta;
  o.a_scale = m.a_scale;
  if (m.scale_a_by_width && m.kind == ModelKind::network) o.a_scale /= std::sqrt(static_cast<double>(m.width));
  o.w_scale = m.w_scale;
  o.sharpness = m.sharpness;
  o.nodes = rule.interior_nodes;
  o.nodes.insert(o.nodes.end(), rule.boundary_nodes.begin(), rule.boundary_nodes.end());
  if (o.scheme == InitScheme::node_adapted && !rule.has_boundary()) {
    o.nodes.push_back(rule.domain.lo);
    o.nodes.push_back(rule.domain.hi);
  }
  return init_params(model, o);
}

Setup build_setup(const RunConfig& config) {
  config.validate();
  Problem problem = builtin_problem(config.problem.name, config.problem.a, config.problem.c);
  Model model = build_model(config.model, problem.domain);
  QuadratureRule rule = build_rule(config.quadrature, problem.domain);
  QuadratureRule error_rule = default_error_rule(problem.domain, config.quadrature.error_order);
  ParamVector theta0 = build_init(config.model, model, rule);
  return Setup{std::move(problem), std::move(model), std::move(rule), std::move(error_rule), std::move(theta0)};
}

SolveOutcome run_solve(const RunConfig& config) {
  SolveOutcome out{build_setup(config), {}, {}, {}};
  const Setup& s = out.setup;
  RunOptions opts;
  opts.error_rule = &s.error_rule;
  opts.record_time = config.output.record_time;
  out.run = run(s.model, s.theta0, s.problem, s.rule, config.optimizer, opts);
  if (s.problem.has_exact()) {
    const bool finite_start = out.run.start.allFinite();
    const bool finite_end = out.run.theta.allFinite();
    out.start_errors = finite_start ? error_norms(s.model, out.run.start, s.problem, s.error_rule) : nan_errors();
    out.final_errors = finite_end ? error_norms(s.model, out.run.theta, s.problem, s.error_rule) : nan_errors();
  } else {
    out.start_errors = nan_errors();
    out.final_errors = nan_errors();
  }
  return out;
}

std::vector<WidthRow> run_table_widths(const RunConfig& config) {
  std::vector<WidthRow> rows;
  for (int width : config.table.widths) {
    RunConfig c = config;
    c.model.width = width;
    WidthRow row;
    row.width = width;
    try {
      const SolveOutcome o = run_solve(c);
      row.gn_iters = static_cast<int>(o.run.trace.size());
      if (o.run.diverged()) {
        row.failed = true;
        row.message = o.run.message;
        row.l2 = row.h1 = row.h1_semi = kNaN;
      } else {
        row.l2 = o.final_errors.l2;
        row.h1 = o.final_errors.h1;
        row.h1_semi = o.final_errors.h1_semi;
      }
    } catch (const Error& e) {
      row.failed = true;
      row.message = e.what();
      row.l2 = row.h1 = row.h1_semi = kNaN;
    }
    rows.push_back(row);
  }
  return rows;
}

void write_table_csv(std::ostream& out, const std::vector<WidthRow>& rows) {
  CsvWriter csv(out, {"width", "l2_error", "h1_error"});
  for (const auto& r : rows) csv.cell(r.width).cell(r.l2).cell(r.h1).end_row();
}

std::vector<ConsistencyOutcome> run_consistency(const RunConfig& config) {
  config.validate();
  const Problem problem = builtin_problem(config.problem.name, config.problem.a, config.problem.c);
  const Model model = build_model(config.model, problem.domain);
  const QuadratureRule error_rule = default_error_rule(problem.domain, config.quadrature.error_order);
  const double tau = config.optimizer.pinv_tau;
  const double eta = config.consistency.eta;

  ParamVector theta0;
  std::vector<ConsistencyOutcome> out;
  for (std::size_t idx = 0; idx < config.consistency.n_values.size(); ++idx) {
    QuadratureConfig qc = config.quadrature;
    qc.kind = QuadratureKind::gauss;
    qc.order = config.consistency.n_values[idx];
    qc.boundary = true;
    const QuadratureRule rule = build_rule(qc, problem.domain);
    if (idx == 0) {
      theta0 = build_init(config.model, model, rule);
      if (config.optimizer.warm_start) {
        theta0 = warm_start_adam(model, theta0, problem, rule, *config.optimizer.warm_start);
      }
    }

    ConsistencyOutcome o;
    o.n = qc.order;
    const ConsistencyReport r0 = consistency_report(model, theta0, problem, rule, 1e-10, tau);
    o.columns = r0.columns_g;
    o.rank_g = r0.rank_g;
    o.identity_error = r0.identity_error;
    o.volume_form_gap = r0.volume_form_gap;

    ParamVector tv = theta0;
    ParamVector tc = theta0;
    bool v_ok = true;
    bool c_ok = true;
    const int total = std::max(config.consistency.steps, config.consistency.table_iters);
    for (int k = 0; k < total; ++k) {
      if (k < config.consistency.steps && v_ok) {
        const ConsistencyReport r = consistency_report(model, tv, problem, rule, 1e-10, tau);
        ConsistencyStepRecord rec;
        rec.step = k + 1;
        rec.step_difference = r.step_difference;
        rec.relative_difference = r.step_difference / (1.0 + r.collocation_step.norm());
        rec.variational_step_norm = eta * r.variational_step.norm();
        rec.collocation_step_norm = eta * r.collocation_step.norm();
        rec.rank_g = r.rank_g;
        tv -= eta * r.variational_step;
        if (c_ok) {
          const StepResult sc = gn_collocation_step(model, tc, problem, rule, eta, tau);
          tc = sc.theta;
        }
        rec.trajectory_gap = (tv - tc).norm();
        o.steps.push_back(rec);
        v_ok = tv.allFinite();
        c_ok = tc.allFinite();
        continue;
      }
      try {
        if (v_ok) {
          const ResidualSystem s = residual_system(model, tv, problem, rule);
          const Matrix GJ = s.weighting * s.jacobian;
          tv -= eta * pinv_apply(svd(GJ, tau), s.weighting * s.residual, tau);
          v_ok = tv.allFinite();
        }
      } catch (const Error&) {
        v_ok = false;
      }
      try {
        if (c_ok) {
          tc = gn_collocation_step(model, tc, problem, rule, eta, tau).theta;
          c_ok = tc.allFinite();
        }
      } catch (const Error&) {
        c_ok = false;
      }
    }
    o.variational_diverged = !v_ok;
    o.collocation_diverged = !c_ok;
    o.variational_errors = v_ok ? error_norms(model, tv, problem, error_rule) : nan_errors();
    o.collocation_errors = c_ok ? error_norms(model, tc, problem, error_rule) : nan_errors();
    out.push_back(std::move(o));
  }
  return out;
}

void write_consistency_csv(std::ostream& out, const std::vector<ConsistencyOutcome>& runs) {
  CsvWriter csv(out, {"n", "step", "step_difference", "relative_difference", "trajectory_gap",
                      "variational_step_norm", "collocation_step_norm", "rank_g", "columns_g"});
  for (const auto& r : runs) {
    for (const auto& s : r.steps) {
      csv.cell(r.n).cell(s.step).cell(s.step_difference).cell(s.relative_difference).cell(s.trajectory_gap);
      csv.cell(s.variational_step_norm).cell(s.collocation_step_norm).cell(s.rank_g).cell(r.columns).end_row();
    }
  }
}

void write_table2_csv(std::ostream& out, const std::vector<ConsistencyOutcome>& runs) {
  CsvWriter csv(out, {"n", "form", "l2_error", "h1_error"});
  for (const auto& r : runs) {
    csv.cell(r.n).cell(std::string("l2")).cell(r.collocation_errors.l2).cell(r.collocation_errors.h1).end_row();
    csv.cell(r.n).cell(std::string("variational")).cell(r.variational_errors.l2).cell(r.variational_errors.h1).end_row();
  }
}

RaceOutcome run_race(const RunConfig& config) {
  const Setup s = build_setup(config);
  RunOptions opts;
  opts.error_rule = &s.error_rule;
  opts.record_time = config.output.record_time;
  const BatchSpec batch{config.race.batch, s.rule.boundary_nodes.size(), config.race.batch_seed, config.race.sampling};

  const auto make = [&](Method m, const StepSchedule& sched) {
    OptimizerConfig o = config.optimizer;
    o.method = m;
    o.schedule = sched;
    o.max_iters = config.race.iters;
    o.grad_tol = 0.0;
    o.step_tol = 0.0;
    o.batch = is_randomized(m) ? std::optional<BatchSpec>(batch) : std::nullopt;
    if (m == Method::gn_random) o.pinv_tau = config.race.gn_tau;
    return o;
  };
  // One shared warm start, so every method leaves from the same θ.
  ParamVector start = s.theta0;
  if (config.optimizer.warm_start) start = warm_start_adam(s.model, start, s.problem, s.rule, *config.optimizer.warm_start);
  auto cold = [](OptimizerConfig o) {
    o.warm_start.reset();
    return o;
  };
  RaceOutcome out;
  out.gn = run(s.model, start, s.problem, s.rule, cold(make(Method::gn_random, config.race.gn)), opts);
  out.adam = run(s.model, start, s.problem, s.rule, cold(make(Method::adam, config.race.adam)), opts);
  out.sgd = run(s.model, start, s.problem, s.rule, cold(make(Method::sgd, config.race.sgd)), opts);
  return out;
}

void write_race_csv(std::ostream& out, const RaceOutcome& race) {
  CsvWriter csv(out, {"iter", "gn_loss", "gn_l2_err", "adam_loss", "adam_l2_err", "sgd_loss", "sgd_l2_err"});
  const std::size_t n = std::max({race.gn.trace.size(), race.adam.trace.size(), race.sgd.trace.size()});
  const auto val = [](const RunResult& r, std::size_t i, bool loss) {
    if (i >= r.trace.size()) return kNaN;
    return loss ? r.trace.records[i].loss : r.trace.records[i].l2_err;
  };
  for (std::size_t i = 0; i < n; ++i) {
    csv.cell(static_cast<long long>(i + 1));
    csv.cell(val(race.gn, i, true)).cell(val(race.gn, i, false));
    csv.cell(val(race.adam, i, true)).cell(val(race.adam, i, false));
    csv.cell(val(race.sgd, i, true)).cell(val(race.sgd, i, false));
    csv.end_row();
  }
}

ReluBranchCase relu_branch_case(int k) {
  ReluBranchCase c{NetworkModel(1, 1, ActivationSpec::relu_pow(k), TrainableMask{true, false, true}),
                   builtin_problem("zero"), {}, ParamVector::Zero(2)};
  c.rule.domain = c.problem.domain;
  c.rule.interior_nodes = {-0.5};
  c.rule.interior_weights = {1.0};
  c.rule.boundary_nodes = {1.0};
  c.rule.boundary_normals = {1.0};
  c.rule.boundary_weights = {1.0};
  return c;
}

DiagnoseOutcome run_diagnose(const RunConfig& config) {
  const DiagnoseConfig& d = config.diagnose;
  SemiregularityOptions so;
  so.tau_rel = d.tau_rel;
  so.flat_tol = d.flat_tol;
  DiagnoseOutcome out;

  if (d.target == DiagnoseCase::relu_branch) {
    const int k = config.model.activation.kind == ActivationKind::relu_pow ? config.model.activation.power : 2;
    const ReluBranchCase c = relu_branch_case(k);
    so.form = GradientForm::divergence;
    out.label = "inactive ReLU^" + std::to_string(k) + " neuron";
    out.semi = semiregularity_report(c.model, c.theta_star, c.problem, c.rule, so);
    return out;
  }

  if (d.target == DiagnoseCase::fem || d.target == DiagnoseCase::fem_duplicate) {
    const Problem problem = builtin_problem(config.problem.name, config.problem.a, config.problem.c);
    ModelConfig mc = config.model;
    mc.kind = ModelKind::fem;
    if (d.target == DiagnoseCase::fem) mc.fem_duplicate.clear();
    if (d.target == DiagnoseCase::fem_duplicate && mc.fem_duplicate.empty()) mc.fem_duplicate = {mc.fem_nodes / 2};
    const Model model = build_model(mc, problem.domain);
    const auto& fem = std::get<FemModel>(model);
    const QuadratureRule rule = composite_gauss_legendre(3, fem.nodes());
    const ParamVector zero = ParamVector::Zero(num_params(model));
    const ParamVector theta_star = gn_variational_step(model, zero, problem, rule, 1.0, 1e-12).theta;
    out.label = d.target == DiagnoseCase::fem ? "finite elements" : "finite elements with a repeated hat";
    out.semi = semiregularity_report(model, theta_star, problem, rule, so);
    out.q = q_matrix_estimate(model, theta_star, problem, rule);
    return out;
  }

  // Network: converged solve (or a stored θ), then every diagnostic.
  Setup s = build_setup(config);
  ParamVector theta;
  if (!d.theta_file.empty()) {
    theta = read_theta(d.theta_file);
    if (theta.size() != num_params(s.model)) throw ConfigError("theta_file does not match the model size");
  } else {
    RunOptions opts;
    const RunResult r = run(s.model, s.theta0, s.problem, s.rule, config.optimizer, opts);
    if (r.diverged()) throw DivergenceError("solve diverged before diagnosis: " + r.message);
    theta = r.theta;
    if (r.trace.size() >= 4) out.convergence = convergence_phases(r.trace.step_norms());
  }
  out.label = "network width " + std::to_string(config.model.width);
  out.semi = semiregularity_report(s.model, theta, s.problem, s.rule, so);
  out.q = q_matrix_estimate(s.model, theta, s.problem, s.rule);

  Rng rng(d.wedin_seed);
  Vector delta(theta.size());
  for (Index i = 0; i < delta.size(); ++i) delta[i] = rng.normal();
  delta *= d.wedin_scale / delta.norm();
  const Matrix A = gauss_newton_matrix(s.model, theta, s.problem, s.rule);
  const Matrix B = gauss_newton_matrix(s.model, theta + delta, s.problem, s.rule);
  out.wedin = wedin_check(A, B - A, config.optimizer.pinv_tau);
  return out;
}

std::string format_diagnose(const DiagnoseOutcome& d) {
  std::ostringstream o;
  const auto& s = d.semi;
  o << "case: " << d.label << '\n';
  o << "parameters m: " << s.m << '\n';
  o << "gradient norm at theta*: " << format_double(s.grad_norm) << (s.stationary ? "" : "  (NOT stationary)") << '\n';
  o << "rank J: " << s.rank_j << '\n';
  o << "rank H: " << s.rank_h << ", nullity " << s.nullity << '\n';
  o << "branch dimension estimate: " << s.branch_dim << '\n';
  o << "semiregular-consistent: " << (s.consistent() ? "yes" : "no") << '\n';
  o << "classification: " << s.classification() << '\n';
  if (d.q) {
    o << "||Q||: " << format_double(d.q->q_norm) << ", ||J||: " << format_double(d.q->j_norm)
      << ", ratio: " << format_double(d.q->ratio()) << '\n';
  }
  if (d.wedin) {
    const auto& w = *d.wedin;
    o << "Wedin check (" << (w.applicable ? "applicable" : "rank changed, not applicable") << "; ranks " << w.rank_a
      << " -> " << w.rank_b << "): spectral lhs " << format_double(w.lhs_2) << " rhs(mu=1) " << format_double(w.rhs_2)
      << " mu " << format_double(w.mu_2) << "; Frobenius lhs " << format_double(w.lhs_f) << " rhs(mu=1) "
      << format_double(w.rhs_f) << " mu " << format_double(w.mu_f) << '\n';
  }
  if (d.convergence) {
    const auto& c = *d.convergence;
    o << "convergence phases:";
    for (const auto& seg : c.segments) o << ' ' << to_string(seg.phase) << '[' << seg.begin << ',' << seg.end << ')';
    o << "\nterminal coefficient: " << format_double(c.terminal_coefficient) << '\n';
    o << "contracting steps in last 20: " << c.contracting_in_last_20 << '\n';
  }
  return o.str();
}

void write_diagnose_csv(std::ostream& out, const DiagnoseOutcome& d) {
  CsvWriter csv(out, {"quantity", "value"});
  const auto& s = d.semi;
  csv.cell(std::string("m")).cell(s.m).end_row();
  csv.cell(std::string("grad_norm")).cell(s.grad_norm).end_row();
  csv.cell(std::string("rank_j")).cell(s.rank_j).end_row();
  csv.cell(std::string("rank_h")).cell(s.rank_h).end_row();
  csv.cell(std::string("nullity")).cell(s.nullity).end_row();
  csv.cell(std::string("branch_dim")).cell(s.branch_dim).end_row();
  csv.cell(std::string("consistent")).cell(s.consistent() ? 1 : 0).end_row();
  if (d.q) {
    csv.cell(std::string("q_norm")).cell(d.q->q_norm).end_row();
    csv.cell(std::string("j_norm")).cell(d.q->j_norm).end_row();
    csv.cell(std::string("q_ratio")).cell(d.q->ratio()).end_row();
  }
  if (d.wedin) {
    csv.cell(std::string("wedin_applicable")).cell(d.wedin->applicable ? 1 : 0).end_row();
    csv.cell(std::string("wedin_mu_2")).cell(d.wedin->mu_2).end_row();
    csv.cell(std::string("wedin_mu_f")).cell(d.wedin->mu_f).end_row();
  }
  if (d.convergence) {
    csv.cell(std::string("terminal_coefficient")).cell(d.convergence->terminal_coefficient).end_row();
  }
}

}  // namespace ritzgn
