#pragma once

// The experiment drivers behind the CLI subcommands. Each is deterministic
// for a fixed config.

#include "ritzgn/collocation.hpp"
#include "ritzgn/config.hpp"
#include "ritzgn/diagnostics.hpp"
#include "ritzgn/linalg.hpp"
#include "ritzgn/metrics.hpp"
#include "ritzgn/optimize.hpp"
#include "ritzgn/variational.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace ritzgn {

struct Setup {
  Problem problem;
  Model model;
  QuadratureRule rule;
  QuadratureRule error_rule;
  ParamVector theta0;
};

[[nodiscard]] QuadratureRule build_rule(const QuadratureConfig& q, Interval domain);
[[nodiscard]] Model build_model(const ModelConfig& m, Interval domain);
/// node_adapted uses the interior and boundary nodes of `rule`.
[[nodiscard]] ParamVector build_init(const ModelConfig& m, const Model& model, const QuadratureRule& rule);
[[nodiscard]] Setup build_setup(const RunConfig& config);

struct SolveOutcome {
  Setup setup;
  RunResult run;
  ErrorReport start_errors;  // at θ after the warm start
  ErrorReport final_errors;
};

[[nodiscard]] SolveOutcome run_solve(const RunConfig& config);

struct WidthRow {
  int width = 0;
  double l2 = 0.0;
  double h1 = 0.0;
  double h1_semi = 0.0;
  int gn_iters = 0;
  bool failed = false;
  std::string message;
};

/// One solve per width in config.table.widths; failures become NaN rows.
[[nodiscard]] std::vector<WidthRow> run_table_widths(const RunConfig& config);
void write_table_csv(std::ostream& out, const std::vector<WidthRow>& rows);

struct ConsistencyStepRecord {
  int step = 0;
  double step_difference = 0.0;    // at the shared iterate
  double relative_difference = 0.0;
  double trajectory_gap = 0.0;     // ‖θ_var − θ_col‖ after the step
  double variational_step_norm = 0.0;
  double collocation_step_norm = 0.0;
  int rank_g = 0;
};

struct ConsistencyOutcome {
  int n = 0;
  int columns = 0;
  int rank_g = 0;                 // at θ0
  double identity_error = 0.0;    // at θ0
  double volume_form_gap = 0.0;   // at θ0
  std::vector<ConsistencyStepRecord> steps;
  ErrorReport variational_errors;  // after table_iters steps
  ErrorReport collocation_errors;
  bool variational_diverged = false;
  bool collocation_diverged = false;
};

/// For every N: the divergence-form variational step (G·JF)†·G·F and the
/// collocation step JF†·F compared at the same iterate along the variational
/// trajectory, the two trajectories run side by side, then both continued to
/// table_iters for the error table. θ0 comes from the first N.
[[nodiscard]] std::vector<ConsistencyOutcome> run_consistency(const RunConfig& config);
void write_consistency_csv(std::ostream& out, const std::vector<ConsistencyOutcome>& runs);
/// n,form,l2_error,h1_error
void write_table2_csv(std::ostream& out, const std::vector<ConsistencyOutcome>& runs);

struct RaceOutcome {
  RunResult gn;
  RunResult adam;
  RunResult sgd;
};

/// Random GN, Adam and SGD from the same θ0 on the same batch sequence.
[[nodiscard]] RaceOutcome run_race(const RunConfig& config);
/// iter then loss and l2 error per method on one iteration grid.
void write_race_csv(std::ostream& out, const RaceOutcome& race);

struct DiagnoseOutcome {
  std::string label;
  SemiregularityReport semi;
  std::optional<QEstimate> q;
  std::optional<WedinReport> wedin;
  std::optional<ConvergenceReport> convergence;
};

[[nodiscard]] DiagnoseOutcome run_diagnose(const RunConfig& config);
[[nodiscard]] std::string format_diagnose(const DiagnoseOutcome& d);
void write_diagnose_csv(std::ostream& out, const DiagnoseOutcome& d);

/// The inactive-neuron ReLU^k configuration: one neuron with w frozen at 1,
/// θ* = (a, b) = (0, 0), an interior node at -0.5 and one boundary node at +1.
struct ReluBranchCase {
  Model model;
  Problem problem;
  QuadratureRule rule;
  ParamVector theta_star;
};
[[nodiscard]] ReluBranchCase relu_branch_case(int k = 2);

}  // namespace ritzgn
