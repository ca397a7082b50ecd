// ritzgn command-line runner.
//
//   ritzgn <solve|table-widths|consistency|race|diagnose> [--config FILE] [--width N] [--seed S] [--out DIR]
//
// Exit codes: 0 success, 2 configuration error, 3 numerical divergence, 1 anything else.

#include "ritzgn/experiments.hpp"
#include "ritzgn/report.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace ritzgn;

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kDivergence = 3;

struct Overrides {
  std::string config;
  std::optional<int> width;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

RunConfig load(const Overrides& o) {
  RunConfig c = o.config.empty() ? default_config() : load_config(o.config);
  if (o.width) c.model.width = *o.width;
  if (o.seed) c.model.seed = *o.seed;
  if (o.out) c.output.dir = *o.out;
  c.validate();
  return c;
}

std::string path_in(const RunConfig& c, const std::string& name) {
  return (std::filesystem::path(c.output.dir) / name).string();
}

template <class F>
void write_csv(const RunConfig& c, const std::string& name, F&& body) {
  if (!c.output.emit_csv) return;
  std::ostringstream s;
  body(s);
  write_text_file(path_in(c, name), s.str());
}

Series trace_series(const std::string& label, const IterTrace& t, bool loss) {
  Series s{label, {}, {}};
  for (const auto& r : t.records) {
    s.x.push_back(r.iter);
    s.y.push_back(loss ? r.loss : r.l2_err);
  }
  return s;
}

int cmd_solve(const Overrides& o) {
  const RunConfig c = load(o);
  ensure_directory(c.output.dir);
  const SolveOutcome out = run_solve(c);
  write_csv(c, "trace.csv", [&](std::ostream& s) { write_trace_csv(s, out.run.trace); });
  write_csv(c, "errors.csv", [&](std::ostream& s) { write_errors_csv(s, out.final_errors); });
  write_theta(path_in(c, "theta.txt"), out.run.theta);
  if (c.output.emit_svg) {
    write_text_file(path_in(c, "loss.svg"),
                    svg_plot({trace_series("loss", out.run.trace, true)}, "loss", "L(theta)", false));
    write_text_file(path_in(c, "l2_error.svg"),
                    svg_plot({trace_series("L2 error", out.run.trace, false)}, "L2 error", "error", true));
  }
  std::printf("iterations %zu, stop %s\n", out.run.trace.size(), to_string(out.run.stop).c_str());
  std::printf("start  l2 %s  h1 %s\n", format_double(out.start_errors.l2).c_str(), format_double(out.start_errors.h1).c_str());
  std::printf("final  l2 %s  h1 %s\n", format_double(out.final_errors.l2).c_str(), format_double(out.final_errors.h1).c_str());
  if (out.run.diverged()) {
    std::fprintf(stderr, "diverged: %s\n", out.run.message.c_str());
    return kDivergence;
  }
  return kOk;
}

int cmd_table_widths(const Overrides& o) {
  RunConfig c = load(o);
  if (o.width) c.table.widths = {*o.width};
  ensure_directory(c.output.dir);
  const auto rows = run_table_widths(c);
  write_csv(c, "table.csv", [&](std::ostream& s) { write_table_csv(s, rows); });
  bool failed = false;
  for (const auto& r : rows) {
    std::printf("width %4d  l2 %-24s h1 %-24s%s\n", r.width, format_double(r.l2).c_str(), format_double(r.h1).c_str(),
                r.failed ? ("  FAILED: " + r.message).c_str() : "");
    failed = failed || r.failed;
  }
  return failed ? kDivergence : kOk;
}

int cmd_consistency(const Overrides& o) {
  const RunConfig c = load(o);
  ensure_directory(c.output.dir);
  const auto runs = run_consistency(c);
  write_csv(c, "consistency.csv", [&](std::ostream& s) { write_consistency_csv(s, runs); });
  write_csv(c, "table2.csv", [&](std::ostream& s) { write_table2_csv(s, runs); });
  for (const auto& r : runs) {
    double worst = 0.0;
    for (const auto& s : r.steps) worst = std::max(worst, s.relative_difference);
    std::printf("N %d: rank(G) %d of %d columns, |J - G*JF| %s, max relative step difference %s\n", r.n, r.rank_g,
                r.columns, format_double(r.identity_error).c_str(), format_double(worst).c_str());
    std::printf("  after %d steps: L2-form l2 %s, variational l2 %s\n", c.consistency.table_iters,
                format_double(r.collocation_errors.l2).c_str(), format_double(r.variational_errors.l2).c_str());
  }
  return kOk;
}

int cmd_race(const Overrides& o) {
  const RunConfig c = load(o);
  ensure_directory(c.output.dir);
  const RaceOutcome race = run_race(c);
  write_csv(c, "race.csv", [&](std::ostream& s) { write_race_csv(s, race); });
  if (c.output.emit_svg) {
    const auto plot = [&](bool loss) {
      return svg_plot({trace_series("random GN", race.gn.trace, loss), trace_series("Adam", race.adam.trace, loss),
                       trace_series("SGD", race.sgd.trace, loss)},
                      loss ? "variational loss" : "L2 error", loss ? "L(theta)" : "error", !loss);
    };
    write_text_file(path_in(c, "race_loss.svg"), plot(true));
    write_text_file(path_in(c, "race_l2.svg"), plot(false));
  }
  const auto last = [](const RunResult& r) { return r.trace.empty() ? IterRecord{} : r.trace.back(); };
  std::printf("random GN  loss %-24s l2 %s\n", format_double(last(race.gn).loss).c_str(), format_double(last(race.gn).l2_err).c_str());
  std::printf("Adam       loss %-24s l2 %s\n", format_double(last(race.adam).loss).c_str(), format_double(last(race.adam).l2_err).c_str());
  std::printf("SGD        loss %-24s l2 %s\n", format_double(last(race.sgd).loss).c_str(), format_double(last(race.sgd).l2_err).c_str());
  return race.gn.diverged() || race.adam.diverged() || race.sgd.diverged() ? kDivergence : kOk;
}

int cmd_diagnose(const Overrides& o) {
  const RunConfig c = load(o);
  ensure_directory(c.output.dir);
  const DiagnoseOutcome d = run_diagnose(c);
  const std::string text = format_diagnose(d);
  write_text_file(path_in(c, "diagnose.txt"), text);
  write_csv(c, "diagnose.csv", [&](std::ostream& s) { write_diagnose_csv(s, d); });
  std::fputs(text.c_str(), stdout);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ritz-energy Gauss-Newton solver for constant-coefficient elliptic problems"};
  app.require_subcommand(1);
  Overrides o;
  int (*handler)(const Overrides&) = nullptr;

  const auto add = [&](const char* name, const char* help, int (*fn)(const Overrides&)) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", o.config, "run configuration file (defaults apply when omitted)")->check(CLI::ExistingFile);
    sub->add_option("--width", o.width, "hidden-layer width");
    sub->add_option("--seed", o.seed, "initialization seed");
    sub->add_option("--out", o.out, "output directory");
    sub->callback([&handler, fn] { handler = fn; });
  };
  add("solve", "train one model and report its errors", cmd_solve);
  add("table-widths", "error table over hidden-layer widths", cmd_table_widths);
  add("consistency", "variational vs collocation Gauss-Newton steps", cmd_consistency);
  add("race", "random Gauss-Newton against Adam and SGD", cmd_race);
  add("diagnose", "semiregularity, Q-matrix and perturbation diagnostics", cmd_diagnose);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    return handler(o);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const DivergenceError& e) {
    std::fprintf(stderr, "diverged: %s\n", e.what());
    return kDivergence;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
