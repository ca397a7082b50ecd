#include "ritzgn/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace ritzgn {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Reads typed values out of one section and remembers which keys were used.
class SectionReader {
 public:
  SectionReader(std::string name, const IniSection* section) : name_(std::move(name)), section_(section) {}

  [[nodiscard]] bool has(const std::string& key) const { return section_ && section_->count(key) > 0; }

  void str(const std::string& key, std::string& out) {
    if (const IniEntry* e = take(key)) out = e->value;
  }
  void real(const std::string& key, double& out) {
    if (const IniEntry* e = take(key)) out = to_real(*e, key);
  }
  void integer(const std::string& key, int& out) {
    if (const IniEntry* e = take(key)) out = static_cast<int>(to_int(*e, key, -2147483647LL, 2147483647LL));
  }
  void size(const std::string& key, std::size_t& out) {
    if (const IniEntry* e = take(key)) out = static_cast<std::size_t>(to_int(*e, key, 0, 1LL << 40));
  }
  void seed(const std::string& key, std::uint64_t& out) {
    if (const IniEntry* e = take(key)) {
      char* end = nullptr;
      errno = 0;
      const unsigned long long v = std::strtoull(e->value.c_str(), &end, 10);
      if (errno != 0 || end == e->value.c_str() || *end != '\0' || e->value[0] == '-') fail(*e, key, "an unsigned integer");
      out = v;
    }
  }
  void boolean(const std::string& key, bool& out) {
    if (const IniEntry* e = take(key)) {
      if (e->value == "true" || e->value == "1" || e->value == "yes") {
        out = true;
      } else if (e->value == "false" || e->value == "0" || e->value == "no") {
        out = false;
      } else {
        fail(*e, key, "a boolean");
      }
    }
  }
  void int_list(const std::string& key, std::vector<int>& out) {
    if (const IniEntry* e = take(key)) {
      out.clear();
      for (const auto& item : split_list(e->value)) {
        IniEntry sub{item, e->line};
        out.push_back(static_cast<int>(to_int(sub, key, -2147483647LL, 2147483647LL)));
      }
    }
  }
  template <class Enum>
  void choice(const std::string& key, Enum& out, const std::vector<std::pair<std::string, Enum>>& options) {
    if (const IniEntry* e = take(key)) {
      for (const auto& [label, value] : options) {
        if (label == e->value) {
          out = value;
          return;
        }
      }
      std::string allowed;
      for (const auto& o : options) allowed += (allowed.empty() ? "" : ", ") + o.first;
      fail(*e, key, "one of {" + allowed + "}");
    }
  }

  void reject_unused() const {
    if (!section_) return;
    for (const auto& [key, entry] : *section_) {
      if (!used_.count(key)) {
        throw ConfigError("line " + std::to_string(entry.line) + ": unknown key '" + key + "' in [" + name_ + "]");
      }
    }
  }

  [[noreturn]] void fail(const IniEntry& e, const std::string& key, const std::string& expected) const {
    throw ConfigError("line " + std::to_string(e.line) + ": [" + name_ + "] " + key + " = '" + e.value +
                      "' is not " + expected);
  }

 private:
  const IniEntry* take(const std::string& key) {
    if (!section_) return nullptr;
    auto it = section_->find(key);
    if (it == section_->end()) return nullptr;
    used_.insert(key);
    return &it->second;
  }
  double to_real(const IniEntry& e, const std::string& key) const {
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(e.value.c_str(), &end);
    if (errno != 0 || end == e.value.c_str() || *end != '\0') fail(e, key, "a number");
    return v;
  }
  long long to_int(const IniEntry& e, const std::string& key, long long lo, long long hi) const {
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(e.value.c_str(), &end, 10);
    if (errno != 0 || end == e.value.c_str() || *end != '\0' || v < lo || v > hi) fail(e, key, "an integer in range");
    return v;
  }

  std::string name_;
  const IniSection* section_;
  std::set<std::string> used_;
};

const std::vector<std::pair<std::string, ScheduleKind>> kScheduleKinds = {
    {"fixed", ScheduleKind::fixed},
    {"geometric_up", ScheduleKind::geometric_up},
    {"geometric_down", ScheduleKind::geometric_down}};

const std::vector<std::pair<std::string, SamplingKind>> kSamplingKinds = {
    {"uniform", SamplingKind::uniform}, {"stratified", SamplingKind::stratified}};

void read_schedule(SectionReader& r, const std::string& prefix, StepSchedule& s) {
  r.real(prefix + "lr", s.initial);
  r.real(prefix + "factor", s.factor);
  r.integer(prefix + "period", s.period);
}

}  // namespace

IniDocument parse_ini(const std::string& text) {
  IniDocument doc;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']' || s.size() < 3) throw ConfigError("line " + std::to_string(line) + ": malformed section header");
      section = trim(s.substr(1, s.size() - 2));
      doc[section];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line) + ": expected key = value");
    if (section.empty()) throw ConfigError("line " + std::to_string(line) + ": key outside of a section");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line) + ": empty key");
    auto& sec = doc[section];
    if (sec.count(key)) throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + key + "'");
    sec[key] = {value, line};
  }
  return doc;
}

RunConfig default_config() {
  RunConfig c;
  c.optimizer.method = Method::gn_variational;
  c.optimizer.schedule = StepSchedule::fixed(1.0);
  c.optimizer.max_iters = 200;
  c.optimizer.grad_tol = 0.0;
  c.optimizer.step_tol = 1e-7;
  c.optimizer.pinv_tau = 1e-10;
  c.optimizer.warm_start = WarmStart{1000, 1e-3};
  return c;
}

void RunConfig::validate() const {
  if (!(problem.a >= 0.0) || !(problem.c > 0.0)) throw ConfigError("[problem] needs a >= 0 and c > 0");
  if (model.kind == ModelKind::network) {
    if (model.width < 1) throw ConfigError("[model] width must be >= 1");
    model.activation.validate();
  } else if (model.fem_nodes < 2) {
    throw ConfigError("[model] fem_nodes must be >= 2");
  }
  for (int d : model.fem_duplicate) {
    if (d < 0 || d >= model.fem_nodes) throw ConfigError("[model] fem_duplicate index out of range");
  }
  if (quadrature.order < 1 || quadrature.cells < 1 || quadrature.error_order < 1) {
    throw ConfigError("[quadrature] order, cells and error_order must be >= 1");
  }
  optimizer.validate();
  for (int w : table.widths) {
    if (w < 1) throw ConfigError("[table] widths must be >= 1");
  }
  if (table.widths.empty()) throw ConfigError("[table] widths is empty");
  for (int n : consistency.n_values) {
    if (n < 1) throw ConfigError("[consistency] n_values must be >= 1");
  }
  if (consistency.steps < 1 || consistency.table_iters < 0) throw ConfigError("[consistency] steps must be >= 1");
  if (race.iters < 1 || race.batch < 1) throw ConfigError("[race] iters and batch must be >= 1");
  race.gn.validate();
  race.adam.validate();
  race.sgd.validate();
  if (!(race.gn_tau > 0.0 && race.gn_tau < 1.0)) throw ConfigError("[race] gn_tau must lie in (0, 1)");
  if (!(diagnose.tau_rel > 0.0 && diagnose.tau_rel < 1.0)) throw ConfigError("[diagnose] tau_rel must lie in (0, 1)");
}

RunConfig parse_config(const std::string& text) {
  const IniDocument doc = parse_ini(text);
  static const std::set<std::string> known = {"problem", "model",  "quadrature", "optimizer", "output",
                                              "table",   "consistency", "race", "diagnose"};
  for (const auto& [name, sec] : doc) {
    if (!known.count(name)) {
      const int line = sec.empty() ? 0 : sec.begin()->second.line;
      throw ConfigError("unknown section [" + name + "]" + (line ? " near line " + std::to_string(line) : ""));
    }
  }
  const auto section = [&](const std::string& name) -> const IniSection* {
    auto it = doc.find(name);
    return it == doc.end() ? nullptr : &it->second;
  };

  RunConfig c = default_config();
  {
    SectionReader r("problem", section("problem"));
    r.str("name", c.problem.name);
    r.real("a", c.problem.a);
    r.real("c", c.problem.c);
    r.reject_unused();
  }
  {
    SectionReader r("model", section("model"));
    auto& m = c.model;
    r.choice("kind", m.kind, {{"network", ModelKind::network}, {"fem", ModelKind::fem}});
    r.integer("width", m.width);
    r.choice("activation", m.activation.kind,
             {{"tanh", ActivationKind::tanh}, {"relu_pow", ActivationKind::relu_pow}});
    if (m.activation.kind == ActivationKind::relu_pow && !r.has("k")) m.activation.power = 2;
    r.integer("k", m.activation.power);
    if (r.has("trainable")) {
      std::string list;
      r.str("trainable", list);
      m.mask = {false, false, false};
      for (const auto& item : split_list(list)) {
        if (item == "a") m.mask.a = true;
        else if (item == "w") m.mask.w = true;
        else if (item == "b") m.mask.b = true;
        else if (item == "all") m.mask = {true, true, true};
        else throw ConfigError("[model] trainable accepts a, w, b or all, got '" + item + "'");
      }
    }
    r.choice("init", m.init,
             {{"uniform_box", InitScheme::uniform_box},
              {"normal", InitScheme::normal},
              {"normal_slopes", InitScheme::normal_slopes},
              {"node_adapted", InitScheme::node_adapted}});
    r.seed("seed", m.seed);
    r.real("delta", m.delta);
    r.real("a_scale", m.a_scale);
    r.boolean("scale_a_by_width", m.scale_a_by_width);
    r.real("w_scale", m.w_scale);
    r.real("sharpness", m.sharpness);
    r.integer("fem_nodes", m.fem_nodes);
    r.int_list("fem_duplicate", m.fem_duplicate);
    r.reject_unused();
  }
  {
    SectionReader r("quadrature", section("quadrature"));
    auto& q = c.quadrature;
    r.choice("kind", q.kind,
             {{"gauss", QuadratureKind::gauss},
              {"composite_gauss", QuadratureKind::composite_gauss},
              {"monte_carlo", QuadratureKind::monte_carlo}});
    r.integer("order", q.order);
    r.integer("cells", q.cells);
    r.seed("seed", q.seed);
    r.boolean("boundary", q.boundary);
    r.integer("error_order", q.error_order);
    r.reject_unused();
  }
  {
    SectionReader r("optimizer", section("optimizer"));
    auto& o = c.optimizer;
    std::string method = to_string(o.method);
    r.str("method", method);
    o.method = parse_method(method);
    r.choice("schedule", o.schedule.kind, kScheduleKinds);
    read_schedule(r, "", o.schedule);
    if (r.has("cap")) {
      double cap = 0.0;
      r.real("cap", cap);
      o.schedule.cap = cap;
    }
    r.integer("max_iters", o.max_iters);
    r.real("grad_tol", o.grad_tol);
    r.real("step_tol", o.step_tol);
    r.real("pinv_tau", o.pinv_tau);
    const bool any_batch = r.has("batch_interior") || r.has("batch_boundary") || r.has("batch_seed") || r.has("sampling");
    if (is_randomized(o.method)) {
      BatchSpec b;
      r.size("batch_interior", b.interior);
      r.size("batch_boundary", b.boundary);
      r.seed("batch_seed", b.seed);
      r.choice("sampling", b.sampling, kSamplingKinds);
      o.batch = b;
    } else if (any_batch) {
      throw ConfigError("[optimizer] batch keys only apply to gn_random and sgd");
    }
    r.real("beta1", o.beta1);
    r.real("beta2", o.beta2);
    r.real("adam_eps", o.adam_eps);
    WarmStart warm = o.warm_start.value_or(WarmStart{});
    r.integer("warm_start_iters", warm.iters);
    r.real("warm_start_lr", warm.lr);
    if (warm.iters > 0) {
      o.warm_start = warm;
    } else if (warm.iters == 0) {
      o.warm_start.reset();
    } else {
      throw ConfigError("[optimizer] warm_start_iters must be >= 0");
    }
    r.reject_unused();
  }
  {
    SectionReader r("output", section("output"));
    r.str("dir", c.output.dir);
    r.boolean("emit_csv", c.output.emit_csv);
    r.boolean("emit_svg", c.output.emit_svg);
    r.boolean("record_time", c.output.record_time);
    r.reject_unused();
  }
  {
    SectionReader r("table", section("table"));
    r.int_list("widths", c.table.widths);
    r.reject_unused();
  }
  {
    SectionReader r("consistency", section("consistency"));
    r.int_list("n_values", c.consistency.n_values);
    r.integer("steps", c.consistency.steps);
    r.integer("table_iters", c.consistency.table_iters);
    r.real("eta", c.consistency.eta);
    r.reject_unused();
  }
  {
    SectionReader r("race", section("race"));
    r.integer("iters", c.race.iters);
    r.size("batch", c.race.batch);
    r.choice("sampling", c.race.sampling, kSamplingKinds);
    r.seed("batch_seed", c.race.batch_seed);
    r.real("gn_tau", c.race.gn_tau);
    read_schedule(r, "gn_", c.race.gn);
    read_schedule(r, "adam_", c.race.adam);
    read_schedule(r, "sgd_", c.race.sgd);
    r.reject_unused();
  }
  {
    SectionReader r("diagnose", section("diagnose"));
    r.choice("case", c.diagnose.target,
             {{"network", DiagnoseCase::network},
              {"fem", DiagnoseCase::fem},
              {"fem_duplicate", DiagnoseCase::fem_duplicate},
              {"relu_branch", DiagnoseCase::relu_branch}});
    r.str("theta_file", c.diagnose.theta_file);
    r.real("tau_rel", c.diagnose.tau_rel);
    r.real("flat_tol", c.diagnose.flat_tol);
    r.real("wedin_scale", c.diagnose.wedin_scale);
    r.seed("wedin_seed", c.diagnose.wedin_seed);
    r.reject_unused();
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace ritzgn
