#pragma once

// Plain-text run configuration:
//
//   # comment
//   [section]
//   key = value
//
// Every key must be known for its section; anything else is a ConfigError.

#include "ritzgn/model.hpp"
#include "ritzgn/optimize.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ritzgn {

struct IniEntry {
  std::string value;
  int line = 0;
};

using IniSection = std::map<std::string, IniEntry>;
using IniDocument = std::map<std::string, IniSection>;

/// Throws ConfigError with the line number on malformed input or duplicate keys.
[[nodiscard]] IniDocument parse_ini(const std::string& text);

struct ProblemConfig {
  std::string name = "cos-neumann-1d";
  double a = 1.0;
  double c = 1.0;
};

enum class ModelKind { network, fem };

struct ModelConfig {
  ModelKind kind = ModelKind::network;
  int width = 128;
  ActivationSpec activation = ActivationSpec::tanh();
  TrainableMask mask;
  InitScheme init = InitScheme::normal_slopes;
  std::uint64_t seed = 1;
  double delta = 0.1;
  double a_scale = 1.0;
  bool scale_a_by_width = true;  // a_scale / √width
  double w_scale = 2.0;
  double sharpness = 2.0;
  int fem_nodes = 101;
  std::vector<int> fem_duplicate;  // hat indices repeated in the frame
};

enum class QuadratureKind { gauss, composite_gauss, monte_carlo };

struct QuadratureConfig {
  QuadratureKind kind = QuadratureKind::gauss;
  int order = 100;  // nodes (gauss, monte_carlo) or nodes per cell (composite_gauss)
  int cells = 1;
  std::uint64_t seed = 0;
  bool boundary = true;
  int error_order = 400;
};

struct OutputConfig {
  std::string dir = "out";
  bool emit_csv = true;
  bool emit_svg = false;
  bool record_time = false;
};

struct TableConfig {
  std::vector<int> widths{32, 64, 128, 256, 512};
};

struct ConsistencyConfig {
  std::vector<int> n_values{100, 500};
  int steps = 10;
  int table_iters = 50;
  double eta = 1.0;
};

struct RaceConfig {
  int iters = 1500;
  std::size_t batch = 200;
  SamplingKind sampling = SamplingKind::stratified;
  std::uint64_t batch_seed = 7;
  double gn_tau = 1e-6;
  StepSchedule gn = StepSchedule::down(1.0, 0.5, 500);
  StepSchedule adam = StepSchedule::down(1e-3, 0.4, 500);
  StepSchedule sgd = StepSchedule::down(5e-3, 0.2, 300);
};

enum class DiagnoseCase { network, fem, fem_duplicate, relu_branch };

struct DiagnoseConfig {
  DiagnoseCase target = DiagnoseCase::network;
  std::string theta_file;  // empty: solve first
  double tau_rel = 1e-8;
  double flat_tol = 1e-8;
  double wedin_scale = 1e-6;
  std::uint64_t wedin_seed = 3;
};

struct RunConfig {
  ProblemConfig problem;
  ModelConfig model;
  QuadratureConfig quadrature;
  OptimizerConfig optimizer;
  OutputConfig output;
  TableConfig table;
  ConsistencyConfig consistency;
  RaceConfig race;
  DiagnoseConfig diagnose;

  void validate() const;
};

/// Defaults of every section: the GN warm-start solve of cos-neumann-1d at width 128.
[[nodiscard]] RunConfig default_config();

[[nodiscard]] RunConfig parse_config(const std::string& text);
[[nodiscard]] RunConfig load_config(const std::string& path);

}  // namespace ritzgn
