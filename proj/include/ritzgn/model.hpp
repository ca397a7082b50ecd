#pragma once

// Discretization models u(x, θ): one-hidden-layer networks and a 1D
// piecewise-linear finite-element frame, with closed-form derivatives in x and θ.

#include "ritzgn/types.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace ritzgn {

enum class ActivationKind { relu_pow, tanh };

struct ActivationSpec {
  ActivationKind kind = ActivationKind::tanh;
  int power = 2;  // k for relu_pow

  static ActivationSpec tanh() { return {ActivationKind::tanh, 0}; }
  static ActivationSpec relu_pow(int k) { return {ActivationKind::relu_pow, k}; }

  /// Throws ConfigError when relu_pow has k < 2 (Δu would not exist a.e.).
  void validate() const;
};

/// σ and its first three derivatives at one pre-activation value.
struct ActivationJet {
  double s0, s1, s2, s3;
};

/// Evaluates σ^(j)(z), j = 0..3. ReLU^k kinks use the right-continuous
/// convention: max(z, 0)^0 is 0 at z = 0.
[[nodiscard]] ActivationJet activation_jet(const ActivationSpec& act, double z);

/// Which parameter blocks of a network are optimized.
struct TrainableMask {
  bool a = true;
  bool w = true;
  bool b = true;
  bool operator==(const TrainableMask&) const = default;
};

/// All derivatives of u at a single point x.
struct PointJet {
  double u = 0.0;
  Vector grad_x;        // ∇_x u, length d
  double laplacian = 0.0;
  Vector d_u;           // ∇_θ u, length m
  Matrix d_grad_x;      // ∇_θ ∇_x u, m × d
  Vector d_laplacian;   // ∇_θ Δu, length m
};

/// u(x, θ) = Σ_i a_i σ(w_i · x + b_i) with θ packed as (a | w | b), frozen
/// blocks omitted. w is stored neuron-major: w_i occupies d consecutive slots.
class NetworkModel {
 public:
  NetworkModel(int width, int dim, ActivationSpec activation, TrainableMask mask = {});

  [[nodiscard]] int width() const { return width_; }
  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] const ActivationSpec& activation() const { return activation_; }
  [[nodiscard]] const TrainableMask& mask() const { return mask_; }
  [[nodiscard]] int num_params() const;

  /// Offsets of the trainable blocks inside θ; -1 for a frozen block.
  [[nodiscard]] int a_offset() const;
  [[nodiscard]] int w_offset() const;
  [[nodiscard]] int b_offset() const;

  /// Values used for frozen blocks. Defaults: a = 1, w_i = (+1, -1, +1, ...)
  /// in every coordinate, b = 0.
  void set_frozen_a(const Vector& a);
  void set_frozen_w(const Matrix& w);  // width × dim
  void set_frozen_b(const Vector& b);

  struct Unpacked {
    Vector a;  // width
    Matrix w;  // width × dim
    Vector b;  // width
  };
  [[nodiscard]] Unpacked unpack(const ParamVector& theta) const;
  /// Packs the trainable blocks of (a, w, b) into θ.
  [[nodiscard]] ParamVector pack(const Vector& a, const Matrix& w, const Vector& b) const;

  [[nodiscard]] PointJet jet(const ParamVector& theta, std::span<const double> x) const;
  [[nodiscard]] double eval(const ParamVector& theta, std::span<const double> x) const;
  /// u and ∇ₓu without the parameter derivatives.
  [[nodiscard]] std::pair<double, Vector> eval_with_grad(const ParamVector& theta, std::span<const double> x) const;

 private:
  void check(const ParamVector& theta, std::span<const double> x) const;

  int width_;
  int dim_;
  ActivationSpec activation_;
  TrainableMask mask_;
  Vector frozen_a_;
  Matrix frozen_w_;
  Vector frozen_b_;
};

/// u(x, θ) = Σ_j θ_j φ_{frame[j]}(x) over hat functions of a strictly
/// increasing 1D mesh. The frame may repeat a hat (a rank-deficient frame).
class FemModel {
 public:
  explicit FemModel(std::vector<double> nodes, std::vector<int> frame = {});

  static FemModel uniform(Interval domain, int num_nodes);

  [[nodiscard]] const std::vector<double>& nodes() const { return nodes_; }
  [[nodiscard]] const std::vector<int>& frame() const { return frame_; }
  [[nodiscard]] int num_params() const { return static_cast<int>(frame_.size()); }
  [[nodiscard]] Interval domain() const { return {nodes_.front(), nodes_.back()}; }

  /// Element index e with x in [x_e, x_{e+1}); the last element is closed.
  [[nodiscard]] int element_of(double x) const;
  [[nodiscard]] double hat(int node, double x) const;
  /// Right-continuous derivative of φ_node (left limit at the right end).
  [[nodiscard]] double hat_derivative(int node, double x) const;

  /// Coefficients reproducing g at every node (identity frames only).
  template <class F>
  [[nodiscard]] ParamVector interpolate(F&& g) const {
    ParamVector theta(num_params());
    for (int j = 0; j < num_params(); ++j) theta[j] = g(nodes_[static_cast<std::size_t>(frame_[j])]);
    return theta;
  }

  [[nodiscard]] PointJet jet(const ParamVector& theta, double x) const;
  [[nodiscard]] double eval(const ParamVector& theta, double x) const;
  [[nodiscard]] std::pair<double, double> eval_with_slope(const ParamVector& theta, double x) const;

 private:
  void check(const ParamVector& theta, double x) const;
  /// Frame indices whose hat is nonzero on the element containing x, ascending.
  [[nodiscard]] std::vector<int> active(double x, int& element) const;

  std::vector<double> nodes_;
  std::vector<int> frame_;
  std::vector<std::vector<int>> users_;  // node -> frame indices, ascending
};

using Model = std::variant<NetworkModel, FemModel>;

[[nodiscard]] int num_params(const Model& model);
[[nodiscard]] int spatial_dim(const Model& model);

[[nodiscard]] double eval_u(const Model& model, const ParamVector& theta, std::span<const double> x);
[[nodiscard]] Vector grad_x_u(const Model& model, const ParamVector& theta, std::span<const double> x);
[[nodiscard]] std::pair<double, Vector> eval_with_grad(const Model& model, const ParamVector& theta,
                                                       std::span<const double> x);
[[nodiscard]] double laplacian_u(const Model& model, const ParamVector& theta, std::span<const double> x);
[[nodiscard]] Vector grad_theta_u(const Model& model, const ParamVector& theta, std::span<const double> x);
[[nodiscard]] Matrix grad_theta_grad_x_u(const Model& model, const ParamVector& theta,
                                         std::span<const double> x);
[[nodiscard]] Vector grad_theta_laplacian_u(const Model& model, const ParamVector& theta,
                                            std::span<const double> x);
[[nodiscard]] PointJet point_jet(const Model& model, const ParamVector& theta, std::span<const double> x);

// 1D conveniences.
[[nodiscard]] inline double eval_u(const Model& m, const ParamVector& t, double x) {
  return eval_u(m, t, std::span<const double>(&x, 1));
}
[[nodiscard]] inline PointJet point_jet(const Model& m, const ParamVector& t, double x) {
  return point_jet(m, t, std::span<const double>(&x, 1));
}

// normal_slopes: a and b as in uniform_box, w entries N(0, w_scale²).
enum class InitScheme { uniform_box, normal, normal_slopes, given, node_adapted };

struct InitOptions {
  InitScheme scheme = InitScheme::uniform_box;
  std::uint64_t seed = 0;
  double delta = 0.1;    // b_i ∈ [-1-δ, 1+δ] for uniform_box
  double a_scale = 1.0;  // a_i ∈ [-s, s] (uniform_box) or N(0, s²) (normal)
  double w_scale = 1.0;  // w entries ∈ [-s, s] or N(0, s²)
  ParamVector given;
  // node_adapted: tanh neurons centred between consecutive sorted nodes with
  // slope sharpness / gap, so every node pair is separated by one transition.
  std::vector<double> nodes;
  double sharpness = 2.0;
};

/// Deterministic for a fixed seed. FemModel coefficients use a_scale.
[[nodiscard]] ParamVector init_params(const Model& model, const InitOptions& options);

}  // namespace ritzgn
