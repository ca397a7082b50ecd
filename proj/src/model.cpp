#include "ritzgn/model.hpp"

#include "ritzgn/random.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ritzgn {

void ActivationSpec::validate() const {
  if (kind == ActivationKind::relu_pow && power < 2) {
    throw ConfigError("relu_pow activation needs power >= 2, got " + std::to_string(power));
  }
}

ActivationJet activation_jet(const ActivationSpec& act, double z) {
  if (act.kind == ActivationKind::tanh) {
    const double t = std::tanh(z);
    const double d1 = 1.0 - t * t;
    return {t, d1, -2.0 * t * d1, (6.0 * t * t - 2.0) * d1};
  }
  if (!(z > 0.0)) return {0.0, 0.0, 0.0, 0.0};
  const int k = act.power;
  const double kd = k;
  // z^(k-j) for j = 0..3, with z^0 = 1 and negative powers unused (coefficient 0).
  auto pw = [z](int e) { return e <= 0 ? 1.0 : std::pow(z, e); };
  const double s3 = k >= 3 ? kd * (kd - 1.0) * (kd - 2.0) * pw(k - 3) : 0.0;
  return {pw(k), kd * pw(k - 1), kd * (kd - 1.0) * pw(k - 2), s3};
}

// ---------------------------------------------------------------- network

NetworkModel::NetworkModel(int width, int dim, ActivationSpec activation, TrainableMask mask)
    : width_(width), dim_(dim), activation_(activation), mask_(mask) {
  if (width < 1) throw ConfigError("network width must be positive");
  if (dim < 1) throw ConfigError("network dimension must be positive");
  activation_.validate();
  frozen_a_ = Vector::Ones(width);
  frozen_w_ = Matrix(width, dim);
  for (int i = 0; i < width; ++i) frozen_w_.row(i).setConstant(i % 2 == 0 ? 1.0 : -1.0);
  frozen_b_ = Vector::Zero(width);
}

int NetworkModel::num_params() const {
  return (mask_.a ? width_ : 0) + (mask_.w ? width_ * dim_ : 0) + (mask_.b ? width_ : 0);
}

int NetworkModel::a_offset() const { return mask_.a ? 0 : -1; }
int NetworkModel::w_offset() const { return mask_.w ? (mask_.a ? width_ : 0) : -1; }
int NetworkModel::b_offset() const {
  if (!mask_.b) return -1;
  return (mask_.a ? width_ : 0) + (mask_.w ? width_ * dim_ : 0);
}

void NetworkModel::set_frozen_a(const Vector& a) {
  if (a.size() != width_) throw DimensionError("frozen a has wrong length");
  frozen_a_ = a;
}
void NetworkModel::set_frozen_w(const Matrix& w) {
  if (w.rows() != width_ || w.cols() != dim_) throw DimensionError("frozen w has wrong shape");
  frozen_w_ = w;
}
void NetworkModel::set_frozen_b(const Vector& b) {
  if (b.size() != width_) throw DimensionError("frozen b has wrong length");
  frozen_b_ = b;
}

NetworkModel::Unpacked NetworkModel::unpack(const ParamVector& theta) const {
  if (theta.size() != num_params()) {
    throw DimensionError("theta has length " + std::to_string(theta.size()) + ", model expects " +
                         std::to_string(num_params()));
  }
  Unpacked p{frozen_a_, frozen_w_, frozen_b_};
  if (mask_.a) p.a = theta.segment(a_offset(), width_);
  if (mask_.w) {
    for (int i = 0; i < width_; ++i) p.w.row(i) = theta.segment(w_offset() + i * dim_, dim_).transpose();
  }
  if (mask_.b) p.b = theta.segment(b_offset(), width_);
  return p;
}

ParamVector NetworkModel::pack(const Vector& a, const Matrix& w, const Vector& b) const {
  if (a.size() != width_ || b.size() != width_ || w.rows() != width_ || w.cols() != dim_) {
    throw DimensionError("pack: block shapes do not match the network");
  }
  ParamVector theta(num_params());
  if (mask_.a) theta.segment(a_offset(), width_) = a;
  if (mask_.w) {
    for (int i = 0; i < width_; ++i) theta.segment(w_offset() + i * dim_, dim_) = w.row(i).transpose();
  }
  if (mask_.b) theta.segment(b_offset(), width_) = b;
  return theta;
}

void NetworkModel::check(const ParamVector& theta, std::span<const double> x) const {
  if (theta.size() != num_params()) {
    throw DimensionError("theta has length " + std::to_string(theta.size()) + ", model expects " +
                         std::to_string(num_params()));
  }
  if (static_cast<int>(x.size()) != dim_) throw DimensionError("point dimension does not match the network");
}

double NetworkModel::eval(const ParamVector& theta, std::span<const double> x) const {
  check(theta, x);
  const int ao = a_offset();
  const int wo = w_offset();
  const int bo = b_offset();
  const double* th = theta.data();
  double u = 0.0;
  for (int i = 0; i < width_; ++i) {
    double z = bo >= 0 ? th[bo + i] : frozen_b_[i];
    for (int j = 0; j < dim_; ++j) {
      z += (wo >= 0 ? th[wo + i * dim_ + j] : frozen_w_(i, j)) * x[static_cast<std::size_t>(j)];
    }
    u += (ao >= 0 ? th[ao + i] : frozen_a_[i]) * activation_jet(activation_, z).s0;
  }
  return u;
}

PointJet NetworkModel::jet(const ParamVector& theta, std::span<const double> x) const {
  check(theta, x);
  const int m = num_params();
  const int ao = a_offset();
  const int wo = w_offset();
  const int bo = b_offset();
  // Every row is written below when no block is frozen.
  const bool dense = ao >= 0 && wo >= 0 && bo >= 0;
  PointJet out;
  out.grad_x = Vector::Zero(dim_);
  if (dense) {
    out.d_u.resize(m);
    out.d_grad_x.resize(m, dim_);
    out.d_laplacian.resize(m);
  } else {
    out.d_u = Vector::Zero(m);
    out.d_grad_x = Matrix::Zero(m, dim_);
    out.d_laplacian = Vector::Zero(m);
  }
  const double* th = theta.data();
  auto w_at = [&](int i, int j) { return wo >= 0 ? th[wo + i * dim_ + j] : frozen_w_(i, j); };

  for (int i = 0; i < width_; ++i) {
    double z = bo >= 0 ? th[bo + i] : frozen_b_[i];
    double w2 = 0.0;
    for (int j = 0; j < dim_; ++j) {
      const double wij = w_at(i, j);
      z += wij * x[static_cast<std::size_t>(j)];
      w2 += wij * wij;
    }
    const ActivationJet s = activation_jet(activation_, z);
    const double a = ao >= 0 ? th[ao + i] : frozen_a_[i];

    out.u += a * s.s0;
    for (int j = 0; j < dim_; ++j) out.grad_x[j] += a * s.s1 * w_at(i, j);
    out.laplacian += a * s.s2 * w2;

    if (ao >= 0) {
      const int q = ao + i;
      out.d_u[q] = s.s0;
      for (int j = 0; j < dim_; ++j) out.d_grad_x(q, j) = s.s1 * w_at(i, j);
      out.d_laplacian[q] = s.s2 * w2;
    }
    if (wo >= 0) {
      for (int k = 0; k < dim_; ++k) {
        const int q = wo + i * dim_ + k;
        const double xk = x[static_cast<std::size_t>(k)];
        out.d_u[q] = a * s.s1 * xk;
        for (int j = 0; j < dim_; ++j) {
          out.d_grad_x(q, j) = a * s.s2 * xk * w_at(i, j) + (j == k ? a * s.s1 : 0.0);
        }
        out.d_laplacian[q] = a * s.s3 * xk * w2 + 2.0 * a * s.s2 * w_at(i, k);
      }
    }
    if (bo >= 0) {
      const int q = bo + i;
      out.d_u[q] = a * s.s1;
      for (int j = 0; j < dim_; ++j) out.d_grad_x(q, j) = a * s.s2 * w_at(i, j);
      out.d_laplacian[q] = a * s.s3 * w2;
    }
  }
  return out;
}

std::pair<double, Vector> NetworkModel::eval_with_grad(const ParamVector& theta, std::span<const double> x) const {
  check(theta, x);
  const int ao = a_offset();
  const int wo = w_offset();
  const int bo = b_offset();
  const double* th = theta.data();
  auto w_at = [&](int i, int j) { return wo >= 0 ? th[wo + i * dim_ + j] : frozen_w_(i, j); };
  double u = 0.0;
  Vector g = Vector::Zero(dim_);
  for (int i = 0; i < width_; ++i) {
    double z = bo >= 0 ? th[bo + i] : frozen_b_[i];
    for (int j = 0; j < dim_; ++j) z += w_at(i, j) * x[static_cast<std::size_t>(j)];
    const ActivationJet s = activation_jet(activation_, z);
    const double a = ao >= 0 ? th[ao + i] : frozen_a_[i];
    u += a * s.s0;
    for (int j = 0; j < dim_; ++j) g[j] += a * s.s1 * w_at(i, j);
  }
  return {u, g};
}

// -------------------------------------------------------------------- fem

FemModel::FemModel(std::vector<double> nodes, std::vector<int> frame)
    : nodes_(std::move(nodes)), frame_(std::move(frame)) {
  if (nodes_.size() < 2) throw ConfigError("a finite-element mesh needs at least two nodes");
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (!(nodes_[i] > nodes_[i - 1])) throw ConfigError("mesh nodes must be strictly increasing");
  }
  if (frame_.empty()) {
    frame_.resize(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) frame_[i] = static_cast<int>(i);
  }
  users_.resize(nodes_.size());
  for (std::size_t j = 0; j < frame_.size(); ++j) {
    const int h = frame_[j];
    if (h < 0 || h >= static_cast<int>(nodes_.size())) throw ConfigError("frame references a missing node");
    users_[static_cast<std::size_t>(h)].push_back(static_cast<int>(j));
  }
}

FemModel FemModel::uniform(Interval domain, int num_nodes) {
  if (num_nodes < 2) throw ConfigError("a finite-element mesh needs at least two nodes");
  std::vector<double> nodes(static_cast<std::size_t>(num_nodes));
  const double h = domain.length() / (num_nodes - 1);
  for (int i = 0; i < num_nodes; ++i) nodes[static_cast<std::size_t>(i)] = domain.lo + i * h;
  nodes.back() = domain.hi;
  return FemModel(std::move(nodes));
}

int FemModel::element_of(double x) const {
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  const int e = static_cast<int>(it - nodes_.begin()) - 1;
  return std::clamp(e, 0, static_cast<int>(nodes_.size()) - 2);
}

double FemModel::hat(int node, double x) const {
  const int e = element_of(x);
  if (node != e && node != e + 1) return 0.0;
  const double xl = nodes_[static_cast<std::size_t>(e)];
  const double xr = nodes_[static_cast<std::size_t>(e + 1)];
  const double t = (x - xl) / (xr - xl);
  return node == e ? 1.0 - t : t;
}

double FemModel::hat_derivative(int node, double x) const {
  const int e = element_of(x);
  if (node != e && node != e + 1) return 0.0;
  const double h = nodes_[static_cast<std::size_t>(e + 1)] - nodes_[static_cast<std::size_t>(e)];
  return node == e ? -1.0 / h : 1.0 / h;
}

void FemModel::check(const ParamVector& theta, double x) const {
  if (theta.size() != num_params()) {
    throw DimensionError("theta has length " + std::to_string(theta.size()) + ", model expects " +
                         std::to_string(num_params()));
  }
  if (!domain().contains(x)) throw DimensionError("point lies outside the mesh");
}

std::vector<int> FemModel::active(double x, int& element) const {
  element = element_of(x);
  const auto& l = users_[static_cast<std::size_t>(element)];
  const auto& r = users_[static_cast<std::size_t>(element + 1)];
  std::vector<int> out;
  out.reserve(l.size() + r.size());
  std::merge(l.begin(), l.end(), r.begin(), r.end(), std::back_inserter(out));
  return out;
}

double FemModel::eval(const ParamVector& theta, double x) const {
  return eval_with_slope(theta, x).first;
}

std::pair<double, double> FemModel::eval_with_slope(const ParamVector& theta, double x) const {
  check(theta, x);
  int e = 0;
  const std::vector<int> js = active(x, e);
  const double xl = nodes_[static_cast<std::size_t>(e)];
  const double h = nodes_[static_cast<std::size_t>(e + 1)] - xl;
  const double t = (x - xl) / h;
  double u = 0.0, du = 0.0;
  for (int j : js) {
    const bool left = frame_[static_cast<std::size_t>(j)] == e;
    u += theta[j] * (left ? 1.0 - t : t);
    du += theta[j] * (left ? -1.0 / h : 1.0 / h);
  }
  return {u, du};
}

PointJet FemModel::jet(const ParamVector& theta, double x) const {
  check(theta, x);
  const int m = num_params();
  PointJet out;
  out.grad_x = Vector::Zero(1);
  out.d_u = Vector::Zero(m);
  out.d_grad_x = Matrix::Zero(m, 1);
  out.d_laplacian = Vector::Zero(m);
  int e = 0;
  const std::vector<int> js = active(x, e);
  const double xl = nodes_[static_cast<std::size_t>(e)];
  const double h = nodes_[static_cast<std::size_t>(e + 1)] - xl;
  const double t = (x - xl) / h;
  for (int j : js) {
    const bool left = frame_[static_cast<std::size_t>(j)] == e;
    const double phi = left ? 1.0 - t : t;
    const double dphi = left ? -1.0 / h : 1.0 / h;
    out.d_u[j] = phi;
    out.d_grad_x(j, 0) = dphi;
    out.u += theta[j] * phi;
    out.grad_x[0] += theta[j] * dphi;
  }
  return out;
}

// ---------------------------------------------------------------- dispatch

namespace {

double scalar_point(const FemModel&, std::span<const double> x) {
  if (x.size() != 1) throw DimensionError("finite-element models are one-dimensional");
  return x[0];
}

}  // namespace

int num_params(const Model& model) {
  return std::visit([](const auto& m) { return m.num_params(); }, model);
}

int spatial_dim(const Model& model) {
  if (const auto* net = std::get_if<NetworkModel>(&model)) return net->dim();
  return 1;
}

PointJet point_jet(const Model& model, const ParamVector& theta, std::span<const double> x) {
  if (const auto* net = std::get_if<NetworkModel>(&model)) return net->jet(theta, x);
  const auto& fem = std::get<FemModel>(model);
  return fem.jet(theta, scalar_point(fem, x));
}

double eval_u(const Model& model, const ParamVector& theta, std::span<const double> x) {
  if (const auto* net = std::get_if<NetworkModel>(&model)) return net->eval(theta, x);
  const auto& fem = std::get<FemModel>(model);
  return fem.eval(theta, scalar_point(fem, x));
}

Vector grad_x_u(const Model& model, const ParamVector& theta, std::span<const double> x) {
  return eval_with_grad(model, theta, x).second;
}

std::pair<double, Vector> eval_with_grad(const Model& model, const ParamVector& theta, std::span<const double> x) {
  if (const auto* net = std::get_if<NetworkModel>(&model)) return net->eval_with_grad(theta, x);
  const auto& fem = std::get<FemModel>(model);
  const auto [u, du] = fem.eval_with_slope(theta, scalar_point(fem, x));
  return {u, Vector::Constant(1, du)};
}

double laplacian_u(const Model& model, const ParamVector& theta, std::span<const double> x) {
  return point_jet(model, theta, x).laplacian;
}

Vector grad_theta_u(const Model& model, const ParamVector& theta, std::span<const double> x) {
  return point_jet(model, theta, x).d_u;
}

Matrix grad_theta_grad_x_u(const Model& model, const ParamVector& theta, std::span<const double> x) {
  return point_jet(model, theta, x).d_grad_x;
}

Vector grad_theta_laplacian_u(const Model& model, const ParamVector& theta, std::span<const double> x) {
  return point_jet(model, theta, x).d_laplacian;
}

// -------------------------------------------------------------------- init

namespace {

ParamVector init_node_adapted(const NetworkModel& net, const InitOptions& o, Rng& rng) {
  if (net.dim() != 1) throw ConfigError("node_adapted initialization is one-dimensional");
  if (net.activation().kind != ActivationKind::tanh) {
    throw ConfigError("node_adapted initialization needs the tanh activation");
  }
  std::vector<double> nodes = o.nodes;
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  if (nodes.size() < 2) throw ConfigError("node_adapted initialization needs at least two nodes");

  const int width = net.width();
  const int gaps = static_cast<int>(nodes.size()) - 1;
  std::vector<double> centre;
  std::vector<double> slope;
  // One neuron per gap while neurons last; gaps are picked evenly otherwise.
  const int used = std::min(width, gaps);
  for (int q = 0; q < used; ++q) {
    const int g = used == gaps ? q : static_cast<int>((static_cast<long long>(q) * gaps) / used);
    const double lo = nodes[static_cast<std::size_t>(g)];
    const double hi = nodes[static_cast<std::size_t>(g + 1)];
    centre.push_back(0.5 * (lo + hi));
    slope.push_back(o.sharpness / (hi - lo));
  }
  const double span_lo = nodes.front();
  const double span_hi = nodes.back();
  const int extra = width - used;
  for (int q = 0; q < extra; ++q) {
    const double t = extra == 1 ? 0.5 : static_cast<double>(q) / (extra - 1);
    centre.push_back(span_lo + (span_hi - span_lo) * (0.05 + 0.9 * t));
    slope.push_back(o.sharpness);
  }

  Vector a(width), b(width);
  Matrix w(width, 1);
  for (int i = 0; i < width; ++i) {
    const double sign = i % 2 == 0 ? 1.0 : -1.0;
    w(i, 0) = sign * slope[static_cast<std::size_t>(i)];
    b[i] = -w(i, 0) * centre[static_cast<std::size_t>(i)];
    a[i] = rng.uniform(-o.a_scale, o.a_scale);
  }
  return net.pack(a, w, b);
}

}  // namespace

ParamVector init_params(const Model& model, const InitOptions& o) {
  const int m = num_params(model);
  if (o.scheme == InitScheme::given) {
    if (o.given.size() != m) throw DimensionError("given parameters have the wrong length");
    if (!o.given.allFinite()) throw ConfigError("given parameters must be finite");
    return o.given;
  }
  if (o.delta < 0.0 || o.a_scale < 0.0 || o.w_scale < 0.0) throw ConfigError("init scales must be >= 0");
  Rng rng(o.seed);

  if (const auto* fem = std::get_if<FemModel>(&model)) {
    ParamVector theta(m);
    for (int j = 0; j < m; ++j) {
      theta[j] = o.scheme == InitScheme::normal ? rng.normal(0.0, o.a_scale) : rng.uniform(-o.a_scale, o.a_scale);
    }
    (void)fem;
    return theta;
  }

  const auto& net = std::get<NetworkModel>(model);
  if (o.scheme == InitScheme::node_adapted) return init_node_adapted(net, o, rng);

  const int width = net.width();
  Vector a(width), b(width);
  Matrix w(width, net.dim());
  // Draw every block in a fixed order so masks do not shift the stream.
  for (int i = 0; i < width; ++i) {
    if (o.scheme == InitScheme::normal) {
      a[i] = rng.normal(0.0, o.a_scale);
      for (int j = 0; j < net.dim(); ++j) w(i, j) = rng.normal(0.0, o.w_scale);
      b[i] = rng.normal(0.0, 1.0);
    } else {
      a[i] = rng.uniform(-o.a_scale, o.a_scale);
      for (int j = 0; j < net.dim(); ++j) {
        w(i, j) = o.scheme == InitScheme::normal_slopes ? rng.normal(0.0, o.w_scale)
                                                         : rng.uniform(-o.w_scale, o.w_scale);
      }
      b[i] = rng.uniform(-1.0 - o.delta, 1.0 + o.delta);
    }
  }
  return net.pack(a, w, b);
}

}  // namespace ritzgn
