#include "ritzgn/quadrature.hpp"

#include "ritzgn/random.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>
#include <utility>

namespace ritzgn {

void QuadratureRule::validate() const {
  if (interior_weights.size() != interior_nodes.size()) {
    throw DimensionError("interior nodes and weights differ in length");
  }
  if (boundary_weights.size() != boundary_nodes.size() || boundary_normals.size() != boundary_nodes.size()) {
    throw DimensionError("boundary nodes, normals and weights differ in length");
  }
  for (std::size_t i = 0; i < interior_nodes.size(); ++i) {
    if (!(interior_nodes[i] > domain.lo && interior_nodes[i] < domain.hi)) {
      throw ConfigError("interior node " + std::to_string(interior_nodes[i]) + " is not inside the domain");
    }
    if (!(interior_weights[i] > 0.0)) throw ConfigError("interior weights must be positive");
  }
  for (std::size_t j = 0; j < boundary_nodes.size(); ++j) {
    if (boundary_nodes[j] != domain.lo && boundary_nodes[j] != domain.hi) {
      throw ConfigError("boundary node is not an endpoint of the domain");
    }
    if (std::abs(std::abs(boundary_normals[j]) - 1.0) > 1e-14) throw ConfigError("normals must be unit");
    if (!(boundary_weights[j] > 0.0)) throw ConfigError("boundary weights must be positive");
  }
}

QuadratureRule gauss_legendre(int order, Interval interval) {
  if (order < 1) throw ConfigError("Gauss-Legendre order must be >= 1");
  if (!(interval.lo < interval.hi)) throw ConfigError("degenerate integration interval");

  // Jacobi matrix of the monic Legendre recurrence: zero diagonal,
  // off-diagonal k / sqrt(4k² - 1).
  Vector diag = Vector::Zero(order);
  Vector sub(std::max(order - 1, 0));
  for (int k = 1; k < order; ++k) {
    const double kd = k;
    sub[k - 1] = kd / std::sqrt(4.0 * kd * kd - 1.0);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig;
  eig.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw Error("Gauss-Legendre eigen-decomposition failed");

  // P_order(x) and P'_order(x) from the three-term recurrence.
  auto legendre = [order](double x) {
    double p0 = 1.0, p1 = x;
    for (int n = 2; n <= order; ++n) {
      const double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
      p0 = p1;
      p1 = p2;
    }
    if (order == 1) p0 = 1.0;
    return std::pair{p1, order * (x * p1 - p0) / (x * x - 1.0)};
  };

  std::vector<double> x(static_cast<std::size_t>(order)), w(static_cast<std::size_t>(order));
  for (int i = 0; i < order; ++i) {
    // Symmetrize about 0 to remove eigen-solver asymmetry in the last bits.
    double t = 0.5 * (eig.eigenvalues()[i] - eig.eigenvalues()[order - 1 - i]);
    auto [p, dp] = legendre(t);
    if (dp != 0.0) {
      t -= p / dp;  // one Newton polish
      dp = legendre(t).second;
    }
    x[static_cast<std::size_t>(i)] = t;
    w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - t * t) * dp * dp);
  }

  const double half = 0.5 * interval.length();
  const double mid = 0.5 * (interval.lo + interval.hi);
  QuadratureRule rule;
  rule.domain = interval;
  rule.interior_nodes.resize(static_cast<std::size_t>(order));
  rule.interior_weights.resize(static_cast<std::size_t>(order));
  for (int i = 0; i < order; ++i) {
    const auto a = static_cast<std::size_t>(i), b = static_cast<std::size_t>(order - 1 - i);
    rule.interior_nodes[a] = mid + half * 0.5 * (x[a] - x[b]);
    rule.interior_weights[a] = half * 0.5 * (w[a] + w[b]);
  }
  return rule;
}

QuadratureRule composite_gauss_legendre(int order, const std::vector<double>& breakpoints) {
  if (breakpoints.size() < 2) throw ConfigError("composite rule needs at least one cell");
  const QuadratureRule ref = gauss_legendre(order, {-1.0, 1.0});
  QuadratureRule rule;
  rule.domain = {breakpoints.front(), breakpoints.back()};
  for (std::size_t c = 0; c + 1 < breakpoints.size(); ++c) {
    const double lo = breakpoints[c];
    const double hi = breakpoints[c + 1];
    if (!(hi > lo)) throw ConfigError("breakpoints must be strictly increasing");
    for (std::size_t i = 0; i < ref.interior_size(); ++i) {
      rule.interior_nodes.push_back(0.5 * (lo + hi) + 0.5 * (hi - lo) * ref.interior_nodes[i]);
      rule.interior_weights.push_back(0.5 * (hi - lo) * ref.interior_weights[i]);
    }
  }
  return rule;
}

QuadratureRule boundary_rule_1d(Interval interval) {
  if (!(interval.lo < interval.hi)) throw ConfigError("degenerate integration interval");
  QuadratureRule rule;
  rule.domain = interval;
  rule.boundary_nodes = {interval.lo, interval.hi};
  rule.boundary_normals = {-1.0, 1.0};
  rule.boundary_weights = {1.0, 1.0};
  return rule;
}

QuadratureRule with_boundary(QuadratureRule interior) {
  const QuadratureRule b = boundary_rule_1d(interior.domain);
  interior.boundary_nodes = b.boundary_nodes;
  interior.boundary_normals = b.boundary_normals;
  interior.boundary_weights = b.boundary_weights;
  return interior;
}

QuadratureRule monte_carlo_rule(int count, Interval interval, std::uint64_t seed) {
  if (count < 1) throw ConfigError("Monte Carlo rule needs at least one node");
  if (!(interval.lo < interval.hi)) throw ConfigError("degenerate integration interval");
  Rng rng(seed);
  QuadratureRule rule;
  rule.domain = interval;
  rule.interior_nodes.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    double x = interval.lo;
    while (x <= interval.lo) x = rng.uniform(interval.lo, interval.hi);
    rule.interior_nodes.push_back(x);
  }
  rule.interior_weights.assign(static_cast<std::size_t>(count), interval.length() / count);
  return rule;
}

SampleBatch subsample(const QuadratureRule& rule, std::size_t interior_count, std::size_t boundary_count,
                      std::uint64_t seed, SamplingKind kind) {
  if (interior_count > rule.interior_size() || boundary_count > rule.boundary_size()) {
    throw ConfigError("subsample request exceeds the rule (" + std::to_string(interior_count) + "/" +
                      std::to_string(rule.interior_size()) + " interior, " + std::to_string(boundary_count) +
                      "/" + std::to_string(rule.boundary_size()) + " boundary)");
  }
  Rng rng(seed);
  SampleBatch batch;
  batch.seed = seed;
  const std::size_t n_in = rule.interior_size();
  if (kind == SamplingKind::stratified && interior_count > 0) {
    for (std::size_t s = 0; s < interior_count; ++s) {
      const std::size_t lo = s * n_in / interior_count;
      const std::size_t hi = (s + 1) * n_in / interior_count;
      batch.interior_indices.push_back(lo + static_cast<std::size_t>(rng.below(hi - lo)));
      batch.interior_scale.push_back(static_cast<double>(hi - lo));
    }
  } else {
    batch.interior_indices = rng.sample_without_replacement(n_in, interior_count);
    batch.interior_scale.assign(interior_count, interior_count ? static_cast<double>(n_in) / interior_count : 0.0);
  }
  batch.boundary_indices = rng.sample_without_replacement(rule.boundary_size(), boundary_count);
  batch.boundary_scale.assign(boundary_count,
                              boundary_count ? static_cast<double>(rule.boundary_size()) / boundary_count : 0.0);
  return batch;
}

QuadratureRule restrict_rule(const QuadratureRule& rule, const SampleBatch& batch) {
  if (batch.interior_scale.size() != batch.interior_indices.size() ||
      batch.boundary_scale.size() != batch.boundary_indices.size()) {
    throw DimensionError("batch scales do not match its indices");
  }
  QuadratureRule sub;
  sub.domain = rule.domain;
  for (std::size_t k = 0; k < batch.interior_indices.size(); ++k) {
    const std::size_t i = batch.interior_indices[k];
    if (i >= rule.interior_size()) throw DimensionError("batch index outside the rule");
    sub.interior_nodes.push_back(rule.interior_nodes[i]);
    sub.interior_weights.push_back(batch.interior_scale[k] * rule.interior_weights[i]);
  }
  for (std::size_t k = 0; k < batch.boundary_indices.size(); ++k) {
    const std::size_t j = batch.boundary_indices[k];
    if (j >= rule.boundary_size()) throw DimensionError("batch index outside the rule");
    sub.boundary_nodes.push_back(rule.boundary_nodes[j]);
    sub.boundary_normals.push_back(rule.boundary_normals[j]);
    sub.boundary_weights.push_back(batch.boundary_scale[k] * rule.boundary_weights[j]);
  }
  return sub;
}

QuadratureRule scaled(QuadratureRule rule, double factor) {
  for (double& w : rule.interior_weights) w *= factor;
  for (double& w : rule.boundary_weights) w *= factor;
  return rule;
}

}  // namespace ritzgn
