#pragma once

#include "ritzgn/types.hpp"

#include <cstdint>
#include <vector>

namespace ritzgn {

/// Interior and boundary integration points over a 1D domain. Interior points
/// come first in every assembled system; boundary points follow in order.
struct QuadratureRule {
  Interval domain;
  std::vector<double> interior_nodes;
  std::vector<double> interior_weights;
  std::vector<double> boundary_nodes;
  std::vector<double> boundary_normals;  // outward, ±1 in 1D
  std::vector<double> boundary_weights;

  [[nodiscard]] std::size_t interior_size() const { return interior_nodes.size(); }
  [[nodiscard]] std::size_t boundary_size() const { return boundary_nodes.size(); }
  [[nodiscard]] std::size_t size() const { return interior_size() + boundary_size(); }
  [[nodiscard]] bool has_boundary() const { return !boundary_nodes.empty(); }

  /// Throws DimensionError when lengths disagree, ConfigError when a node is
  /// outside the domain or a weight is not positive.
  void validate() const;
};

/// Golub-Welsch: nodes/weights from the symmetric Jacobi matrix of the
/// Legendre recurrence. Exact for polynomials of degree <= 2·order - 1.
[[nodiscard]] QuadratureRule gauss_legendre(int order, Interval interval);

/// Gauss-Legendre of the given order on every cell between consecutive
/// breakpoints. Breakpoints must be strictly increasing.
[[nodiscard]] QuadratureRule composite_gauss_legendre(int order, const std::vector<double>& breakpoints);

/// Both endpoints with counting-measure weights 1 and normals -1, +1.
[[nodiscard]] QuadratureRule boundary_rule_1d(Interval interval);

/// Returns `interior` with the boundary part of boundary_rule_1d(domain) attached.
[[nodiscard]] QuadratureRule with_boundary(QuadratureRule interior);

/// i.i.d. uniform nodes with equal weights length / count.
[[nodiscard]] QuadratureRule monte_carlo_rule(int count, Interval interval, std::uint64_t seed);

/// uniform: Ñ of N without replacement. stratified: the N interior indices
/// are cut into Ñ contiguous blocks and one index is drawn from each block.
/// Boundary nodes are always drawn uniformly.
enum class SamplingKind { uniform, stratified };

/// Indices drawn from a rule's interior and boundary parts, with the factor
/// each selected weight is multiplied by to keep batch sums unbiased.
struct SampleBatch {
  std::vector<std::size_t> interior_indices;
  std::vector<std::size_t> boundary_indices;
  std::vector<double> interior_scale;
  std::vector<double> boundary_scale;
  std::uint64_t seed = 0;
};

/// Interior and boundary drawn independently; scales are N/Ñ and n/ñ for
/// uniform sampling and the block size for stratified sampling.
[[nodiscard]] SampleBatch subsample(const QuadratureRule& rule, std::size_t interior_count,
                                    std::size_t boundary_count, std::uint64_t seed,
                                    SamplingKind kind = SamplingKind::uniform);

/// The sub-rule selected by `batch` with rescaled weights.
[[nodiscard]] QuadratureRule restrict_rule(const QuadratureRule& rule, const SampleBatch& batch);

/// A copy of `rule` with every weight multiplied by `factor`.
[[nodiscard]] QuadratureRule scaled(QuadratureRule rule, double factor);

}  // namespace ritzgn
