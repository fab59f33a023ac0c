#pragma once

#include <cstddef>
#include <vector>

#include "dbounds/distributions.hpp"

namespace dbounds {

/// Smoothness constraint |w(z) - w(z')| <= L * d(z, z') on conditional class
/// weights, with d(z, z') = sum_k weights[k] * |coord_k(z) - coord_k(z')|.
struct LipschitzSpec {
  enum class Mode { Fixed, Minimal };
  Mode mode = Mode::Fixed;
  double L = 1.0;
  /// Per numeric dimension; empty selects 1 / (range of that dimension).
  std::vector<double> weights;
};

/// A constrained cell pair and its unscaled metric distance.
struct CellPair {
  std::size_t i = 0;
  std::size_t j = 0;
  double distance = 0.0;
};

inline constexpr std::size_t kMaxLipschitzPairs = 2'000'000;

/// Metric weights actually used for `spec` on `problem`.
std::vector<double> metric_weights(const CombinedProblem& problem, const std::vector<double>& weights);

/// Pairs to constrain. Cells are only compared when their categorical key
/// components agree. One numeric dimension yields the chain of neighbours
/// in coordinate order (sufficient by the triangle inequality); more yields
/// every pair. Throws Error(MetricUnavailable) without numeric proxies and
/// Error(TooManyPairs) above kMaxLipschitzPairs.
std::vector<CellPair> lipschitz_pairs(const CombinedProblem& problem, const std::vector<double>& weights);

}  // namespace dbounds
