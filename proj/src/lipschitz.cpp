#include "dbounds/lipschitz.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "dbounds/error.hpp"

namespace dbounds {

std::vector<double> metric_weights(const CombinedProblem& problem, const std::vector<double>& weights) {
  if (problem.num_cells() == 0 || !problem.has_numeric_coords()) {
    throw Error(ErrorCode::MetricUnavailable, "Lipschitz constraints need numeric proxy columns");
  }
  const std::size_t dims = problem.cells().front().numeric_coord.size();
  if (!weights.empty()) {
    if (weights.size() != dims) {
      throw Error(ErrorCode::InvalidArgument, "expected " + std::to_string(dims) + " metric weights");
    }
    for (double w : weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw Error(ErrorCode::InvalidArgument, "metric weights must be >= 0");
    }
    return weights;
  }
  std::vector<double> out(dims, 1.0);
  for (std::size_t k = 0; k < dims; ++k) {
    double lo = problem.cells().front().numeric_coord[k], hi = lo;
    for (const auto& c : problem.cells()) {
      lo = std::min(lo, c.numeric_coord[k]);
      hi = std::max(hi, c.numeric_coord[k]);
    }
    if (hi > lo) out[k] = 1.0 / (hi - lo);
  }
  return out;
}

std::vector<CellPair> lipschitz_pairs(const CombinedProblem& problem, const std::vector<double>& weights) {
  const std::vector<double> w = metric_weights(problem, weights);
  const auto& cells = problem.cells();
  const auto& kinds = problem.key_kinds();

  std::map<std::vector<std::string>, std::vector<std::size_t>> groups;
  for (std::size_t z = 0; z < cells.size(); ++z) {
    std::vector<std::string> categorical;
    for (std::size_t k = 0; k < cells[z].key.size(); ++k) {
      if (k < kinds.size() && kinds[k] == ProxyKind::Categorical) categorical.push_back(cells[z].key[k]);
    }
    groups[categorical].push_back(z);
  }
  auto distance = [&](std::size_t i, std::size_t j) {
    double d = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      d += w[k] * std::abs(cells[i].numeric_coord[k] - cells[j].numeric_coord[k]);
    }
    return d;
  };

  std::vector<CellPair> pairs;
  if (w.size() == 1) {
    for (auto& [key, members] : groups) {
      std::sort(members.begin(), members.end(), [&](std::size_t i, std::size_t j) {
        return cells[i].numeric_coord[0] < cells[j].numeric_coord[0];
      });
      for (std::size_t m = 1; m < members.size(); ++m) {
        pairs.push_back({members[m - 1], members[m], distance(members[m - 1], members[m])});
      }
    }
    return pairs;
  }
  std::size_t total = 0;
  for (const auto& [key, members] : groups) total += members.size() * (members.size() - 1) / 2;
  if (total > kMaxLipschitzPairs) {
    throw Error(ErrorCode::TooManyPairs, std::to_string(total) +
                                             " Lipschitz pairs exceed the cap; use coarser bins");
  }
  pairs.reserve(total);
  for (const auto& [key, members] : groups) {
    for (std::size_t m = 0; m < members.size(); ++m) {
      for (std::size_t n = m + 1; n < members.size(); ++n) {
        pairs.push_back({members[m], members[n], distance(members[m], members[n])});
      }
    }
  }
  return pairs;
}

}  // namespace dbounds
