#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dbounds/distributions.hpp"
#include "dbounds/geometry.hpp"
#include "dbounds/measure.hpp"

namespace dbounds {

/// Brute-force search over couplings of the class marginal with the outcome
/// marginal, cell by cell. Used only to cross-check the solvers.
struct OracleSpec {
  enum class Sampling { Exhaustive, RandomVertexMix };

  /// Points per free parameter and cell. Grids use cell midpoints, so the
  /// box endpoints themselves are never visited.
  std::size_t per_cell_grid = 51;
  /// Cap on the size of the enumerated product (per-cell candidate counts
  /// multiplied), checked before enumeration.
  double max_total_points = 1e7;
  Sampling sampling = Sampling::Exhaustive;
  /// RandomVertexMix: number of joint samples and the seed.
  std::size_t n_samples = 100000;
  std::uint64_t seed = 0;
};

/// DD interval for a binary class; one free parameter P(a, Yhat=1 | z) per cell.
DisparityInterval oracle_dd(const CombinedProblem& problem, const OracleSpec& spec = {});

/// Classification interval for a binary class; three free parameters per
/// cell with the fourth forced and rejected when outside its bounds.
/// Throws Error(NoFeasiblePoint) when no visited point defines the rates.
DisparityInterval oracle_class(const CombinedProblem& problem, Measure measure, const OracleSpec& spec = {});

/// Cloud of (DD(a, b1), DD(a, b2)) for three classes; two free parameters
/// per cell.
std::vector<Point2> oracle_hull(const CombinedProblem& problem, Measure measure, const OracleSpec& spec = {});

}  // namespace dbounds
