#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "dbounds/distributions.hpp"
#include "dbounds/lipschitz.hpp"
#include "dbounds/measure.hpp"

namespace dbounds {

/// Box for r_alpha = P(A=alpha, Y=y*) from integrated FH bounds.
struct RBox {
  double lower = 0.0;
  double upper = 0.0;
};

/// Outer grid over the denominators r_alpha. Unset fields take defaults
/// that depend on the number of gridded classes: 101 points and 2 zoom
/// rounds for one dimension, 51 points and 1 round otherwise. Each zoom
/// round regrids the window of one old step around the incumbent.
struct GridSpec {
  std::optional<std::size_t> resolution;
  std::optional<std::size_t> refine_rounds;
  /// Overrides the FH boxes when nonempty (one per class).
  std::vector<RBox> r_bounds;

  std::size_t resolution_for(std::size_t dims) const { return resolution.value_or(dims <= 1 ? 101 : 51); }
  std::size_t rounds_for(std::size_t dims) const { return refine_rounds.value_or(dims <= 1 ? 2 : 1); }
};

/// Per-class [L, U] with L = sum_z P(z) max(0, P(alpha|z) + P(Y=y*|z) - 1)
/// and U = sum_z P(z) min(P(alpha|z), P(Y=y*|z)). Role-swapped measures use
/// the swapped problem.
std::vector<RBox> r_bounds(const CombinedProblem& problem, Measure measure);

/// Optimal point of the fixed-denominator program. `w` holds the weights
/// w_alpha(yhat, y, z) = P(A=alpha | yhat, y, z) at
/// [(z * 4 + 2 * yhat + y) * K + alpha]; coordinates with P(yhat, y | z) = 0
/// are 0. The transformed variables are t_alpha = 1 / r_alpha and
/// u = t * w. For role-swapped measures all indices refer to the swapped
/// problem.
struct FractionalWitness {
  std::size_t num_classes = 0;
  std::vector<double> r;
  std::vector<double> w;

  double t(std::size_t alpha) const { return 1.0 / r[alpha]; }
  double weight(std::size_t z, int yhat, int y, std::size_t alpha) const {
    return w[(z * 4 + static_cast<std::size_t>(2 * yhat + y)) * num_classes + alpha];
  }
  double u(std::size_t z, int yhat, int y, std::size_t alpha) const { return t(alpha) * weight(z, yhat, y, alpha); }
};

struct ClassSupport {
  double value = 0.0;
  FractionalWitness witness;
  /// Largest |value change| to a feasible neighbour of the final incumbent.
  double gap_hint = 0.0;
  std::size_t evaluated = 0;   // LPs solved
  std::size_t infeasible = 0;  // LPs without a feasible point
  std::size_t excluded = 0;    // grid points outside the boxes or with r below 1e-9
  std::size_t pruned = 0;      // skipped because a bound ruled them out
};

/// max over the grid of sum_alpha coeffs[alpha] * mu(alpha), where mu(alpha)
/// is the classification rate of `measure` for class alpha.
ClassSupport class_objective_max(const CombinedProblem& problem, Measure measure, const std::vector<double>& coeffs,
                                 const GridSpec& grid = {}, const std::optional<LipschitzSpec>& lip = std::nullopt,
                                 int threads = 1);

/// Support function at rho over the non-reference classes 1..K-1.
ClassSupport class_support(const CombinedProblem& problem, Measure measure, const std::vector<double>& rho,
                           const GridSpec& grid = {}, const std::optional<LipschitzSpec>& lip = std::nullopt,
                           int threads = 1);

DisparityInterval class_interval(const CombinedProblem& problem, Measure measure, ClassPair pair,
                                 const GridSpec& grid = {}, const std::optional<LipschitzSpec>& lip = std::nullopt,
                                 int threads = 1);

/// Largest violation of the witness invariants: simplex, LTP and box rows of
/// the weights, sum_z P(z) sum_yhat P(yhat, y*|z) w = r_alpha, and
/// sum_alpha r_alpha = P(Y=y*). `problem` must already be role-swapped.
double witness_violation(const CombinedProblem& problem, Measure measure, const FractionalWitness& witness);

}  // namespace dbounds
