#pragma once

#include <cstddef>
#include <vector>

#include "dbounds/distributions.hpp"
#include "dbounds/measure.hpp"

namespace dbounds {

/// Sharp bounds on a joint cell P(s, t) given its marginals sigma and tau.
struct CellBounds {
  double lower = 0.0;
  double upper = 0.0;
};

CellBounds fh_bounds(double sigma, double tau);

/// Throws Error(WrongClassCount) unless the problem has two classes, and
/// Error(InvalidArgument) for a malformed pair.
void require_binary_pair(const CombinedProblem& problem, ClassPair pair);
/// Throws Error(ZeroClassPrior) if either class of the pair has zero mass.
void require_positive_priors(const CombinedProblem& problem, ClassPair pair);
/// Throws Error(MissingColumn) when a classification measure meets
/// decision-only data.
void require_outcome_mode(const CombinedProblem& problem, Measure measure);

/// Demographic disparity interval for a binary class. Exact.
DisparityInterval dd_interval_binary(const CombinedProblem& problem, ClassPair pair = {});

/// TPRD/TNRD/PPVD/NPVD interval for a binary class. Exact.
DisparityInterval classification_interval_binary(const CombinedProblem& problem, Measure measure,
                                                 ClassPair pair = {});

struct IdentificationReport {
  bool identified = false;
  std::vector<std::size_t> violating_cells;
  double violating_mass = 0.0;
};

/// True when every cell outside a set of mass < tol has a degenerate class
/// marginal or a degenerate outcome marginal (Yhat for DD, the 2x2 table for
/// classification measures).
IdentificationReport is_point_identified(const CombinedProblem& problem, Measure measure,
                                         double tol = 1e-9);

/// Disparity implied by assuming the outcome is independent of the class
/// given the proxies. Throws Error(ZeroDenominator).
double ci_point_estimate(const CombinedProblem& problem, Measure measure, ClassPair pair = {});

}  // namespace dbounds
