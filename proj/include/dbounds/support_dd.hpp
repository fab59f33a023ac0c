#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "dbounds/distributions.hpp"
#include "dbounds/lipschitz.hpp"
#include "dbounds/measure.hpp"

namespace dbounds {

/// Conditional class weights w_alpha(yhat, z) = P(A=alpha | Yhat=yhat, Z=z).
struct WeightField {
  std::size_t num_classes = 0;
  std::vector<double> values;  // [(z * 2 + yhat) * num_classes + alpha]

  double at(std::size_t z, int yhat, std::size_t alpha) const {
    return values[(z * 2 + static_cast<std::size_t>(yhat)) * num_classes + alpha];
  }
};

struct DdSupport {
  double value = 0.0;
  WeightField witness;
};

/// max over W_LTP (and W_Lip when given) of sum_alpha coeffs[alpha] * mu(alpha),
/// where mu(alpha) = P(Yhat=1 | A=alpha). `lip` must be in Fixed mode.
/// Throws Error(ZeroClassPrior) and, with `lip`, Error(InfeasibleConstraints).
DdSupport dd_objective_max(const CombinedProblem& problem, const std::vector<double>& coeffs,
                           const std::optional<LipschitzSpec>& lip = std::nullopt);

/// Support function at direction rho over the non-reference classes
/// 1..K-1: sum_b rho_b * (mu(0) - mu(b)). Throws Error(InvalidArgument) for
/// rho = 0 or the wrong length. Minimal mode is resolved first.
DdSupport dd_support(const CombinedProblem& problem, const std::vector<double>& rho,
                     const std::optional<LipschitzSpec>& lip = std::nullopt);

DisparityInterval dd_interval_lp(const CombinedProblem& problem, ClassPair pair,
                                 const std::optional<LipschitzSpec>& lip = std::nullopt);

/// Smallest L with W_LTP and W_Lip(L) intersecting, by bisection on
/// phase-one feasibility. Returns the feasible end of the final bracket.
double minimal_lipschitz(const CombinedProblem& problem, const std::vector<double>& weights = {});

/// Replaces Minimal mode by the fixed constant it resolves to.
std::optional<LipschitzSpec> resolve_lipschitz(const CombinedProblem& problem,
                                               const std::optional<LipschitzSpec>& lip);

/// Largest violation of the LTP, simplex, box and (optional) Lipschitz rows.
double weight_field_violation(const CombinedProblem& problem, const WeightField& w,
                              const std::optional<LipschitzSpec>& lip = std::nullopt);

}  // namespace dbounds
