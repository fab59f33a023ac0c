#pragma once

#include <cstddef>
#include <limits>
#include <string_view>
#include <vector>

namespace dbounds::lp {

enum class Sense { Maximize, Minimize };
enum class Relation { LessEqual, Equal, GreaterEqual };
enum class Status { Optimal, Infeasible, Unbounded, NumericalBreakdown };

std::string_view status_name(Status status);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Constraint {
  std::vector<double> coefficients;
  Relation relation = Relation::LessEqual;
  double rhs = 0.0;
};

/// Dense linear program: optimize c'x subject to rows and lower <= x <= upper.
///
/// Lower bounds must be finite; upper bounds may be +inf. Variables default
/// to [0, +inf).
class LpProblem {
 public:
  LpProblem() = default;
  LpProblem(std::size_t num_variables, Sense sense);

  std::size_t num_variables() const { return objective_.size(); }
  std::size_t num_constraints() const { return constraints_.size(); }

  Sense sense() const { return sense_; }
  const std::vector<double>& objective() const { return objective_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }

  void set_objective(std::size_t var, double coefficient) { objective_.at(var) = coefficient; }
  void set_objective(std::vector<double> coefficients);
  void set_bounds(std::size_t var, double lo, double hi);
  void set_rhs(std::size_t row, double rhs) { constraints_.at(row).rhs = rhs; }

  /// Adds a dense row; its width must equal num_variables().
  void add_constraint(std::vector<double> coefficients, Relation relation, double rhs);
  /// Adds a row given as (index, coefficient) pairs.
  void add_sparse_constraint(const std::vector<std::pair<std::size_t, double>>& terms,
                             Relation relation, double rhs);

  /// Throws Error(InvalidArgument) on width mismatches, NaN/inf data or
  /// inverted bounds.
  void validate() const;

 private:
  Sense sense_ = Sense::Maximize;
  std::vector<double> objective_;
  std::vector<Constraint> constraints_;
  std::vector<double> lower_;
  std::vector<double> upper_;
};

struct LpSolution {
  Status status = Status::NumericalBreakdown;
  double value = 0.0;
  std::vector<double> point;
  /// Structural columns basic at the optimum, ascending. Slack and
  /// artificial columns are not listed.
  std::vector<std::size_t> basis;
  std::size_t iterations = 0;
};

struct SolverOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-11;
  /// Consecutive degenerate pivots tolerated under largest-coefficient
  /// pricing before switching to Bland's rule for the rest of the phase.
  std::size_t degenerate_streak = 50;
  std::size_t max_iterations = 1'000'000;
};

/// Two-phase dense simplex. Deterministic for a fixed input.
LpSolution solve(const LpProblem& problem, const SolverOptions& options = {});

/// True iff the phase-one optimum (sum of infeasibilities) is 0 within 1e-9.
bool feasible(const LpProblem& problem, const SolverOptions& options = {});

/// Largest violation of any row or bound at `point`.
double max_violation(const LpProblem& problem, const std::vector<double>& point);

}  // namespace dbounds::lp
