#include "dbounds/lp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dbounds/error.hpp"

namespace dbounds::lp {

std::string_view status_name(Status status) {
  switch (status) {
    case Status::Optimal: return "Optimal";
    case Status::Infeasible: return "Infeasible";
    case Status::Unbounded: return "Unbounded";
    case Status::NumericalBreakdown: return "NumericalBreakdown";
  }
  return "Unknown";
}

LpProblem::LpProblem(std::size_t num_variables, Sense sense)
    : sense_(sense),
      objective_(num_variables, 0.0),
      lower_(num_variables, 0.0),
      upper_(num_variables, kInfinity) {}

void LpProblem::set_objective(std::vector<double> coefficients) {
  if (coefficients.size() != objective_.size()) {
    throw Error(ErrorCode::InvalidArgument, "objective width mismatch");
  }
  objective_ = std::move(coefficients);
}

void LpProblem::set_bounds(std::size_t var, double lo, double hi) {
  lower_.at(var) = lo;
  upper_.at(var) = hi;
}

void LpProblem::add_constraint(std::vector<double> coefficients, Relation relation, double rhs) {
  if (coefficients.size() != objective_.size()) {
    throw Error(ErrorCode::InvalidArgument, "constraint width mismatch");
  }
  constraints_.push_back(Constraint{std::move(coefficients), relation, rhs});
}

void LpProblem::add_sparse_constraint(const std::vector<std::pair<std::size_t, double>>& terms,
                                      Relation relation, double rhs) {
  std::vector<double> row(objective_.size(), 0.0);
  for (const auto& [index, value] : terms) row.at(index) += value;
  constraints_.push_back(Constraint{std::move(row), relation, rhs});
}

void LpProblem::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(objective_.begin(), objective_.end(), finite)) {
    throw Error(ErrorCode::InvalidArgument, "non-finite objective coefficient");
  }
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    const auto& row = constraints_[i];
    if (row.coefficients.size() != objective_.size()) {
      throw Error(ErrorCode::InvalidArgument, "constraint " + std::to_string(i) + " width mismatch");
    }
    if (!std::all_of(row.coefficients.begin(), row.coefficients.end(), finite) || !finite(row.rhs)) {
      throw Error(ErrorCode::InvalidArgument, "constraint " + std::to_string(i) + " has non-finite data");
    }
  }
  for (std::size_t j = 0; j < lower_.size(); ++j) {
    if (!finite(lower_[j]) || std::isnan(upper_[j]) || upper_[j] < lower_[j]) {
      throw Error(ErrorCode::InvalidArgument, "invalid bounds on variable " + std::to_string(j));
    }
  }
}

double max_violation(const LpProblem& problem, const std::vector<double>& point) {
  double worst = 0.0;
  for (std::size_t j = 0; j < point.size(); ++j) {
    worst = std::max(worst, problem.lower()[j] - point[j]);
    if (std::isfinite(problem.upper()[j])) worst = std::max(worst, point[j] - problem.upper()[j]);
  }
  for (const auto& row : problem.constraints()) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < point.size(); ++j) lhs += row.coefficients[j] * point[j];
    switch (row.relation) {
      case Relation::LessEqual: worst = std::max(worst, lhs - row.rhs); break;
      case Relation::GreaterEqual: worst = std::max(worst, row.rhs - lhs); break;
      case Relation::Equal: worst = std::max(worst, std::abs(lhs - row.rhs)); break;
    }
  }
  return worst;
}

namespace {

// Dense simplex tableau over [structural | slack | artificial | rhs].
class Tableau {
 public:
  Tableau(const LpProblem& problem, const SolverOptions& options)
      : options_(options), n_(problem.num_variables()) {
    struct Row {
      std::vector<double> coefficients;
      Relation relation;
      double rhs;
    };
    std::vector<Row> rows;
    rows.reserve(problem.num_constraints() + n_);
    const auto& lo = problem.lower();
    for (const auto& c : problem.constraints()) {
      double rhs = c.rhs;
      for (std::size_t j = 0; j < n_; ++j) rhs -= c.coefficients[j] * lo[j];
      rows.push_back(Row{c.coefficients, c.relation, rhs});
    }
    for (std::size_t j = 0; j < n_; ++j) {
      if (std::isfinite(problem.upper()[j])) {
        std::vector<double> unit(n_, 0.0);
        unit[j] = 1.0;
        rows.push_back(Row{std::move(unit), Relation::LessEqual, problem.upper()[j] - lo[j]});
      }
    }
    // Normalize to rhs >= 0; a >= row with zero rhs becomes a <= row so its
    // slack can start basic.
    for (auto& r : rows) {
      const bool flip = r.rhs < 0.0 || (r.rhs == 0.0 && r.relation == Relation::GreaterEqual);
      if (flip) {
        for (auto& v : r.coefficients) v = -v;
        r.rhs = -r.rhs;
        if (r.relation == Relation::LessEqual) r.relation = Relation::GreaterEqual;
        else if (r.relation == Relation::GreaterEqual) r.relation = Relation::LessEqual;
      }
    }
    m_ = rows.size();
    std::size_t slacks = 0, artificials = 0;
    for (const auto& r : rows) {
      if (r.relation != Relation::Equal) ++slacks;
      if (r.relation != Relation::LessEqual) ++artificials;
    }
    first_slack_ = n_;
    first_artificial_ = n_ + slacks;
    width_ = first_artificial_ + artificials;
    stride_ = width_ + 1;
    data_.assign(m_ * stride_, 0.0);
    basis_.assign(m_, 0);
    std::size_t next_slack = first_slack_, next_art = first_artificial_;
    for (std::size_t i = 0; i < m_; ++i) {
      double* row = row_ptr(i);
      std::copy(rows[i].coefficients.begin(), rows[i].coefficients.end(), row);
      row[width_] = rows[i].rhs;
      switch (rows[i].relation) {
        case Relation::LessEqual:
          row[next_slack] = 1.0;
          basis_[i] = next_slack++;
          break;
        case Relation::GreaterEqual:
          row[next_slack++] = -1.0;
          row[next_art] = 1.0;
          basis_[i] = next_art++;
          break;
        case Relation::Equal:
          row[next_art] = 1.0;
          basis_[i] = next_art++;
          break;
      }
    }
    costs_.assign(width_ + 1, 0.0);
  }

  bool has_artificials() const { return first_artificial_ < width_; }

  // Phase one: maximize -(sum of artificials). On return *infeasibility holds
  // the remaining sum of artificials.
  Status phase_one(double* infeasibility) {
    std::fill(costs_.begin(), costs_.end(), 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (!is_artificial(basis_[i])) continue;
      const double* row = row_ptr(i);
      for (std::size_t j = 0; j < width_; ++j) {
        if (!is_artificial(j)) costs_[j] += row[j];
      }
      costs_[width_] += row[width_];
    }
    const Status status = iterate(/*allow_artificial=*/false);
    *infeasibility = costs_[width_];
    return status;
  }

  // Pivots remaining (zero-level) artificials out of the basis where a
  // structural or slack column can replace them.
  void expel_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (!is_artificial(basis_[i])) continue;
      const double* row = row_ptr(i);
      std::size_t best = width_;
      double best_abs = 1e-9;
      for (std::size_t j = 0; j < first_artificial_; ++j) {
        if (std::abs(row[j]) > best_abs) {
          best_abs = std::abs(row[j]);
          best = j;
        }
      }
      if (best < width_) pivot(i, best);
    }
  }

  Status phase_two(const std::vector<double>& structural_costs) {
    std::fill(costs_.begin(), costs_.end(), 0.0);
    for (std::size_t j = 0; j < n_; ++j) costs_[j] = structural_costs[j];
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t b = basis_[i];
      const double cb = b < n_ ? structural_costs[b] : 0.0;
      if (cb == 0.0) continue;
      const double* row = row_ptr(i);
      for (std::size_t j = 0; j <= width_; ++j) costs_[j] -= cb * row[j];
    }
    return iterate(/*allow_artificial=*/false);
  }

  std::vector<double> structural_values() const {
    std::vector<double> x(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) x[basis_[i]] = std::max(0.0, data_[i * stride_ + width_]);
    }
    return x;
  }

  std::vector<std::size_t> structural_basis() const {
    std::vector<std::size_t> out;
    for (auto b : basis_) {
      if (b < n_) out.push_back(b);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::size_t iterations() const { return iterations_; }

 private:
  bool is_artificial(std::size_t j) const { return j >= first_artificial_ && j < width_; }
  double* row_ptr(std::size_t i) { return data_.data() + i * stride_; }
  const double* row_ptr(std::size_t i) const { return data_.data() + i * stride_; }

  Status iterate(bool allow_artificial) {
    bool bland = false;
    std::size_t streak = 0;
    const std::size_t limit = allow_artificial ? width_ : first_artificial_;
    for (;;) {
      if (iterations_ >= options_.max_iterations) return Status::NumericalBreakdown;
      // Pricing: largest reduced cost (lowest index on ties) or Bland.
      std::size_t entering = width_;
      double best = options_.optimality_tol;
      for (std::size_t j = 0; j < limit; ++j) {
        const double d = costs_[j];
        if (d > best) {
          entering = j;
          if (bland) break;
          best = d;
        }
      }
      if (entering == width_) return Status::Optimal;

      // Ratio test.
      std::size_t leaving = m_;
      double theta = kInfinity;
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = data_[i * stride_ + entering];
        if (a <= options_.pivot_tol) continue;
        const double ratio = std::max(0.0, data_[i * stride_ + width_]) / a;
        if (leaving == m_ || ratio < theta - 1e-12 * (1.0 + theta)) {
          theta = ratio;
          leaving = i;
        } else if (ratio <= theta + 1e-12 * (1.0 + theta)) {
          const double current = data_[leaving * stride_ + entering];
          const bool better = bland ? basis_[i] < basis_[leaving]
                                    : (a > current || (a == current && basis_[i] < basis_[leaving]));
          if (better) {
            leaving = i;
            theta = std::min(theta, ratio);
          }
        }
      }
      if (leaving == m_) return Status::Unbounded;

      if (theta <= options_.feasibility_tol) {
        if (++streak >= options_.degenerate_streak) bland = true;
      } else {
        streak = 0;
      }
      pivot(leaving, entering);
      ++iterations_;
      if (!std::isfinite(costs_[width_])) return Status::NumericalBreakdown;
    }
  }

  void pivot(std::size_t r, std::size_t s) {
    double* prow = row_ptr(r);
    const double inv = 1.0 / prow[s];
    nonzero_.clear();
    for (std::size_t j = 0; j <= width_; ++j) {
      if (prow[j] != 0.0) {
        prow[j] *= inv;
        nonzero_.push_back(j);
      }
    }
    prow[s] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = row_ptr(i);
      const double f = row[s];
      if (f == 0.0) continue;
      for (auto j : nonzero_) row[j] -= f * prow[j];
      row[s] = 0.0;
      if (std::abs(row[width_]) < 1e-13) row[width_] = 0.0;
    }
    const double f = costs_[s];
    if (f != 0.0) {
      for (auto j : nonzero_) costs_[j] -= f * prow[j];
      costs_[s] = 0.0;
    }
    basis_[r] = s;
  }

  SolverOptions options_;
  std::size_t n_;
  std::size_t m_ = 0;
  std::size_t first_slack_ = 0;
  std::size_t first_artificial_ = 0;
  std::size_t width_ = 0;
  std::size_t stride_ = 0;
  std::vector<double> data_;
  std::vector<double> costs_;  // reduced costs; costs_[width_] = -objective
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> nonzero_;
  std::size_t iterations_ = 0;
};

double phase_one_tolerance(const LpProblem& problem, const SolverOptions& options) {
  double scale = 1.0;
  for (const auto& c : problem.constraints()) scale = std::max(scale, std::abs(c.rhs));
  return options.feasibility_tol * scale;
}

}  // namespace

LpSolution solve(const LpProblem& problem, const SolverOptions& options) {
  problem.validate();
  LpSolution out;
  Tableau tableau(problem, options);
  if (tableau.has_artificials()) {
    double infeasibility = 0.0;
    const Status s1 = tableau.phase_one(&infeasibility);
    out.iterations = tableau.iterations();
    if (s1 != Status::Optimal) {
      out.status = Status::NumericalBreakdown;
      return out;
    }
    if (infeasibility > phase_one_tolerance(problem, options)) {
      out.status = Status::Infeasible;
      return out;
    }
    tableau.expel_artificials();
  }
  std::vector<double> costs = problem.objective();
  if (problem.sense() == Sense::Minimize) {
    for (auto& c : costs) c = -c;
  }
  const Status s2 = tableau.phase_two(costs);
  out.iterations = tableau.iterations();
  if (s2 != Status::Optimal) {
    out.status = s2;
    return out;
  }
  std::vector<double> x = tableau.structural_values();
  for (std::size_t j = 0; j < x.size(); ++j) x[j] += problem.lower()[j];
  double value = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) value += problem.objective()[j] * x[j];
  out.point = std::move(x);
  out.value = value;
  out.basis = tableau.structural_basis();
  out.status = max_violation(problem, out.point) <= 1e-7 ? Status::Optimal : Status::NumericalBreakdown;
  return out;
}

bool feasible(const LpProblem& problem, const SolverOptions& options) {
  problem.validate();
  Tableau tableau(problem, options);
  if (!tableau.has_artificials()) return true;
  double infeasibility = 0.0;
  if (tableau.phase_one(&infeasibility) != Status::Optimal) {
    throw Error(ErrorCode::SolverFailure, "phase one did not terminate");
  }
  return infeasibility <= phase_one_tolerance(problem, options);
}

}  // namespace dbounds::lp
