#include "dbounds/support_class.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dbounds/closed_form.hpp"
#include "dbounds/error.hpp"
#include "dbounds/lp.hpp"
#include "dbounds/parallel.hpp"
#include "dbounds/support_dd.hpp"

namespace dbounds {

namespace {

constexpr double kMinDenominator = 1e-9;
constexpr double kBoxSlack = 1e-12;
constexpr std::size_t kChunk = 32;

std::size_t outcome_index(int yhat, int y) { return static_cast<std::size_t>(2 * yhat + y); }

// Fixed-denominator program for one objective, rebuilt into a template once
// and then specialised per grid point by its per-class rhs and objective.
class GridProgram {
 public:
  GridProgram(const CombinedProblem& p, Measure m, std::vector<double> coeffs,
              const std::optional<LipschitzSpec>& lip)
      : p_(p), yh_(m.yhat_star()), ys_(m.y_star()), K_(p.num_classes()), coeffs_(std::move(coeffs)),
        lip_(lip.has_value()) {
    for (std::size_t alpha = 0; alpha < K_; ++alpha) {
      if (coeffs_[alpha] != 0.0) grid_classes_.push_back(alpha);
    }
    if (grid_classes_.size() == K_) {
      // Every class carries weight: class 0 follows from sum_alpha r = P(Y=y*).
      derived_ = 0;
      grid_classes_.erase(grid_classes_.begin());
    }
    for (std::size_t z = 0; z < p.num_cells(); ++z) py_total_ += p.mass(z) * p.p_y(z, ys_);
    lip_ ? build_full(*lip) : build_reduced();
  }

  const std::vector<std::size_t>& grid_classes() const { return grid_classes_; }
  std::optional<std::size_t> derived() const { return derived_; }
  double py_total() const { return py_total_; }

  // Full denominator vector for a grid point; classes without a coefficient
  // get NaN unless derived.
  std::vector<double> denominators(const std::vector<double>& point) const {
    std::vector<double> r(K_, std::numeric_limits<double>::quiet_NaN());
    double used = 0.0;
    for (std::size_t d = 0; d < grid_classes_.size(); ++d) {
      r[grid_classes_[d]] = point[d];
      used += point[d];
    }
    if (derived_) r[*derived_] = py_total_ - used;
    return r;
  }

  std::optional<lp::LpSolution> solve(const std::vector<double>& r) const {
    lp::LpProblem prog = template_;
    for (std::size_t d = 0; d < grid_classes_.size(); ++d) prog.set_rhs(class_rows_[d], r[grid_classes_[d]]);
    for (std::size_t z = 0; z < p_.num_cells(); ++z) {
      const double scale = p_.mass(z) * p_.p_joint(z, yh_, ys_);
      if (scale <= 0.0) continue;
      for (std::size_t alpha = 0; alpha < K_; ++alpha) {
        if (coeffs_[alpha] == 0.0) continue;
        prog.set_objective(var(z, yh_, ys_, alpha), coeffs_[alpha] * scale / r[alpha]);
      }
    }
    lp::LpSolution sol = lp::solve(prog);
    if (sol.status == lp::Status::Infeasible) return std::nullopt;
    if (sol.status != lp::Status::Optimal) {
      throw Error(ErrorCode::SolverFailure, "grid program: " + std::string(lp::status_name(sol.status)));
    }
    return sol;
  }

  FractionalWitness witness(const std::vector<double>& r_grid, const lp::LpSolution& sol) const {
    FractionalWitness w;
    w.num_classes = K_;
    w.w.assign(p_.num_cells() * 4 * K_, 0.0);
    for (std::size_t z = 0; z < p_.num_cells(); ++z) {
      for (int yhat = 0; yhat < 2; ++yhat) {
        for (int y = 0; y < 2; ++y) {
          if (!lip_ && (y != ys_ || p_.p_joint(z, yhat, y) <= 0.0)) continue;
          for (std::size_t alpha = 0; alpha < K_; ++alpha) {
            w.w[(z * 4 + outcome_index(yhat, y)) * K_ + alpha] = sol.point[var(z, yhat, y, alpha)];
          }
        }
      }
      if (lip_) continue;
      // Spread each class's remaining mass uniformly over the y != y* coordinates.
      const int yo = 1 - ys_;
      const double rest = p_.p_y(z, yo);
      if (rest <= 0.0) continue;
      for (std::size_t alpha = 0; alpha < K_; ++alpha) {
        double q = p_.p_class(z, alpha);
        for (int yhat = 0; yhat < 2; ++yhat) {
          q -= p_.p_joint(z, yhat, ys_) * w.w[(z * 4 + outcome_index(yhat, ys_)) * K_ + alpha];
        }
        for (int yhat = 0; yhat < 2; ++yhat) {
          if (p_.p_joint(z, yhat, yo) > 0.0) {
            w.w[(z * 4 + outcome_index(yhat, yo)) * K_ + alpha] = std::max(0.0, q) / rest;
          }
        }
      }
    }
    w.r.assign(K_, 0.0);
    for (std::size_t alpha = 0; alpha < K_; ++alpha) {
      if (!std::isnan(r_grid[alpha])) {
        w.r[alpha] = r_grid[alpha];
        continue;
      }
      for (std::size_t z = 0; z < p_.num_cells(); ++z) {
        for (int yhat = 0; yhat < 2; ++yhat) {
          w.r[alpha] += p_.mass(z) * p_.p_joint(z, yhat, ys_) * w.w[(z * 4 + outcome_index(yhat, ys_)) * K_ + alpha];
        }
      }
    }
    return w;
  }

 private:
  std::size_t var(std::size_t z, int yhat, int y, std::size_t alpha) const {
    if (lip_) return (z * 4 + outcome_index(yhat, y)) * K_ + alpha;
    return base_[z * 2 + static_cast<std::size_t>(yhat)] + alpha;
  }

  void add_class_rows() {
    std::vector<std::pair<std::size_t, double>> terms;
    for (std::size_t alpha : grid_classes_) {
      terms.clear();
      for (std::size_t z = 0; z < p_.num_cells(); ++z) {
        for (int yhat = 0; yhat < 2; ++yhat) {
          const double pj = p_.p_joint(z, yhat, ys_);
          if (pj > 0.0) terms.emplace_back(var(z, yhat, ys_, alpha), p_.mass(z) * pj);
        }
      }
      class_rows_.push_back(template_.num_constraints());
      template_.add_sparse_constraint(terms, lp::Relation::Equal, 0.0);
    }
  }

  // Only y = y* weights enter the objective and the denominators. For each
  // cell the y != y* coordinates can absorb any nonnegative remainder of
  // P(alpha|z), so they reduce to capacity rows.
  void build_reduced() {
    const std::size_t n = p_.num_cells();
    base_.assign(2 * n, 0);
    std::size_t count = 0;
    for (std::size_t z = 0; z < n; ++z) {
      for (int yhat = 0; yhat < 2; ++yhat) {
        base_[z * 2 + yhat] = count;
        if (p_.p_joint(z, yhat, ys_) > 0.0) count += K_;
      }
    }
    template_ = lp::LpProblem(count, lp::Sense::Maximize);
    std::vector<std::pair<std::size_t, double>> terms;
    for (std::size_t z = 0; z < n; ++z) {
      for (int yhat = 0; yhat < 2; ++yhat) {
        if (p_.p_joint(z, yhat, ys_) <= 0.0) continue;
        terms.clear();
        for (std::size_t alpha = 0; alpha < K_; ++alpha) terms.emplace_back(var(z, yhat, ys_, alpha), 1.0);
        template_.add_sparse_constraint(terms, lp::Relation::Equal, 1.0);
      }
      const double py = p_.p_y(z, ys_);
      for (std::size_t alpha = 0; alpha < K_; ++alpha) {
        const double pa = p_.p_class(z, alpha);
        if (pa >= py) continue;  // implied by the simplex rows
        terms.clear();
        for (int yhat = 0; yhat < 2; ++yhat) {
          const double pj = p_.p_joint(z, yhat, ys_);
          if (pj > 0.0) terms.emplace_back(var(z, yhat, ys_, alpha), pj);
        }
        if (!terms.empty()) template_.add_sparse_constraint(terms, lp::Relation::LessEqual, pa);
      }
    }
    add_class_rows();
  }

  // All four outcome coordinates per cell, including zero-probability ones,
  // so that the Lipschitz rows see a complete weight field.
  void build_full(const LipschitzSpec& lip) {
    const std::size_t n = p_.num_cells();
    template_ = lp::LpProblem(n * 4 * K_, lp::Sense::Maximize);
    std::vector<std::pair<std::size_t, double>> terms;
    for (std::size_t z = 0; z < n; ++z) {
      for (int yhat = 0; yhat < 2; ++yhat) {
        for (int y = 0; y < 2; ++y) {
          terms.clear();
          for (std::size_t alpha = 0; alpha < K_; ++alpha) terms.emplace_back(var(z, yhat, y, alpha), 1.0);
          template_.add_sparse_constraint(terms, lp::Relation::Equal, 1.0);
        }
      }
      for (std::size_t alpha = 0; alpha + 1 < K_; ++alpha) {
        terms.clear();
        for (int yhat = 0; yhat < 2; ++yhat) {
          for (int y = 0; y < 2; ++y) {
            const double pj = p_.p_joint(z, yhat, y);
            if (pj > 0.0) terms.emplace_back(var(z, yhat, y, alpha), pj);
          }
        }
        template_.add_sparse_constraint(terms, lp::Relation::Equal, p_.p_class(z, alpha));
      }
    }
    for (const CellPair& pr : lipschitz_pairs(p_, lip.weights)) {
      const double bound = lip.L * pr.distance;
      if (bound >= 1.0) continue;
      for (int yhat = 0; yhat < 2; ++yhat) {
        for (int y = 0; y < 2; ++y) {
          for (std::size_t alpha = 0; alpha < K_; ++alpha) {
            const std::size_t i = var(pr.i, yhat, y, alpha), j = var(pr.j, yhat, y, alpha);
            template_.add_sparse_constraint({{i, 1.0}, {j, -1.0}}, lp::Relation::LessEqual, bound);
            template_.add_sparse_constraint({{i, -1.0}, {j, 1.0}}, lp::Relation::LessEqual, bound);
          }
        }
      }
    }
    add_class_rows();
  }

  const CombinedProblem& p_;
  int yh_, ys_;
  std::size_t K_;
  std::vector<double> coeffs_;
  bool lip_;
  std::vector<std::size_t> grid_classes_;
  std::optional<std::size_t> derived_;
  double py_total_ = 0.0;
  std::vector<std::size_t> base_;
  std::vector<std::size_t> class_rows_;
  lp::LpProblem template_;
};

// Cheap upper bound on the objective at fixed denominators, from the FH
// ranges of the numerator N_alpha and of D_alpha = r_alpha - N_alpha.
struct RatioBounds {
  std::vector<double> n_lo, n_hi, d_lo, d_hi;

  RatioBounds(const CombinedProblem& p, int yh, int ys) {
    const std::size_t K = p.num_classes();
    n_lo.assign(K, 0.0), n_hi.assign(K, 0.0), d_lo.assign(K, 0.0), d_hi.assign(K, 0.0);
    for (std::size_t z = 0; z < p.num_cells(); ++z) {
      for (std::size_t alpha = 0; alpha < K; ++alpha) {
        const CellBounds hit = fh_bounds(p.p_joint(z, yh, ys), p.p_class(z, alpha));
        const CellBounds miss = fh_bounds(p.p_joint(z, 1 - yh, ys), p.p_class(z, alpha));
        n_lo[alpha] += p.mass(z) * hit.lower;
        n_hi[alpha] += p.mass(z) * hit.upper;
        d_lo[alpha] += p.mass(z) * miss.lower;
        d_hi[alpha] += p.mass(z) * miss.upper;
      }
    }
  }

  double upper(const std::vector<double>& coeffs, const std::vector<double>& r) const {
    double bound = 0.0;
    for (std::size_t alpha = 0; alpha < coeffs.size(); ++alpha) {
      const double c = coeffs[alpha];
      if (c == 0.0) continue;
      const double hi = std::min({1.0, n_hi[alpha] / r[alpha], (r[alpha] - d_lo[alpha]) / r[alpha]});
      const double lo = std::max({0.0, n_lo[alpha] / r[alpha], (r[alpha] - d_hi[alpha]) / r[alpha]});
      bound += c > 0.0 ? c * hi : c * lo;
    }
    return bound;
  }
};

struct Candidate {
  std::vector<double> point;  // grid-class coordinates
  double value = -std::numeric_limits<double>::infinity();
  std::optional<lp::LpSolution> solution;
};

bool better(const Candidate& x, const Candidate& y) {
  if (!x.solution) return false;
  if (!y.solution) return true;
  if (x.value != y.value) return x.value > y.value;
  return std::lexicographical_compare(x.point.begin(), x.point.end(), y.point.begin(), y.point.end());
}

std::vector<double> axis(double lo, double hi, std::size_t n) {
  if (hi - lo <= 1e-15 || n == 1) return {0.5 * (lo + hi)};
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

}  // namespace

std::vector<RBox> r_bounds(const CombinedProblem& problem, Measure measure) {
  require_outcome_mode(problem, measure);
  if (measure.family() != MeasureFamily::Classification) {
    throw Error(ErrorCode::InvalidArgument, "r bounds apply to classification measures");
  }
  if (measure.role_swap()) return r_bounds(swap_outcome_roles(problem), measure.unswapped());
  std::vector<RBox> out(problem.num_classes());
  for (std::size_t z = 0; z < problem.num_cells(); ++z) {
    const double py = problem.p_y(z, measure.y_star());
    for (std::size_t alpha = 0; alpha < out.size(); ++alpha) {
      const CellBounds b = fh_bounds(problem.p_class(z, alpha), py);
      out[alpha].lower += problem.mass(z) * b.lower;
      out[alpha].upper += problem.mass(z) * b.upper;
    }
  }
  return out;
}

ClassSupport class_objective_max(const CombinedProblem& problem, Measure measure, const std::vector<double>& coeffs,
                                 const GridSpec& grid, const std::optional<LipschitzSpec>& lip, int threads) {
  if (measure.family() != MeasureFamily::Classification) {
    throw Error(ErrorCode::InvalidArgument, "expected a classification measure");
  }
  require_outcome_mode(problem, measure);
  if (measure.role_swap()) {
    return class_objective_max(swap_outcome_roles(problem), measure.unswapped(), coeffs, grid, lip, threads);
  }
  const std::size_t K = problem.num_classes();
  if (coeffs.size() != K) throw Error(ErrorCode::InvalidArgument, "one objective coefficient per class expected");
  if (std::all_of(coeffs.begin(), coeffs.end(), [](double c) { return c == 0.0; })) {
    throw Error(ErrorCode::InvalidArgument, "direction must be nonzero");
  }
  const std::optional<LipschitzSpec> fixed_lip = resolve_lipschitz(problem, lip);

  const std::vector<RBox> boxes = grid.r_bounds.empty() ? r_bounds(problem, measure) : grid.r_bounds;
  if (boxes.size() != K) throw Error(ErrorCode::InvalidArgument, "one r box per class expected");
  for (std::size_t alpha = 0; alpha < K; ++alpha) {
    if (boxes[alpha].lower > boxes[alpha].upper + kBoxSlack) {
      throw Error(ErrorCode::EmptyGrid, "empty r box for class '" + problem.class_labels()[alpha].name + "'");
    }
    if (coeffs[alpha] != 0.0 && !(boxes[alpha].upper > 0.0)) {
      throw Error(ErrorCode::ZeroDenominatorRisk, "P(A=" + problem.class_labels()[alpha].name + ", Y=" +
                                                      std::to_string(measure.y_star()) +
                                                      ") is zero under every coupling");
    }
  }

  const GridProgram program(problem, measure, coeffs, fixed_lip);
  const RatioBounds ratio(problem, measure.yhat_star(), measure.y_star());
  const auto& dims = program.grid_classes();
  const std::size_t D = dims.size();
  const std::size_t resolution = grid.resolution_for(D);
  const std::size_t rounds = grid.rounds_for(D);
  if (resolution < 3) throw Error(ErrorCode::InvalidArgument, "grid resolution must be at least 3");

  ClassSupport out;
  // Returns the full denominator vector, or nullopt when the point is excluded.
  auto admissible = [&](const std::vector<double>& point) -> std::optional<std::vector<double>> {
    std::vector<double> r = program.denominators(point);
    for (std::size_t alpha = 0; alpha < K; ++alpha) {
      if (std::isnan(r[alpha])) continue;
      if (r[alpha] < boxes[alpha].lower - kBoxSlack || r[alpha] > boxes[alpha].upper + kBoxSlack) return std::nullopt;
      if (coeffs[alpha] != 0.0 && r[alpha] < kMinDenominator) return std::nullopt;
    }
    return r;
  };
  auto evaluate = [&](Candidate& c, const std::vector<double>& r) {
    c.solution = program.solve(r);
    if (c.solution) c.value = c.solution->value;
  };

  std::vector<double> lo(D), hi(D);
  for (std::size_t d = 0; d < D; ++d) {
    lo[d] = boxes[dims[d]].lower;
    hi[d] = boxes[dims[d]].upper;
  }
  Candidate best;
  std::vector<double> step(D, 0.0);
  for (std::size_t round = 0; round <= rounds; ++round) {
    std::vector<std::vector<double>> axes(D);
    std::size_t total = 1;
    for (std::size_t d = 0; d < D; ++d) {
      axes[d] = axis(lo[d], hi[d], resolution);
      step[d] = axes[d].size() > 1 ? (hi[d] - lo[d]) / static_cast<double>(resolution - 1) : 0.0;
      total *= axes[d].size();
    }
    // Candidates in odometer order, then sorted by their bound so that good
    // incumbents appear early; ties keep odometer order.
    std::vector<Candidate> cands;
    std::vector<std::vector<double>> rs;
    std::vector<double> bounds;
    std::vector<std::size_t> digit(D, 0);
    for (std::size_t i = 0; i < total; ++i) {
      Candidate c;
      c.point.resize(D);
      for (std::size_t d = 0; d < D; ++d) c.point[d] = axes[d][digit[d]];
      for (std::size_t d = D; d-- > 0;) {
        if (++digit[d] < axes[d].size()) break;
        digit[d] = 0;
      }
      auto r = admissible(c.point);
      if (!r) {
        ++out.excluded;
        continue;
      }
      bounds.push_back(ratio.upper(coeffs, *r));
      cands.push_back(std::move(c));
      rs.push_back(std::move(*r));
    }
    std::vector<std::size_t> order(cands.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return bounds[a] > bounds[b]; });

    for (std::size_t start = 0; start < order.size(); start += kChunk) {
      const std::size_t end = std::min(order.size(), start + kChunk);
      std::vector<std::size_t> work;
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t i = order[k];
        // Strict margin: a pruned point can neither beat nor tie the incumbent.
        if (best.solution && bounds[i] < best.value - 1e-9 * (1.0 + std::abs(best.value))) {
          ++out.pruned;
          continue;
        }
        work.push_back(i);
      }
      parallel_for(work.size(), threads, [&](std::size_t k) { evaluate(cands[work[k]], rs[work[k]]); });
      for (std::size_t i : work) {
        ++out.evaluated;
        if (!cands[i].solution) {
          ++out.infeasible;
          continue;
        }
        if (better(cands[i], best)) best = cands[i];
      }
    }
    if (!best.solution) {
      if (cands.empty()) throw Error(ErrorCode::EmptyGrid, "no grid point lies inside the r boxes");
      throw Error(ErrorCode::AllGridPointsInfeasible, "every grid point gave an infeasible program");
    }
    if (round == rounds) break;
    for (std::size_t d = 0; d < D; ++d) {
      lo[d] = std::max(boxes[dims[d]].lower, best.point[d] - step[d]);
      hi[d] = std::min(boxes[dims[d]].upper, best.point[d] + step[d]);
    }
  }

  for (std::size_t d = 0; d < D; ++d) {
    for (double sign : {-1.0, 1.0}) {
      if (step[d] <= 0.0) continue;
      Candidate nb;
      nb.point = best.point;
      nb.point[d] += sign * step[d];
      auto r = admissible(nb.point);
      if (!r) continue;
      evaluate(nb, *r);
      ++out.evaluated;
      if (nb.solution) out.gap_hint = std::max(out.gap_hint, std::abs(nb.value - best.value));
    }
  }
  out.value = best.value;
  out.witness = program.witness(program.denominators(best.point), *best.solution);
  return out;
}

ClassSupport class_support(const CombinedProblem& problem, Measure measure, const std::vector<double>& rho,
                           const GridSpec& grid, const std::optional<LipschitzSpec>& lip, int threads) {
  const std::size_t K = problem.num_classes();
  if (rho.size() + 1 != K) {
    throw Error(ErrorCode::InvalidArgument, "direction needs " + std::to_string(K - 1) + " entries");
  }
  std::vector<double> coeffs(K, 0.0);
  for (std::size_t b = 1; b < K; ++b) {
    coeffs[0] += rho[b - 1];
    coeffs[b] -= rho[b - 1];
  }
  if (std::all_of(rho.begin(), rho.end(), [](double v) { return v == 0.0; })) {
    throw Error(ErrorCode::InvalidArgument, "direction must be nonzero");
  }
  return class_objective_max(problem, measure, coeffs, grid, lip, threads);
}

DisparityInterval class_interval(const CombinedProblem& problem, Measure measure, ClassPair pair,
                                 const GridSpec& grid, const std::optional<LipschitzSpec>& lip, int threads) {
  const std::size_t K = problem.num_classes();
  if (pair.a == pair.b || pair.a >= K || pair.b >= K) {
    throw Error(ErrorCode::InvalidArgument, "class pair must name two distinct classes");
  }
  const auto fixed = resolve_lipschitz(problem, lip);
  std::vector<double> coeffs(K, 0.0);
  coeffs[pair.a] = 1.0;
  coeffs[pair.b] = -1.0;
  const ClassSupport up = class_objective_max(problem, measure, coeffs, grid, fixed, threads);
  coeffs[pair.a] = -1.0;
  coeffs[pair.b] = 1.0;
  const ClassSupport down = class_objective_max(problem, measure, coeffs, grid, fixed, threads);
  DisparityInterval out;
  out.measure = measure;
  out.pair = pair;
  out.lower = std::clamp(std::min(-down.value, up.value), -1.0, 1.0);
  out.upper = std::clamp(std::max(-down.value, up.value), -1.0, 1.0);
  out.method = Method::FractionalGrid;
  out.gap_hint = std::max(up.gap_hint, down.gap_hint);
  return out;
}

double witness_violation(const CombinedProblem& problem, Measure measure, const FractionalWitness& witness) {
  const std::size_t K = problem.num_classes();
  const int ys = measure.y_star();
  double worst = 0.0;
  std::vector<double> r(K, 0.0);
  double py_total = 0.0;
  for (std::size_t z = 0; z < problem.num_cells(); ++z) {
    py_total += problem.mass(z) * problem.p_y(z, ys);
    for (int yhat = 0; yhat < 2; ++yhat) {
      for (int y = 0; y < 2; ++y) {
        const double pj = problem.p_joint(z, yhat, y);
        if (pj <= 0.0) continue;
        double sum = 0.0;
        for (std::size_t alpha = 0; alpha < K; ++alpha) {
          const double v = witness.weight(z, yhat, y, alpha);
          worst = std::max({worst, -v, v - 1.0});
          sum += v;
          if (y == ys) r[alpha] += problem.mass(z) * pj * v;
        }
        worst = std::max(worst, std::abs(sum - 1.0));
      }
    }
    for (std::size_t alpha = 0; alpha < K; ++alpha) {
      double ltp = 0.0;
      for (int yhat = 0; yhat < 2; ++yhat) {
        for (int y = 0; y < 2; ++y) ltp += problem.p_joint(z, yhat, y) * witness.weight(z, yhat, y, alpha);
      }
      worst = std::max(worst, std::abs(ltp - problem.p_class(z, alpha)));
    }
  }
  double r_sum = 0.0;
  for (std::size_t alpha = 0; alpha < K; ++alpha) {
    worst = std::max(worst, std::abs(r[alpha] - witness.r[alpha]));
    r_sum += witness.r[alpha];
  }
  return std::max(worst, std::abs(r_sum - py_total));
}

}  // namespace dbounds
