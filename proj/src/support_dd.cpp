#include "dbounds/support_dd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dbounds/error.hpp"
#include "dbounds/lp.hpp"

namespace dbounds {

namespace {

std::vector<double> objective_gains(const CombinedProblem& problem, const std::vector<double>& coeffs) {
  if (coeffs.size() != problem.num_classes()) {
    throw Error(ErrorCode::InvalidArgument, "one objective coefficient per class expected");
  }
  const auto priors = class_priors(problem);
  std::vector<double> gains(coeffs.size(), 0.0);
  for (std::size_t alpha = 0; alpha < coeffs.size(); ++alpha) {
    if (coeffs[alpha] == 0.0) continue;
    if (!(priors[alpha] > 0.0)) {
      throw Error(ErrorCode::ZeroClassPrior,
                  "class '" + problem.class_labels()[alpha].name + "' has zero prior probability");
    }
    gains[alpha] = coeffs[alpha] / priors[alpha];
  }
  return gains;
}

std::size_t weight_index(std::size_t K, std::size_t z, int yhat, std::size_t alpha) {
  return (z * 2 + static_cast<std::size_t>(yhat)) * K + alpha;
}

// Rows of W_LTP for every cell plus the Lipschitz rows; variables are all
// w_alpha(yhat, z) in weight_index order.
lp::LpProblem global_program(const CombinedProblem& problem, const LipschitzSpec& lip) {
  const std::size_t K = problem.num_classes();
  const std::size_t n = problem.num_cells();
  lp::LpProblem prog(2 * n * K, lp::Sense::Maximize);
  std::vector<std::pair<std::size_t, double>> terms;
  for (std::size_t z = 0; z < n; ++z) {
    for (int yhat = 0; yhat < 2; ++yhat) {
      terms.clear();
      for (std::size_t alpha = 0; alpha < K; ++alpha) terms.emplace_back(weight_index(K, z, yhat, alpha), 1.0);
      prog.add_sparse_constraint(terms, lp::Relation::Equal, 1.0);
    }
    // The last class's LTP row follows from the others and the simplex rows.
    for (std::size_t alpha = 0; alpha + 1 < K; ++alpha) {
      terms.clear();
      for (int yhat = 0; yhat < 2; ++yhat) {
        const double p = problem.p_yhat(z, yhat);
        if (p > 0.0) terms.emplace_back(weight_index(K, z, yhat, alpha), p);
      }
      prog.add_sparse_constraint(terms, lp::Relation::Equal, problem.p_class(z, alpha));
    }
  }
  for (const CellPair& pr : lipschitz_pairs(problem, lip.weights)) {
    const double bound = lip.L * pr.distance;
    if (bound >= 1.0) continue;  // weights lie in [0, 1]
    for (int yhat = 0; yhat < 2; ++yhat) {
      for (std::size_t alpha = 0; alpha < K; ++alpha) {
        const std::size_t i = weight_index(K, pr.i, yhat, alpha);
        const std::size_t j = weight_index(K, pr.j, yhat, alpha);
        prog.add_sparse_constraint({{i, 1.0}, {j, -1.0}}, lp::Relation::LessEqual, bound);
        prog.add_sparse_constraint({{i, -1.0}, {j, 1.0}}, lp::Relation::LessEqual, bound);
      }
    }
  }
  return prog;
}

[[noreturn]] void solver_failure(lp::Status status, const char* what) {
  throw Error(ErrorCode::SolverFailure, std::string(what) + ": " + std::string(lp::status_name(status)));
}

// One cell of the separable program: maximize sum_alpha gains[alpha] *
// P(Yhat=1|z) * w_alpha(1, z) over the cell's LTP polytope. Coordinates
// with P(Yhat=yhat|z) = 0 are fixed at 0.
double solve_cell(const CombinedProblem& problem, std::size_t z, const std::vector<double>& gains,
                  double* witness) {
  const std::size_t K = problem.num_classes();
  std::vector<int> active;
  for (int yhat = 0; yhat < 2; ++yhat) {
    if (problem.p_yhat(z, yhat) > 0.0) active.push_back(yhat);
  }
  lp::LpProblem prog(active.size() * K, lp::Sense::Maximize);
  std::vector<std::pair<std::size_t, double>> terms;
  for (std::size_t s = 0; s < active.size(); ++s) {
    terms.clear();
    for (std::size_t alpha = 0; alpha < K; ++alpha) terms.emplace_back(s * K + alpha, 1.0);
    prog.add_sparse_constraint(terms, lp::Relation::Equal, 1.0);
    if (active[s] == 1) {
      const double p1 = problem.p_yhat(z, 1);
      for (std::size_t alpha = 0; alpha < K; ++alpha) prog.set_objective(s * K + alpha, gains[alpha] * p1);
    }
  }
  for (std::size_t alpha = 0; alpha + 1 < K; ++alpha) {
    terms.clear();
    for (std::size_t s = 0; s < active.size(); ++s) terms.emplace_back(s * K + alpha, problem.p_yhat(z, active[s]));
    prog.add_sparse_constraint(terms, lp::Relation::Equal, problem.p_class(z, alpha));
  }
  const lp::LpSolution sol = lp::solve(prog);
  if (sol.status != lp::Status::Optimal) solver_failure(sol.status, "cell program");
  std::fill(witness, witness + 2 * K, 0.0);
  for (std::size_t s = 0; s < active.size(); ++s) {
    for (std::size_t alpha = 0; alpha < K; ++alpha) {
      witness[static_cast<std::size_t>(active[s]) * K + alpha] = sol.point[s * K + alpha];
    }
  }
  return sol.value;
}

}  // namespace

std::optional<LipschitzSpec> resolve_lipschitz(const CombinedProblem& problem,
                                               const std::optional<LipschitzSpec>& lip) {
  if (!lip || lip->mode == LipschitzSpec::Mode::Fixed) {
    if (lip && !(lip->L >= 0.0)) throw Error(ErrorCode::InvalidArgument, "Lipschitz constant must be >= 0");
    return lip;
  }
  LipschitzSpec fixed = *lip;
  fixed.mode = LipschitzSpec::Mode::Fixed;
  fixed.L = minimal_lipschitz(problem, lip->weights);
  return fixed;
}

DdSupport dd_objective_max(const CombinedProblem& problem, const std::vector<double>& coeffs,
                           const std::optional<LipschitzSpec>& lip) {
  const std::vector<double> gains = objective_gains(problem, coeffs);
  const std::size_t K = problem.num_classes();
  const std::size_t n = problem.num_cells();
  DdSupport out;
  out.witness.num_classes = K;
  out.witness.values.assign(2 * n * K, 0.0);

  if (!lip) {
    for (std::size_t z = 0; z < n; ++z) {
      const double v = solve_cell(problem, z, gains, out.witness.values.data() + 2 * z * K);
      out.value += problem.mass(z) * v;
    }
    return out;
  }
  if (lip->mode != LipschitzSpec::Mode::Fixed) {
    throw Error(ErrorCode::InvalidArgument, "resolve Minimal Lipschitz mode before solving");
  }
  lp::LpProblem prog = global_program(problem, *lip);
  for (std::size_t z = 0; z < n; ++z) {
    const double scale = problem.mass(z) * problem.p_yhat(z, 1);
    for (std::size_t alpha = 0; alpha < K; ++alpha) {
      prog.set_objective(weight_index(K, z, 1, alpha), gains[alpha] * scale);
    }
  }
  const lp::LpSolution sol = lp::solve(prog);
  if (sol.status == lp::Status::Infeasible) {
    throw Error(ErrorCode::InfeasibleConstraints, "no weights satisfy the Lipschitz bound L=" + std::to_string(lip->L));
  }
  if (sol.status != lp::Status::Optimal) solver_failure(sol.status, "Lipschitz program");
  out.value = sol.value;
  out.witness.values = sol.point;
  return out;
}

DdSupport dd_support(const CombinedProblem& problem, const std::vector<double>& rho,
                     const std::optional<LipschitzSpec>& lip) {
  const std::size_t K = problem.num_classes();
  if (rho.size() + 1 != K) {
    throw Error(ErrorCode::InvalidArgument, "direction needs " + std::to_string(K - 1) + " entries");
  }
  if (std::all_of(rho.begin(), rho.end(), [](double r) { return r == 0.0; })) {
    throw Error(ErrorCode::InvalidArgument, "direction must be nonzero");
  }
  std::vector<double> coeffs(K, 0.0);
  for (std::size_t b = 1; b < K; ++b) {
    coeffs[0] += rho[b - 1];
    coeffs[b] -= rho[b - 1];
  }
  return dd_objective_max(problem, coeffs, resolve_lipschitz(problem, lip));
}

DisparityInterval dd_interval_lp(const CombinedProblem& problem, ClassPair pair,
                                 const std::optional<LipschitzSpec>& lip) {
  const std::size_t K = problem.num_classes();
  if (pair.a == pair.b || pair.a >= K || pair.b >= K) {
    throw Error(ErrorCode::InvalidArgument, "class pair must name two distinct classes");
  }
  const auto fixed = resolve_lipschitz(problem, lip);
  std::vector<double> coeffs(K, 0.0);
  coeffs[pair.a] = 1.0;
  coeffs[pair.b] = -1.0;
  const double upper = dd_objective_max(problem, coeffs, fixed).value;
  coeffs[pair.a] = -1.0;
  coeffs[pair.b] = 1.0;
  const double lower = -dd_objective_max(problem, coeffs, fixed).value;
  DisparityInterval out;
  out.measure = {MeasureKind::DD};
  out.pair = pair;
  out.lower = std::clamp(std::min(lower, upper), -1.0, 1.0);
  out.upper = std::clamp(std::max(lower, upper), -1.0, 1.0);
  out.method = Method::LP;
  return out;
}

double minimal_lipschitz(const CombinedProblem& problem, const std::vector<double>& weights) {
  const std::vector<CellPair> pairs = lipschitz_pairs(problem, weights);
  double min_distance = std::numeric_limits<double>::infinity();
  for (const auto& p : pairs) {
    if (p.distance > 0.0) min_distance = std::min(min_distance, p.distance);
  }
  if (pairs.empty() || !std::isfinite(min_distance)) return 0.0;

  LipschitzSpec spec;
  spec.weights = weights;
  auto feasible_at = [&](double L) {
    spec.L = L;
    return lp::feasible(global_program(problem, spec));
  };
  if (feasible_at(0.0)) return 0.0;
  double lo = 0.0;
  double hi = 1.0 / min_distance;  // every pair bound reaches 1, so the rows are vacuous
  while (hi - lo > 1e-6 * (1.0 + hi)) {
    const double mid = 0.5 * (lo + hi);
    (feasible_at(mid) ? hi : lo) = mid;
  }
  return hi;
}

double weight_field_violation(const CombinedProblem& problem, const WeightField& w,
                              const std::optional<LipschitzSpec>& lip) {
  const std::size_t K = problem.num_classes();
  double worst = 0.0;
  for (std::size_t z = 0; z < problem.num_cells(); ++z) {
    for (int yhat = 0; yhat < 2; ++yhat) {
      if (!lip && problem.p_yhat(z, yhat) <= 0.0) continue;
      double sum = 0.0;
      for (std::size_t alpha = 0; alpha < K; ++alpha) {
        const double v = w.at(z, yhat, alpha);
        worst = std::max({worst, -v, v - 1.0});
        sum += v;
      }
      worst = std::max(worst, std::abs(sum - 1.0));
    }
    for (std::size_t alpha = 0; alpha < K; ++alpha) {
      double ltp = 0.0;
      for (int yhat = 0; yhat < 2; ++yhat) ltp += problem.p_yhat(z, yhat) * w.at(z, yhat, alpha);
      worst = std::max(worst, std::abs(ltp - problem.p_class(z, alpha)));
    }
  }
  if (lip) {
    for (const CellPair& pr : lipschitz_pairs(problem, lip->weights)) {
      for (int yhat = 0; yhat < 2; ++yhat) {
        for (std::size_t alpha = 0; alpha < K; ++alpha) {
          const double gap = std::abs(w.at(pr.i, yhat, alpha) - w.at(pr.j, yhat, alpha));
          worst = std::max(worst, gap - lip->L * pr.distance);
        }
      }
    }
  }
  return worst;
}

}  // namespace dbounds
