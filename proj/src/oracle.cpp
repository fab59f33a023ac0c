#include "dbounds/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <random>

#include "dbounds/closed_form.hpp"
#include "dbounds/error.hpp"

namespace dbounds {

namespace {

constexpr double kForcedTol = 1e-12;

// Midpoint grid of n points over [lo, hi]; the single point lo when the
// box is degenerate.
std::vector<double> midpoints(double lo, double hi, std::size_t n) {
  if (hi - lo <= 0.0) return {lo};
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + (static_cast<double>(i) + 0.5) * (hi - lo) / static_cast<double>(n);
  return out;
}

void check_grid(const OracleSpec& spec) {
  if (spec.per_cell_grid == 0) throw Error(ErrorCode::InvalidArgument, "oracle grid must be positive");
}

// Per-cell candidate points, each a vector of the per-cell contributions
// the objective needs. The enumeration walks the product of these lists.
using CellPoints = std::vector<std::vector<double>>;

// Degenerate boxes contribute a single point, so the product is counted
// from the per-cell lists rather than from grid^(parameters). Lists not
// built yet count as one, which lets builders stop early.
void check_budget(const OracleSpec& spec, const std::vector<CellPoints>& cells) {
  if (spec.sampling == OracleSpec::Sampling::RandomVertexMix) {
    if (static_cast<double>(spec.n_samples) > spec.max_total_points) {
      throw Error(ErrorCode::BudgetExceeded, "oracle sample count exceeds the cap");
    }
    return;
  }
  double total = 1.0;
  for (const auto& c : cells) total *= static_cast<double>(std::max<std::size_t>(1, c.size()));
  if (!(total <= spec.max_total_points)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", total);
    throw Error(ErrorCode::BudgetExceeded, std::string("oracle enumeration of ") + buf + " points exceeds the cap");
  }
}

// Calls visit(sums) for every element of the product, where sums is the
// componentwise total of the chosen per-cell vectors.
template <class Visit>
void enumerate(const std::vector<CellPoints>& cells, std::size_t width, Visit visit) {
  const std::size_t n = cells.size();
  std::vector<std::size_t> idx(n, 0);
  // partial[k] = sums over cells 0..k-1
  std::vector<std::vector<double>> partial(n + 1, std::vector<double>(width, 0.0));
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < width; ++j) partial[k + 1][j] = partial[k][j] + cells[k][0][j];
  }
  while (true) {
    visit(partial[n]);
    std::size_t k = n;
    while (k > 0) {
      --k;
      if (++idx[k] < cells[k].size()) break;
      idx[k] = 0;
      if (k == 0) return;
    }
    if (n == 0) return;
    for (std::size_t m = k; m < n; ++m) {
      for (std::size_t j = 0; j < width; ++j) partial[m + 1][j] = partial[m][j] + cells[m][idx[m]][j];
    }
  }
}

// Draws one joint sample: a random element of each cell list, biased
// toward the list ends, which hold the extreme couplings.
template <class Visit>
void sample(const std::vector<CellPoints>& cells, std::size_t width, const OracleSpec& spec, Visit visit) {
  std::mt19937_64 rng(spec.seed);
  std::vector<double> sums(width);
  for (std::size_t s = 0; s < spec.n_samples; ++s) {
    std::fill(sums.begin(), sums.end(), 0.0);
    for (const auto& list : cells) {
      std::size_t i;
      if (rng() % 4 == 0) {
        i = rng() % 2 == 0 ? 0 : list.size() - 1;
      } else {
        i = std::uniform_int_distribution<std::size_t>(0, list.size() - 1)(rng);
      }
      for (std::size_t j = 0; j < width; ++j) sums[j] += list[i][j];
    }
    visit(sums);
  }
}

template <class Visit>
void walk(const std::vector<CellPoints>& cells, std::size_t width, const OracleSpec& spec, Visit visit) {
  if (spec.sampling == OracleSpec::Sampling::Exhaustive) {
    enumerate(cells, width, visit);
  } else {
    sample(cells, width, spec, visit);
  }
}

}  // namespace

DisparityInterval oracle_dd(const CombinedProblem& problem, const OracleSpec& spec) {
  const ClassPair pair{0, 1};
  require_binary_pair(problem, pair);
  require_positive_priors(problem, pair);
  const std::size_t nz = problem.num_cells();
  check_grid(spec);
  const auto priors = class_priors(problem);

  // Per cell: P(z) * P(a, Yhat=1 | z).
  std::vector<CellPoints> cells(nz);
  double total_positive = 0.0;
  for (std::size_t z = 0; z < nz; ++z) {
    const double p1 = problem.p_yhat(z, 1);
    const auto box = fh_bounds(p1, problem.p_class(z, 0));
    for (double v : midpoints(box.lower, box.upper, spec.per_cell_grid)) cells[z].push_back({problem.mass(z) * v});
    total_positive += problem.mass(z) * p1;
    check_budget(spec, cells);
  }
  check_budget(spec, cells);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  walk(cells, 1, spec, [&](const std::vector<double>& s) {
    const double dd = s[0] / priors[0] - (total_positive - s[0]) / priors[1];
    lo = std::min(lo, dd);
    hi = std::max(hi, dd);
  });
  DisparityInterval out;
  out.measure = Measure{MeasureKind::DD};
  out.pair = pair;
  out.lower = lo;
  out.upper = hi;
  out.method = Method::Oracle;
  return out;
}

DisparityInterval oracle_class(const CombinedProblem& original, Measure measure, const OracleSpec& spec) {
  const ClassPair pair{0, 1};
  if (measure.family() != MeasureFamily::Classification) {
    throw Error(ErrorCode::InvalidArgument, "oracle_class needs a classification measure");
  }
  require_binary_pair(original, pair);
  require_outcome_mode(original, measure);
  const CombinedProblem problem = measure.role_swap() ? swap_outcome_roles(original) : original;
  const std::size_t nz = problem.num_cells();
  check_grid(spec);
  const int hs = measure.yhat_star(), ys = measure.y_star();

  // Outcome cells in the order (hs, ys), (1-hs, ys), then the two with y != ys.
  const std::array<std::pair<int, int>, 4> order{{{hs, ys}, {1 - hs, ys}, {hs, 1 - ys}, {1 - hs, 1 - ys}}};
  // Per cell contributions: P(z) * (pi_a(hs,ys), pi_a(1-hs,ys), pi_b(hs,ys), pi_b(1-hs,ys)).
  std::vector<CellPoints> cells(nz);
  for (std::size_t z = 0; z < nz; ++z) {
    const double pa = problem.p_class(z, 0);
    std::array<double, 4> po{};
    std::array<CellBounds, 4> box{};
    for (std::size_t k = 0; k < 4; ++k) {
      po[k] = problem.p_joint(z, order[k].first, order[k].second);
      box[k] = fh_bounds(po[k], pa);
    }
    const double m = problem.mass(z);
    for (double v0 : midpoints(box[0].lower, box[0].upper, spec.per_cell_grid)) {
      for (double v1 : midpoints(box[1].lower, box[1].upper, spec.per_cell_grid)) {
        for (double v2 : midpoints(box[2].lower, box[2].upper, spec.per_cell_grid)) {
          const double v3 = pa - v0 - v1 - v2;
          if (v3 < box[3].lower - kForcedTol || v3 > box[3].upper + kForcedTol) continue;
          cells[z].push_back({m * v0, m * v1, m * (po[0] - v0), m * (po[1] - v1)});
        }
      }
    }
    if (cells[z].empty()) {
      throw Error(ErrorCode::NoFeasiblePoint, "no grid point of cell " + std::to_string(z) +
                                                  " completes to a coupling; refine the oracle grid");
    }
    check_budget(spec, cells);
  }
  check_budget(spec, cells);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  walk(cells, 4, spec, [&](const std::vector<double>& s) {
    const double da = s[0] + s[1], db = s[2] + s[3];
    if (da <= 0.0 || db <= 0.0) return;
    const double d = s[0] / da - s[2] / db;
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  });
  if (!(lo <= hi)) throw Error(ErrorCode::NoFeasiblePoint, "no visited coupling defines both rates");
  DisparityInterval out;
  out.measure = measure;
  out.pair = pair;
  out.lower = lo;
  out.upper = hi;
  out.method = Method::Oracle;
  return out;
}

std::vector<Point2> oracle_hull(const CombinedProblem& problem, Measure measure, const OracleSpec& spec) {
  if (measure.family() != MeasureFamily::Demographic) {
    throw Error(ErrorCode::InvalidArgument, "oracle_hull supports DD only");
  }
  if (problem.num_classes() != 3) throw Error(ErrorCode::WrongClassCount, "oracle_hull needs exactly 3 classes");
  const auto priors = class_priors(problem);
  for (double p : priors) {
    if (p <= 0.0) throw Error(ErrorCode::ZeroClassPrior, "every class needs positive mass");
  }
  const std::size_t nz = problem.num_cells();
  check_grid(spec);

  // Per cell: P(z) * (pi_a, pi_b1, pi_b2) with pi = P(alpha, Yhat=1 | z).
  std::vector<CellPoints> cells(nz);
  for (std::size_t z = 0; z < nz; ++z) {
    const double p1 = problem.p_yhat(z, 1);
    std::array<CellBounds, 3> box{};
    for (std::size_t k = 0; k < 3; ++k) box[k] = fh_bounds(p1, problem.p_class(z, k));
    const double m = problem.mass(z);
    for (double v0 : midpoints(box[0].lower, box[0].upper, spec.per_cell_grid)) {
      for (double v1 : midpoints(box[1].lower, box[1].upper, spec.per_cell_grid)) {
        const double v2 = p1 - v0 - v1;
        if (v2 < box[2].lower - kForcedTol || v2 > box[2].upper + kForcedTol) continue;
        cells[z].push_back({m * v0, m * v1, m * v2});
      }
    }
    if (cells[z].empty()) {
      throw Error(ErrorCode::NoFeasiblePoint, "no grid point of cell " + std::to_string(z) +
                                                  " completes to a coupling; refine the oracle grid");
    }
    check_budget(spec, cells);
  }
  check_budget(spec, cells);
  std::vector<Point2> cloud;
  walk(cells, 3, spec, [&](const std::vector<double>& s) {
    const double mu0 = s[0] / priors[0];
    cloud.push_back({mu0 - s[1] / priors[1], mu0 - s[2] / priors[2]});
  });
  return cloud;
}

}  // namespace dbounds
