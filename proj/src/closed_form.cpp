#include "dbounds/closed_form.hpp"

#include <algorithm>
#include <cmath>

#include "dbounds/error.hpp"

namespace dbounds {

namespace {

constexpr double kDenominatorFloor = 1e-12;

struct RatioParts {
  double numerator = 0.0;
  double other = 0.0;  // the complementary decision's share of the denominator
};

// Classification rate mu'(alpha) with the numerator cell at its upper (or
// lower) FH bound and the complementary cell at the opposite bound.
RatioParts extreme_rate(const CombinedProblem& p, std::size_t alpha, int yhat_star, int y_star,
                        bool numerator_high) {
  RatioParts r;
  for (std::size_t z = 0; z < p.num_cells(); ++z) {
    const double pa = p.p_class(z, alpha);
    const CellBounds hit = fh_bounds(p.p_joint(z, yhat_star, y_star), pa);
    const CellBounds miss = fh_bounds(p.p_joint(z, 1 - yhat_star, y_star), pa);
    r.numerator += p.mass(z) * (numerator_high ? hit.upper : hit.lower);
    r.other += p.mass(z) * (numerator_high ? miss.lower : miss.upper);
  }
  return r;
}

double guarded_ratio(const RatioParts& r, bool& clamped) {
  double denominator = r.numerator + r.other;
  if (denominator < kDenominatorFloor) {
    denominator = kDenominatorFloor;
    clamped = true;
  }
  return r.numerator / denominator;
}

bool degenerate(const double* probs, std::size_t n, double tol) {
  return std::any_of(probs, probs + n, [tol](double v) { return v >= 1.0 - tol; });
}

}  // namespace

CellBounds fh_bounds(double sigma, double tau) {
  const double upper = std::min(sigma, tau);
  // sigma + tau - 1 can exceed min(sigma, tau) by one rounding step
  return {std::min(std::max(sigma + tau - 1.0, 0.0), upper), upper};
}

void require_binary_pair(const CombinedProblem& problem, ClassPair pair) {
  if (problem.num_classes() != 2) {
    throw Error(ErrorCode::WrongClassCount, "closed forms need exactly 2 classes, problem has " +
                                                std::to_string(problem.num_classes()));
  }
  if (pair.a == pair.b || pair.a > 1 || pair.b > 1) {
    throw Error(ErrorCode::InvalidArgument, "class pair must name two distinct classes");
  }
}

void require_positive_priors(const CombinedProblem& problem, ClassPair pair) {
  const auto priors = class_priors(problem);
  for (std::size_t alpha : {pair.a, pair.b}) {
    if (alpha >= priors.size() || pair.a == pair.b) {
      throw Error(ErrorCode::InvalidArgument, "class pair must name two distinct classes");
    }
    if (!(priors[alpha] > 0.0)) {
      throw Error(ErrorCode::ZeroClassPrior,
                  "class '" + problem.class_labels()[alpha].name + "' has zero prior probability");
    }
  }
}

void require_outcome_mode(const CombinedProblem& problem, Measure measure) {
  if (measure.family() == MeasureFamily::Classification && problem.mode() != OutcomeMode::Full) {
    throw Error(ErrorCode::MissingColumn, std::string(measure_name(measure)) +
                                              " needs the true outcome column 'y' in the main dataset");
  }
}

DisparityInterval dd_interval_binary(const CombinedProblem& problem, ClassPair pair) {
  require_binary_pair(problem, pair);
  require_positive_priors(problem, pair);
  const auto priors = class_priors(problem);
  const double pa = priors[pair.a];
  const double pb = priors[pair.b];
  double upper = 0.0, lower = 0.0;
  for (std::size_t z = 0; z < problem.num_cells(); ++z) {
    const double p1 = problem.p_yhat(z, 1);
    const CellBounds a = fh_bounds(p1, problem.p_class(z, pair.a));
    // pi(b, 1 | z) = P(Yhat=1 | z) - pi(a, 1 | z)
    upper += problem.mass(z) * (a.upper / pa - (p1 - a.upper) / pb);
    lower += problem.mass(z) * (a.lower / pa - (p1 - a.lower) / pb);
  }
  DisparityInterval out;
  out.measure = {MeasureKind::DD};
  out.pair = pair;
  out.lower = std::clamp(lower, -1.0, 1.0);
  out.upper = std::clamp(upper, -1.0, 1.0);
  return out;
}

DisparityInterval classification_interval_binary(const CombinedProblem& problem, Measure measure,
                                                 ClassPair pair) {
  if (measure.family() != MeasureFamily::Classification) {
    throw Error(ErrorCode::InvalidArgument, "expected a classification measure");
  }
  require_outcome_mode(problem, measure);
  if (measure.role_swap()) {
    DisparityInterval out =
        classification_interval_binary(swap_outcome_roles(problem), measure.unswapped(), pair);
    out.measure = measure;
    return out;
  }
  require_binary_pair(problem, pair);
  require_positive_priors(problem, pair);
  const int ys = measure.y_star();
  const int yh = measure.yhat_star();
  for (std::size_t alpha : {pair.a, pair.b}) {
    double reach = 0.0;
    for (std::size_t z = 0; z < problem.num_cells(); ++z) {
      reach += problem.mass(z) * std::min(problem.p_class(z, alpha), problem.p_y(z, ys));
    }
    if (!(reach > 0.0)) {
      throw Error(ErrorCode::ZeroDenominatorRisk,
                  "P(A=" + problem.class_labels()[alpha].name + ", Y=" + std::to_string(ys) +
                      ") is zero under every coupling");
    }
  }
  bool clamped = false;
  const double a_high = guarded_ratio(extreme_rate(problem, pair.a, yh, ys, true), clamped);
  const double a_low = guarded_ratio(extreme_rate(problem, pair.a, yh, ys, false), clamped);
  const double b_high = guarded_ratio(extreme_rate(problem, pair.b, yh, ys, true), clamped);
  const double b_low = guarded_ratio(extreme_rate(problem, pair.b, yh, ys, false), clamped);
  DisparityInterval out;
  out.measure = measure;
  out.pair = pair;
  out.lower = std::clamp(a_low - b_high, -1.0, 1.0);
  out.upper = std::clamp(a_high - b_low, -1.0, 1.0);
  out.denominator_clamped = clamped;
  return out;
}

IdentificationReport is_point_identified(const CombinedProblem& problem, Measure measure, double tol) {
  const bool classification = measure.family() == MeasureFamily::Classification;
  if (classification) require_outcome_mode(problem, measure);
  IdentificationReport report;
  for (std::size_t z = 0; z < problem.num_cells(); ++z) {
    const auto& row = problem.outcome().probs[z];
    bool outcome_degenerate;
    if (classification) {
      outcome_degenerate = degenerate(row.data(), 4, tol);
    } else {
      const double yhat[2] = {problem.p_yhat(z, 0), problem.p_yhat(z, 1)};
      outcome_degenerate = degenerate(yhat, 2, tol);
    }
    const double* classes = problem.classes().probs.data() + z * problem.num_classes();
    if (outcome_degenerate || degenerate(classes, problem.num_classes(), tol)) continue;
    report.violating_cells.push_back(z);
    report.violating_mass += problem.mass(z);
  }
  report.identified = report.violating_mass < tol;
  return report;
}

double ci_point_estimate(const CombinedProblem& problem, Measure measure, ClassPair pair) {
  require_outcome_mode(problem, measure);
  if (measure.role_swap()) return ci_point_estimate(swap_outcome_roles(problem), measure.unswapped(), pair);
  if (pair.a == pair.b || pair.a >= problem.num_classes() || pair.b >= problem.num_classes()) {
    throw Error(ErrorCode::InvalidArgument, "class pair must name two distinct classes");
  }
  const bool dd = measure.family() == MeasureFamily::Demographic;
  auto rate = [&](std::size_t alpha) {
    double numerator = 0.0, denominator = 0.0;
    for (std::size_t z = 0; z < problem.num_cells(); ++z) {
      const double w = problem.mass(z) * problem.p_class(z, alpha);
      if (dd) {
        numerator += w * problem.p_yhat(z, 1);
        denominator += w;
      } else {
        numerator += w * problem.p_joint(z, measure.yhat_star(), measure.y_star());
        denominator += w * problem.p_y(z, measure.y_star());
      }
    }
    if (!(denominator > 0.0)) {
      throw Error(ErrorCode::ZeroDenominator, "rate of class '" + problem.class_labels()[alpha].name +
                                                  "' has a zero denominator");
    }
    return numerator / denominator;
  };
  return rate(pair.a) - rate(pair.b);
}

}  // namespace dbounds
