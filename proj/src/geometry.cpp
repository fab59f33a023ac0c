#include "dbounds/geometry.hpp"

#include <cmath>
#include <numbers>

#include "dbounds/error.hpp"
#include "dbounds/parallel.hpp"
#include "dbounds/support_dd.hpp"

namespace dbounds {

namespace {

constexpr double kClipSlack = 1e-9;

std::string describe(const std::optional<LipschitzSpec>& lip) {
  if (!lip) return "none";
  char buf[64];
  std::snprintf(buf, sizeof buf, "lipschitz(L=%.9g)", lip->L);
  return buf;
}

// One Sutherland-Hodgman step: keeps the part of a convex polygon with
// n . v <= h.
std::vector<Point2> clip(const std::vector<Point2>& poly, const Halfplane& hp) {
  std::vector<Point2> out;
  const std::size_t n = poly.size();
  auto side = [&](const Point2& v) { return hp.normal[0] * v[0] + hp.normal[1] * v[1] - hp.offset; };
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& cur = poly[i];
    const Point2& next = poly[(i + 1) % n];
    const double sc = side(cur), sn = side(next);
    if (sc <= 0.0) out.push_back(cur);
    if ((sc < 0.0 && sn > 0.0) || (sc > 0.0 && sn < 0.0)) {
      const double t = sc / (sc - sn);
      out.push_back({cur[0] + t * (next[0] - cur[0]), cur[1] + t * (next[1] - cur[1])});
    }
  }
  return out;
}

std::vector<Point2> dedupe(const std::vector<Point2>& poly) {
  std::vector<Point2> out;
  for (const auto& v : poly) {
    if (!out.empty() && std::abs(v[0] - out.back()[0]) <= 1e-12 && std::abs(v[1] - out.back()[1]) <= 1e-12) continue;
    out.push_back(v);
  }
  while (out.size() > 1 && std::abs(out.front()[0] - out.back()[0]) <= 1e-12 &&
         std::abs(out.front()[1] - out.back()[1]) <= 1e-12) {
    out.pop_back();
  }
  return out;
}

}  // namespace

SupportProfile sweep(const CombinedProblem& problem, Measure measure, std::size_t n_directions,
                     const std::optional<LipschitzSpec>& lip, const GridSpec& grid, int threads, std::size_t b1,
                     std::size_t b2) {
  const std::size_t K = problem.num_classes();
  if (K < 3) throw Error(ErrorCode::WrongClassCount, "hull sweeps need at least 3 classes");
  if (b1 == 0 || b2 == 0 || b1 == b2 || b1 >= K || b2 >= K) {
    throw Error(ErrorCode::InvalidArgument, "sweep axes must be two distinct non-reference classes");
  }
  if (n_directions < 8) throw Error(ErrorCode::InvalidArgument, "a sweep needs at least 8 directions");
  const auto fixed = resolve_lipschitz(problem, lip);

  SupportProfile profile;
  profile.measure = measure;
  profile.b1 = b1;
  profile.b2 = b2;
  profile.constraints = describe(fixed);
  profile.directions.resize(n_directions);
  profile.values.resize(n_directions);
  for (std::size_t k = 0; k < n_directions; ++k) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_directions);
    profile.directions[k] = {std::cos(theta), std::sin(theta)};
  }
  parallel_for(n_directions, threads, [&](std::size_t k) {
    std::vector<double> rho(K - 1, 0.0);
    rho[b1 - 1] = profile.directions[k][0];
    rho[b2 - 1] = profile.directions[k][1];
    if (measure.family() == MeasureFamily::Demographic) {
      profile.values[k] = dd_support(problem, rho, fixed).value;
    } else {
      profile.values[k] = class_support(problem, measure, rho, grid, fixed, 1).value;
    }
  });
  return profile;
}

HullPolygon polygon_from_support(const SupportProfile& profile) {
  if (profile.directions.size() != profile.values.size() || profile.directions.size() < 3) {
    throw Error(ErrorCode::DegenerateProfile, "a profile needs at least 3 directions with values");
  }
  HullPolygon out;
  std::vector<Point2> poly{{-1.0, -1.0}, {1.0, -1.0}, {1.0, 1.0}, {-1.0, 1.0}};
  for (std::size_t k = 0; k < profile.directions.size(); ++k) {
    if (!std::isfinite(profile.values[k])) throw Error(ErrorCode::DegenerateProfile, "non-finite support value");
    Halfplane hp{profile.directions[k], profile.values[k]};
    out.halfplanes.push_back(hp);
    hp.offset += kClipSlack;
    poly = clip(poly, hp);
    if (poly.empty()) {
      throw Error(ErrorCode::DegenerateProfile, "support halfplanes have an empty intersection");
    }
  }
  out.vertices = dedupe(poly);
  return out;
}

double polygon_area(const HullPolygon& polygon) {
  const auto& v = polygon.vertices;
  double twice = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& p = v[i];
    const auto& q = v[(i + 1) % v.size()];
    twice += p[0] * q[1] - q[0] * p[1];
  }
  return 0.5 * std::abs(twice);
}

double polygon_diameter(const HullPolygon& polygon) {
  double d = 0.0;
  for (const auto& p : polygon.vertices) {
    for (const auto& q : polygon.vertices) d = std::max(d, std::hypot(p[0] - q[0], p[1] - q[1]));
  }
  return d;
}

bool polygon_contains(const HullPolygon& polygon, Point2 p, double slack) {
  for (const auto& hp : polygon.halfplanes) {
    if (hp.normal[0] * p[0] + hp.normal[1] * p[1] > hp.offset + slack) return false;
  }
  return std::abs(p[0]) <= 1.0 + slack && std::abs(p[1]) <= 1.0 + slack;
}

}  // namespace dbounds
