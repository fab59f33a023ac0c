#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dbounds/distributions.hpp"
#include "dbounds/lipschitz.hpp"
#include "dbounds/measure.hpp"
#include "dbounds/support_class.hpp"

namespace dbounds {

using Point2 = std::array<double, 2>;

/// Support values h(rho) over unit directions in the plane of the
/// disparities (mu(a) - mu(b1), mu(a) - mu(b2)), a being the reference class.
struct SupportProfile {
  Measure measure;
  std::size_t b1 = 1;
  std::size_t b2 = 2;
  std::vector<Point2> directions;
  std::vector<double> values;
  /// "none" or a description of the smoothness constraint.
  std::string constraints = "none";
};

struct Halfplane {
  Point2 normal;
  double offset = 0.0;  // normal . v <= offset
};

/// Convex polygon, counterclockwise. May degenerate to a segment or point.
struct HullPolygon {
  std::vector<Point2> vertices;
  std::vector<Halfplane> halfplanes;
};

/// Evaluates the support function at n evenly spaced directions
/// theta_k = 2 pi k / n. Other classes get zero weight, so with more than
/// three classes the result is the projection onto the (b1, b2) plane.
SupportProfile sweep(const CombinedProblem& problem, Measure measure, std::size_t n_directions = 64,
                     const std::optional<LipschitzSpec>& lip = std::nullopt, const GridSpec& grid = {},
                     int threads = 1, std::size_t b1 = 1, std::size_t b2 = 2);

/// Intersects the halfplanes rho . v <= h(rho) with the box [-1, 1]^2.
/// Throws Error(DegenerateProfile) if the intersection is empty.
HullPolygon polygon_from_support(const SupportProfile& profile);

/// Shoelace area.
double polygon_area(const HullPolygon& polygon);

/// Largest distance between two vertices.
double polygon_diameter(const HullPolygon& polygon);

/// True if `p` satisfies every halfplane within `slack`.
bool polygon_contains(const HullPolygon& polygon, Point2 p, double slack = 1e-9);

}  // namespace dbounds
