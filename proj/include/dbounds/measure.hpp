#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace dbounds {

enum class MeasureKind { DD, TPRD, TNRD, PPVD, NPVD };

enum class MeasureFamily { Demographic, Classification };

/// A disparity measure. Classification measures condition on the event
/// (Yhat = yhat_star, Y = y_star); PPVD and NPVD are TPRD and TNRD evaluated
/// with the decision and outcome axes exchanged.
struct Measure {
  MeasureKind kind = MeasureKind::DD;

  MeasureFamily family() const {
    return kind == MeasureKind::DD ? MeasureFamily::Demographic : MeasureFamily::Classification;
  }
  int yhat_star() const { return (kind == MeasureKind::TNRD || kind == MeasureKind::NPVD) ? 0 : 1; }
  int y_star() const { return yhat_star(); }
  bool role_swap() const { return kind == MeasureKind::PPVD || kind == MeasureKind::NPVD; }
  /// The measure evaluated on the role-swapped problem (PPVD -> TPRD).
  Measure unswapped() const {
    if (kind == MeasureKind::PPVD) return {MeasureKind::TPRD};
    if (kind == MeasureKind::NPVD) return {MeasureKind::TNRD};
    return *this;
  }

  friend bool operator==(const Measure&, const Measure&) = default;
};

std::string_view measure_name(Measure m);
/// Parses "DD", "TPRD", ... (case-insensitive); throws Error(ConfigError).
Measure parse_measure(std::string_view name);

enum class Method { ClosedForm, LP, FractionalGrid, Oracle };

std::string_view method_name(Method m);
Method parse_method(std::string_view name);

/// Ordered pair of class indices; the disparity is mu(a) - mu(b).
struct ClassPair {
  std::size_t a = 0;
  std::size_t b = 1;

  friend bool operator==(const ClassPair&, const ClassPair&) = default;
};

struct DisparityInterval {
  Measure measure;
  ClassPair pair;
  double lower = 0.0;
  double upper = 0.0;
  Method method = Method::ClosedForm;
  /// Largest objective variation next to the grid incumbent (grid methods).
  double gap_hint = 0.0;
  /// Set when a ratio denominator was clamped away from zero.
  bool denominator_clamped = false;

  double width() const { return upper - lower; }
  bool contains(double v, double tol = 0.0) const { return v >= lower - tol && v <= upper + tol; }
};

}  // namespace dbounds
