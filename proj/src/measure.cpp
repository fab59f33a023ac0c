#include "dbounds/measure.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "dbounds/error.hpp"

namespace dbounds {

namespace {

std::string upper_case(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::toupper(c); });
  return out;
}

}  // namespace

std::string_view measure_name(Measure m) {
  switch (m.kind) {
    case MeasureKind::DD: return "DD";
    case MeasureKind::TPRD: return "TPRD";
    case MeasureKind::TNRD: return "TNRD";
    case MeasureKind::PPVD: return "PPVD";
    case MeasureKind::NPVD: return "NPVD";
  }
  return "?";
}

Measure parse_measure(std::string_view name) {
  const std::string u = upper_case(name);
  for (MeasureKind k : {MeasureKind::DD, MeasureKind::TPRD, MeasureKind::TNRD, MeasureKind::PPVD,
                        MeasureKind::NPVD}) {
    if (measure_name({k}) == u) return {k};
  }
  throw Error(ErrorCode::ConfigError, "unknown measure '" + std::string(name) + "'");
}

std::string_view method_name(Method m) {
  switch (m) {
    case Method::ClosedForm: return "closed_form";
    case Method::LP: return "lp";
    case Method::FractionalGrid: return "fractional_grid";
    case Method::Oracle: return "oracle";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::ClosedForm, Method::LP, Method::FractionalGrid, Method::Oracle}) {
    if (method_name(m) == name) return m;
  }
  throw Error(ErrorCode::ParseError, "unknown method '" + std::string(name) + "'");
}

}  // namespace dbounds
