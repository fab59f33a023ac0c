#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "dbounds/geometry.hpp"
#include "dbounds/measure.hpp"

namespace dbounds {

/// One interval row. Pairs are written "a/b" with class names.
struct IntervalRecord {
  std::string measure;
  std::string pair;
  double lower = 0.0;
  double upper = 0.0;
  std::string method;
  std::string constraints = "none";
  double gap_hint = 0.0;

  friend bool operator==(const IntervalRecord&, const IntervalRecord&) = default;
};

struct PolygonRecord {
  std::string measure;
  std::array<std::string, 2> pairs;  // x axis, y axis
  std::vector<Point2> vertices;
  std::size_t n_directions = 0;
  std::string constraints = "none";
  /// Optional marker, e.g. the conditional-independence point estimate.
  std::optional<Point2> reference;

  friend bool operator==(const PolygonRecord&, const PolygonRecord&) = default;
};

struct Diagnostics {
  double entropy_class = 0.0;
  double entropy_outcome = 0.0;
  std::map<std::string, bool> identified;  // by measure name
  double dropped_mass = 0.0;
  std::optional<double> L_min;

  friend bool operator==(const Diagnostics&, const Diagnostics&) = default;
};

struct Report {
  std::string problem_digest;
  std::vector<IntervalRecord> measures;
  std::vector<PolygonRecord> polygons;
  Diagnostics diagnostics;

  friend bool operator==(const Report&, const Report&) = default;
};

std::string pair_label(const std::vector<std::string>& class_names, ClassPair pair);
IntervalRecord make_record(const DisparityInterval& iv, const std::vector<std::string>& class_names,
                           std::string constraints = "none");

nlohmann::json to_json(const Report& report);
/// Throws Error(ConfigError) on a malformed document.
Report report_from_json(const nlohmann::json& j);

enum class Format { Json, Csv, Svg };

Format parse_format(std::string_view name);

/// Interval rows under the header `measure,pair,lower,upper,method`.
std::string render_interval_csv(const Report& report);
/// `x,y` vertex rows.
std::string render_polygon_csv(const PolygonRecord& polygon);
/// One closed path per polygon; all polygons share measure and axes.
std::string render_svg(const std::vector<PolygonRecord>& polygons);

/// Writes the report in `format` under `dir` (created if missing) and
/// returns the written paths in a fixed order:
///   json -> report.json
///   csv  -> intervals.csv, polygon_<measure>_<x>_<y>_<k>.csv
///   svg  -> hull_<measure>_<x>_<y>.svg, one per measure and axis pair
/// Throws Error(EmptyReport) with no intervals and no polygons, and
/// Error(IoError) when a file cannot be written.
std::vector<std::string> emit(const Report& report, Format format, const std::string& dir);

}  // namespace dbounds
