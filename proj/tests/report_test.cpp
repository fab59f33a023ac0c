#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dbounds/error.hpp"
#include "dbounds/report.hpp"

using namespace dbounds;

namespace {

Report sample_report() {
  Report r;
  r.problem_digest = "0123456789abcdef";
  r.measures.push_back({"DD", "white/black", -0.5555555555555556, 0.5555555555555556, "closed_form", "none", 0.0});
  r.measures.push_back({"TPRD", "white/black", -0.1, 0.3, "fractional_grid", "lipschitz(L=0.4)", 1e-4});
  PolygonRecord p;
  p.measure = "DD";
  p.pairs = {"white/black", "white/hispanic"};
  p.vertices = {{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}};
  p.n_directions = 64;
  r.polygons.push_back(p);
  p.constraints = "lipschitz(L=0.4)";
  p.vertices = {{-0.25, -0.25}, {0.25, -0.25}, {0.25, 0.25}};
  p.reference = Point2{0.1, 0.2};
  r.polygons.push_back(p);
  r.diagnostics.entropy_class = -0.3250829733914482;
  r.diagnostics.entropy_outcome = -0.6931471805599453;
  r.diagnostics.identified = {{"DD", false}, {"TPRD", true}};
  r.diagnostics.dropped_mass = 0.125;
  r.diagnostics.L_min = 0.4000005722;
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("dbounds_report_" + name);
  std::filesystem::remove_all(dir);
  return dir.string();
}

TEST(Report, JsonRoundTrip) {
  const auto r = sample_report();
  EXPECT_EQ(report_from_json(nlohmann::json::parse(to_json(r).dump())), r);
  Report bare = r;
  bare.diagnostics.L_min.reset();
  bare.polygons.clear();
  EXPECT_EQ(report_from_json(nlohmann::json::parse(to_json(bare).dump(2))), bare);
}

TEST(Report, JsonHasSchemaFields) {
  const auto j = to_json(sample_report());
  for (const char* k : {"problem_digest", "measures", "polygons", "diagnostics"}) EXPECT_TRUE(j.contains(k)) << k;
  for (const char* k : {"measure", "pair", "lower", "upper", "method", "constraints", "gap_hint"}) {
    EXPECT_TRUE(j["measures"][0].contains(k)) << k;
  }
  for (const char* k : {"measure", "pairs", "vertices", "n_directions", "constraints"}) {
    EXPECT_TRUE(j["polygons"][0].contains(k)) << k;
  }
  for (const char* k : {"entropy_class", "entropy_outcome", "identified", "dropped_mass", "L_min"}) {
    EXPECT_TRUE(j["diagnostics"].contains(k)) << k;
  }
}

TEST(Report, MalformedJsonIsConfigError) {
  auto j = to_json(sample_report());
  j.erase("measures");
  try {
    report_from_json(j);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigError);
  }
}

TEST(Report, IntervalCsvHeader) {
  const auto csv = render_interval_csv(sample_report());
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "measure,pair,lower,upper,method");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

TEST(Report, PolygonCsvRows) {
  const auto csv = render_polygon_csv(sample_report().polygons[0]);
  EXPECT_EQ(csv, "x,y\n-0.5,-0.5\n0.5,-0.5\n0.5,0.5\n-0.5,0.5\n");
}

TEST(Report, SvgHasOnePathPerConstraintConfiguration) {
  const auto r = sample_report();
  const auto svg = render_svg(r.polygons);
  std::size_t paths = 0;
  for (std::size_t pos = 0; (pos = svg.find("<path ", pos)) != std::string::npos; ++pos) ++paths;
  EXPECT_EQ(paths, 2u);
  EXPECT_NE(svg.find("viewBox=\"-1 -1 2 2\""), std::string::npos);
  EXPECT_NE(svg.find("width=\"512\""), std::string::npos);
  EXPECT_NE(svg.find("<circle"), std::string::npos);
  EXPECT_NE(svg.find("DD white/black"), std::string::npos);
  EXPECT_EQ(svg, render_svg(r.polygons));
}

TEST(Report, EmitWritesEveryFormat) {
  const auto dir = temp_dir("all");
  const auto r = sample_report();
  const auto json_files = emit(r, Format::Json, dir);
  ASSERT_EQ(json_files.size(), 1u);
  EXPECT_EQ(report_from_json(nlohmann::json::parse(slurp(json_files[0]))), r);
  const auto csv_files = emit(r, Format::Csv, dir);
  EXPECT_EQ(csv_files.size(), 3u);  // intervals + two polygons
  const auto svg_files = emit(r, Format::Svg, dir);
  EXPECT_EQ(svg_files.size(), 1u);  // both polygons share measure and axes
  std::filesystem::remove_all(dir);
}

TEST(Report, EmptyReportIsRejected) {
  try {
    emit(Report{}, Format::Json, temp_dir("empty"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyReport);
  }
}

TEST(Report, UnwritableDirectoryIsIoError) {
  const auto blocker = temp_dir("blocker");
  std::ofstream(blocker) << "file, not a directory";
  try {
    emit(sample_report(), Format::Json, blocker + "/sub");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
  }
  std::filesystem::remove(blocker);
}

TEST(Report, ParseFormat) {
  EXPECT_EQ(parse_format("JSON"), Format::Json);
  EXPECT_EQ(parse_format("svg"), Format::Svg);
  EXPECT_THROW(parse_format("pdf"), Error);
}

}  // namespace
