#include "dbounds/report.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "dbounds/error.hpp"

namespace dbounds {

namespace {

using nlohmann::json;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  // Avoid "-0.000000" so equal pictures are byte-identical.
  if (std::string(buf) == "-0.000000") return "0.000000";
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// File-name safe slug.
std::string slug(const std::string& s) {
  std::string out;
  for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '-';
  return out;
}

std::string axis_class(const std::string& pair) {
  const auto slash = pair.find('/');
  return slash == std::string::npos ? pair : pair.substr(slash + 1);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out << content;
  if (!out.flush()) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

template <class T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorCode::ConfigError, std::string("report is missing '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("bad report field '") + key + "': " + e.what());
  }
}

json point_json(const Point2& p) { return json::array({p[0], p[1]}); }

Point2 point_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::ConfigError, "a point must be [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

std::string pair_label(const std::vector<std::string>& class_names, ClassPair pair) {
  return class_names.at(pair.a) + "/" + class_names.at(pair.b);
}

IntervalRecord make_record(const DisparityInterval& iv, const std::vector<std::string>& class_names,
                           std::string constraints) {
  IntervalRecord r;
  r.measure = std::string(measure_name(iv.measure));
  r.pair = pair_label(class_names, iv.pair);
  r.lower = iv.lower;
  r.upper = iv.upper;
  r.method = std::string(method_name(iv.method));
  r.constraints = std::move(constraints);
  r.gap_hint = iv.gap_hint;
  return r;
}

json to_json(const Report& report) {
  json j;
  j["problem_digest"] = report.problem_digest;
  j["measures"] = json::array();
  for (const auto& m : report.measures) {
    j["measures"].push_back({{"measure", m.measure},
                             {"pair", m.pair},
                             {"lower", m.lower},
                             {"upper", m.upper},
                             {"method", m.method},
                             {"constraints", m.constraints},
                             {"gap_hint", m.gap_hint}});
  }
  j["polygons"] = json::array();
  for (const auto& p : report.polygons) {
    json verts = json::array();
    for (const auto& v : p.vertices) verts.push_back(point_json(v));
    json entry{{"measure", p.measure},
               {"pairs", json::array({p.pairs[0], p.pairs[1]})},
               {"vertices", verts},
               {"n_directions", p.n_directions},
               {"constraints", p.constraints}};
    entry["reference"] = p.reference ? point_json(*p.reference) : json(nullptr);
    j["polygons"].push_back(entry);
  }
  const auto& d = report.diagnostics;
  j["diagnostics"] = {{"entropy_class", d.entropy_class},
                      {"entropy_outcome", d.entropy_outcome},
                      {"identified", d.identified},
                      {"dropped_mass", d.dropped_mass},
                      {"L_min", d.L_min ? json(*d.L_min) : json(nullptr)}};
  return j;
}

Report report_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "report must be a JSON object");
  Report r;
  r.problem_digest = field<std::string>(j, "problem_digest");
  for (const auto& m : field<json>(j, "measures")) {
    IntervalRecord rec;
    rec.measure = field<std::string>(m, "measure");
    rec.pair = field<std::string>(m, "pair");
    rec.lower = field<double>(m, "lower");
    rec.upper = field<double>(m, "upper");
    rec.method = field<std::string>(m, "method");
    rec.constraints = field<std::string>(m, "constraints");
    rec.gap_hint = field<double>(m, "gap_hint");
    r.measures.push_back(std::move(rec));
  }
  for (const auto& p : field<json>(j, "polygons")) {
    PolygonRecord rec;
    rec.measure = field<std::string>(p, "measure");
    const auto pairs = field<std::vector<std::string>>(p, "pairs");
    if (pairs.size() != 2) throw Error(ErrorCode::ConfigError, "a polygon needs two axis pairs");
    rec.pairs = {pairs[0], pairs[1]};
    for (const auto& v : field<json>(p, "vertices")) rec.vertices.push_back(point_from(v));
    rec.n_directions = field<std::size_t>(p, "n_directions");
    rec.constraints = field<std::string>(p, "constraints");
    if (p.contains("reference") && !p["reference"].is_null()) rec.reference = point_from(p["reference"]);
    r.polygons.push_back(std::move(rec));
  }
  const auto d = field<json>(j, "diagnostics");
  r.diagnostics.entropy_class = field<double>(d, "entropy_class");
  r.diagnostics.entropy_outcome = field<double>(d, "entropy_outcome");
  r.diagnostics.identified = field<std::map<std::string, bool>>(d, "identified");
  r.diagnostics.dropped_mass = field<double>(d, "dropped_mass");
  if (d.contains("L_min") && !d["L_min"].is_null()) r.diagnostics.L_min = field<double>(d, "L_min");
  return r;
}

Format parse_format(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "json") return Format::Json;
  if (lower == "csv") return Format::Csv;
  if (lower == "svg") return Format::Svg;
  throw Error(ErrorCode::ConfigError, "unknown output format '" + std::string(name) + "'");
}

std::string render_interval_csv(const Report& report) {
  std::string out = "measure,pair,lower,upper,method\n";
  for (const auto& m : report.measures) {
    out += csv_field(m.measure) + "," + csv_field(m.pair) + "," + num(m.lower) + "," + num(m.upper) + "," +
           csv_field(m.method) + "\n";
  }
  return out;
}

std::string render_polygon_csv(const PolygonRecord& polygon) {
  std::string out = "x,y\n";
  for (const auto& v : polygon.vertices) out += num(v[0]) + "," + num(v[1]) + "\n";
  return out;
}

std::string render_svg(const std::vector<PolygonRecord>& polygons) {
  if (polygons.empty()) throw Error(ErrorCode::EmptyReport, "no polygon to draw");
  static const char* kColors[] = {"#1f5fa8", "#c0392b", "#2e8b57", "#8e44ad"};
  const auto& first = polygons.front();
  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"512\" height=\"512\" viewBox=\"-1 -1 2 2\">\n";
  s += "<rect x=\"-1\" y=\"-1\" width=\"2\" height=\"2\" fill=\"white\"/>\n";
  // Plot coordinates: y grows upward, so every drawn y is negated.
  s += "<g stroke=\"#dddddd\" stroke-width=\"0.004\">\n";
  for (int i = -4; i <= 4; ++i) {
    const std::string t = fixed6(0.25 * i);
    s += "<line x1=\"" + t + "\" y1=\"-1\" x2=\"" + t + "\" y2=\"1\"/>\n";
    s += "<line x1=\"-1\" y1=\"" + t + "\" x2=\"1\" y2=\"" + t + "\"/>\n";
  }
  s += "</g>\n";
  s += "<g stroke=\"#444444\" stroke-width=\"0.006\">\n";
  s += "<line x1=\"-1\" y1=\"0\" x2=\"1\" y2=\"0\"/>\n<line x1=\"0\" y1=\"-1\" x2=\"0\" y2=\"1\"/>\n</g>\n";
  s += "<g font-family=\"sans-serif\" font-size=\"0.07\" fill=\"#222222\">\n";
  s += "<text x=\"0.97\" y=\"-0.03\" text-anchor=\"end\">" + xml_escape(first.measure + " " + first.pairs[0]) + "</text>\n";
  s += "<text x=\"0.03\" y=\"-0.97\" transform=\"rotate(90 0.03 -0.97)\">" +
       xml_escape(first.measure + " " + first.pairs[1]) + "</text>\n";
  s += "</g>\n";
  for (std::size_t k = 0; k < polygons.size(); ++k) {
    const auto& p = polygons[k];
    std::string d;
    for (std::size_t i = 0; i < p.vertices.size(); ++i) {
      d += (i == 0 ? "M " : " L ") + fixed6(p.vertices[i][0]) + " " + fixed6(-p.vertices[i][1]);
    }
    d += " Z";
    s += "<path d=\"" + d + "\" fill=\"none\" stroke=\"" + kColors[k % 4] +
         "\" stroke-width=\"0.01\" stroke-linejoin=\"round\"><title>" + xml_escape(p.constraints) + "</title></path>\n";
  }
  for (const auto& p : polygons) {
    if (!p.reference) continue;
    s += "<circle cx=\"" + fixed6((*p.reference)[0]) + "\" cy=\"" + fixed6(-(*p.reference)[1]) +
         "\" r=\"0.015\" fill=\"#222222\"/>\n";
    break;
  }
  s += "</svg>\n";
  return s;
}

std::vector<std::string> emit(const Report& report, Format format, const std::string& dir) {
  if (report.measures.empty() && report.polygons.empty()) {
    throw Error(ErrorCode::EmptyReport, "the report has no intervals and no polygons");
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir + ": " + ec.message());
  const std::filesystem::path root(dir);
  std::vector<std::string> written;
  auto put = [&](const std::string& name, const std::string& content) {
    write_file(root / name, content);
    written.push_back((root / name).string());
  };

  switch (format) {
    case Format::Json:
      put("report.json", to_json(report).dump(2) + "\n");
      break;
    case Format::Csv: {
      if (!report.measures.empty()) put("intervals.csv", render_interval_csv(report));
      std::map<std::string, int> seen;
      for (const auto& p : report.polygons) {
        const std::string stem = "polygon_" + slug(p.measure) + "_" + slug(axis_class(p.pairs[0])) + "_" +
                                 slug(axis_class(p.pairs[1]));
        put(stem + "_" + std::to_string(seen[stem]++) + ".csv", render_polygon_csv(p));
      }
      break;
    }
    case Format::Svg: {
      // Group by measure and axes, keeping first-appearance order.
      std::vector<std::string> order;
      std::map<std::string, std::vector<PolygonRecord>> groups;
      for (const auto& p : report.polygons) {
        const std::string key =
            slug(p.measure) + "_" + slug(axis_class(p.pairs[0])) + "_" + slug(axis_class(p.pairs[1]));
        if (!groups.count(key)) order.push_back(key);
        groups[key].push_back(p);
      }
      for (const auto& key : order) put("hull_" + key + ".svg", render_svg(groups[key]));
      break;
    }
  }
  return written;
}

}  // namespace dbounds
