#include "dbounds/audit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "dbounds/closed_form.hpp"
#include "dbounds/geometry.hpp"
#include "dbounds/support_dd.hpp"

namespace dbounds {

namespace {

using nlohmann::json;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void event(const RunOptions& o, const std::string& line) {
  if (o.events) *o.events << "event=" << line << "\n" << std::flush;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::optional<LipschitzSpec> lipschitz_spec(const AuditConfig& c) {
  if (c.lipschitz == AuditConfig::LipMode::Off) return std::nullopt;
  LipschitzSpec s;
  s.mode = c.lipschitz == AuditConfig::LipMode::Minimal ? LipschitzSpec::Mode::Minimal : LipschitzSpec::Mode::Fixed;
  s.L = c.L;
  s.weights = c.metric_weights;
  return s;
}

std::vector<std::string> class_names(const CombinedProblem& p) {
  std::vector<std::string> out;
  for (const auto& l : p.class_labels()) out.push_back(l.name);
  return out;
}

std::string describe(const LipschitzSpec& lip) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "lipschitz(L=%.9g)", lip.L);
  return buf;
}

std::vector<Measure> distinct_measures(const AuditConfig& c) {
  std::vector<Measure> out;
  for (const auto& r : c.measures) {
    if (std::find(out.begin(), out.end(), r.measure) == out.end()) out.push_back(r.measure);
  }
  return out;
}

// Unconstrained interval: exact closed forms for two classes, LP or grid otherwise.
DisparityInterval free_interval(const CombinedProblem& p, Measure m, ClassPair pair, const AuditConfig& c,
                                int threads) {
  const bool binary = p.num_classes() == 2;
  if (m.family() == MeasureFamily::Demographic) {
    return binary ? dd_interval_binary(p, pair) : dd_interval_lp(p, pair);
  }
  return binary ? classification_interval_binary(p, m, pair) : class_interval(p, m, pair, c.grid, std::nullopt, threads);
}

DisparityInterval lip_interval(const CombinedProblem& p, Measure m, ClassPair pair, const AuditConfig& c,
                               const LipschitzSpec& lip, int threads) {
  if (m.family() == MeasureFamily::Demographic) return dd_interval_lp(p, pair, lip);
  return class_interval(p, m, pair, c.grid, lip, threads);
}

// Fixed-mode spec with Minimal resolved once; L_min is reported when asked for.
std::optional<LipschitzSpec> resolved_lipschitz(const CombinedProblem& p, const AuditConfig& c,
                                                std::optional<double>* l_min, const RunOptions& o) {
  auto lip = lipschitz_spec(c);
  if (!lip) return lip;
  if (lip->mode == LipschitzSpec::Mode::Minimal) {
    lip->L = minimal_lipschitz(p, lip->weights);
    lip->mode = LipschitzSpec::Mode::Fixed;
    if (l_min) *l_min = lip->L;
    event(o, "lipschitz L_min=" + num(lip->L));
  }
  return lip;
}

void validate_modes(const CombinedProblem& p, const AuditConfig& c) {
  for (const auto& m : distinct_measures(c)) require_outcome_mode(p, m);
}

std::vector<PolygonRecord> polygons(const CombinedProblem& p, const AuditConfig& c,
                                    const std::optional<LipschitzSpec>& lip, const RunOptions& o) {
  std::vector<PolygonRecord> out;
  const std::size_t K = p.num_classes();
  if (K < 3) return out;
  const auto names = class_names(p);
  for (const auto& m : distinct_measures(c)) {
    for (std::size_t b1 = 1; b1 < K; ++b1) {
      for (std::size_t b2 = b1 + 1; b2 < K; ++b2) {
        std::optional<Point2> reference;
        try {
          reference = Point2{ci_point_estimate(p, m, {0, b1}), ci_point_estimate(p, m, {0, b2})};
        } catch (const Error&) {
          // No marker when the estimate is undefined.
        }
        std::vector<std::optional<LipschitzSpec>> configs{std::nullopt};
        if (lip) configs.push_back(lip);
        for (const auto& cfg : configs) {
          const auto profile = sweep(p, m, c.directions, cfg, c.grid, o.threads, b1, b2);
          PolygonRecord rec;
          rec.measure = std::string(measure_name(m));
          rec.pairs = {pair_label(names, {0, b1}), pair_label(names, {0, b2})};
          rec.vertices = polygon_from_support(profile).vertices;
          rec.n_directions = c.directions;
          rec.constraints = profile.constraints;
          rec.reference = reference;
          event(o, "polygon measure=" + rec.measure + " x=" + rec.pairs[0] + " y=" + rec.pairs[1] +
                       " constraints=" + rec.constraints + " vertices=" + std::to_string(rec.vertices.size()));
          out.push_back(std::move(rec));
        }
      }
    }
  }
  return out;
}

template <class Body>
int guarded(const RunOptions& o, Body body) {
  try {
    return body();
  } catch (const Error& e) {
    event(o, "error code=" + std::string(error_code_name(e.code())) + " message=" + quoted(e.what()));
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    event(o, "error code=Internal message=" + quoted(e.what()));
    return 3;
  }
}

}  // namespace

AuditConfig AuditConfig::from_json(const json& j, const std::string& base_dir) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "config must be a JSON object");
  AuditConfig c;
  try {
    if (!j.contains("schema")) throw Error(ErrorCode::ConfigError, "config needs a 'schema'");
    const auto& s = j.at("schema");
    if (s.is_string()) {
      std::filesystem::path path(s.get<std::string>());
      if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
      c.schema = Schema::load(path.string());
    } else {
      c.schema = Schema::from_json(s);
    }

    if (!j.contains("measures") || !j.at("measures").is_array() || j.at("measures").empty()) {
      throw Error(ErrorCode::ConfigError, "config needs at least one measure");
    }
    for (const auto& m : j.at("measures")) {
      MeasureRequest req;
      if (m.is_string()) {
        req.measure = parse_measure(m.get<std::string>());
      } else {
        req.measure = parse_measure(m.at("measure").get<std::string>());
        if (m.contains("pairs")) {
          for (const auto& pr : m.at("pairs")) {
            const auto v = pr.get<std::vector<std::string>>();
            if (v.size() != 2) throw Error(ErrorCode::ConfigError, "a pair must list two classes");
            req.pairs.emplace_back(v[0], v[1]);
          }
        }
      }
      c.measures.push_back(std::move(req));
    }

    if (j.contains("lipschitz")) {
      const auto& l = j.at("lipschitz");
      if (l.is_string()) {
        const auto mode = l.get<std::string>();
        if (mode == "off") c.lipschitz = LipMode::Off;
        else if (mode == "minimal") c.lipschitz = LipMode::Minimal;
        else throw Error(ErrorCode::ConfigError, "lipschitz must be off, minimal or an object");
      } else if (l.is_number()) {
        c.lipschitz = LipMode::Fixed;
        c.L = l.get<double>();
      } else if (l.is_object()) {
        const std::string mode = l.value("mode", std::string(l.contains("L") ? "fixed" : "minimal"));
        if (mode == "fixed") c.lipschitz = LipMode::Fixed;
        else if (mode == "minimal") c.lipschitz = LipMode::Minimal;
        else if (mode == "off") c.lipschitz = LipMode::Off;
        else throw Error(ErrorCode::ConfigError, "unknown lipschitz mode '" + mode + "'");
        if (l.contains("L")) c.L = l.at("L").get<double>();
        if (l.contains("weights")) c.metric_weights = l.at("weights").get<std::vector<double>>();
      } else {
        throw Error(ErrorCode::ConfigError, "lipschitz must be off, minimal or an object");
      }
      if (c.lipschitz == LipMode::Fixed && !(c.L >= 0.0 && std::isfinite(c.L))) {
        throw Error(ErrorCode::ConfigError, "Lipschitz constant must be finite and non-negative");
      }
    }

    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      if (g.contains("resolution")) c.grid.resolution = g.at("resolution").get<std::size_t>();
      if (g.contains("refine_rounds")) c.grid.refine_rounds = g.at("refine_rounds").get<std::size_t>();
      if (c.grid.resolution && *c.grid.resolution < 2) {
        throw Error(ErrorCode::ConfigError, "grid resolution must be at least 2");
      }
    }
    if (j.contains("directions")) c.directions = j.at("directions").get<std::size_t>();
    if (c.directions < 8) throw Error(ErrorCode::ConfigError, "directions must be at least 8");

    if (j.contains("output")) {
      const auto& out = j.at("output");
      if (out.contains("dir")) c.out_dir = out.at("dir").get<std::string>();
      if (out.contains("formats")) {
        c.formats.clear();
        for (const auto& f : out.at("formats")) c.formats.push_back(parse_format(f.get<std::string>()));
      }
    }
    if (j.contains("alignment")) {
      const auto a = j.at("alignment").get<std::string>();
      if (a == "intersect") c.alignment = AlignPolicy::IntersectRenormalize;
      else if (a == "strict") c.alignment = AlignPolicy::ErrorOnMismatch;
      else throw Error(ErrorCode::ConfigError, "alignment must be intersect or strict");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("config: ") + e.what());
  }
  return c;
}

AuditConfig AuditConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, "config " + path + ": " + e.what());
  }
  return from_json(j, std::filesystem::path(path).parent_path().string());
}

std::vector<std::pair<Measure, ClassPair>> AuditConfig::jobs(const CombinedProblem& problem) const {
  std::vector<std::pair<Measure, ClassPair>> out;
  for (const auto& req : measures) {
    if (req.pairs.empty()) {
      for (std::size_t b = 1; b < problem.num_classes(); ++b) out.push_back({req.measure, {0, b}});
      continue;
    }
    for (const auto& [a, b] : req.pairs) {
      const ClassPair pair{problem.class_index(a), problem.class_index(b)};
      if (pair.a == pair.b) throw Error(ErrorCode::ConfigError, "pair names the same class twice: " + a);
      if (pair.a != 0 && pair.b != 0) {
        throw Error(ErrorCode::ConfigError, "pair " + a + "/" + b + " does not include the reference class '" +
                                                problem.class_labels()[0].name + "'");
      }
      out.push_back({req.measure, pair});
    }
  }
  return out;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InfeasibleConstraints:
    case ErrorCode::EmptyGrid:
    case ErrorCode::AllGridPointsInfeasible:
    case ErrorCode::DegenerateProfile:
    case ErrorCode::SolverFailure:
    case ErrorCode::TooManyPairs:
    case ErrorCode::NoFeasiblePoint:
      return 3;
    case ErrorCode::BudgetExceeded:
      return 4;
    default:
      return 2;
  }
}

CombinedProblem load_problem(const std::string& main_csv, const std::string& aux_csv, const AuditConfig& config,
                             const RunOptions& options) {
  const auto main = ingest_main(read_csv(main_csv), config.schema);
  const auto aux = ingest_aux(read_csv(aux_csv), config.schema);
  event(options, "ingest main_rows=" + std::to_string(main.rows) + " main_cells=" + std::to_string(main.cells.size()) +
                     " aux_cells=" + std::to_string(aux.cells.size()));
  auto problem = align(main, aux, config.alignment);
  event(options, "align cells=" + std::to_string(problem.num_cells()) + " classes=" +
                     std::to_string(problem.num_classes()) + " dropped_mass=" + num(problem.dropped_mass()));
  if (problem.dropped_mass() > 0.0) {
    event(options, "warning code=DroppedMass message=" +
                       quoted("cells without common support carried mass " + num(problem.dropped_mass())));
  }
  return problem;
}

Report build_report(const CombinedProblem& p, const AuditConfig& c, const RunOptions& o) {
  validate_modes(p, c);
  const auto jobs = c.jobs(p);
  const auto names = class_names(p);
  Report r;
  r.problem_digest = problem_digest(p);
  r.diagnostics.entropy_class = negative_entropy(p, EntropyTarget::Class);
  r.diagnostics.entropy_outcome = negative_entropy(p, EntropyTarget::Outcome);
  r.diagnostics.dropped_mass = p.dropped_mass();
  for (const auto& m : distinct_measures(c)) {
    r.diagnostics.identified[std::string(measure_name(m))] = is_point_identified(p, m).identified;
  }
  const auto lip = resolved_lipschitz(p, c, &r.diagnostics.L_min, o);

  for (const auto& [m, pair] : jobs) {
    const auto iv = free_interval(p, m, pair, c, o.threads);
    r.measures.push_back(make_record(iv, names));
    event(o, "interval measure=" + r.measures.back().measure + " pair=" + r.measures.back().pair +
                 " constraints=none lower=" + num(iv.lower) + " upper=" + num(iv.upper));
    if (lip) {
      const auto liv = lip_interval(p, m, pair, c, *lip, o.threads);
      r.measures.push_back(make_record(liv, names, describe(*lip)));
      event(o, "interval measure=" + r.measures.back().measure + " pair=" + r.measures.back().pair +
                   " constraints=" + describe(*lip) + " lower=" + num(liv.lower) + " upper=" + num(liv.upper));
    }
  }
  r.polygons = polygons(p, c, lip, o);
  return r;
}

Report build_hull_report(const CombinedProblem& p, const AuditConfig& c, const RunOptions& o) {
  validate_modes(p, c);
  if (p.num_classes() < 3) throw Error(ErrorCode::WrongClassCount, "hulls need at least 3 classes");
  Report r;
  r.problem_digest = problem_digest(p);
  r.diagnostics.entropy_class = negative_entropy(p, EntropyTarget::Class);
  r.diagnostics.entropy_outcome = negative_entropy(p, EntropyTarget::Outcome);
  r.diagnostics.dropped_mass = p.dropped_mass();
  const auto lip = resolved_lipschitz(p, c, &r.diagnostics.L_min, o);
  r.polygons = polygons(p, c, lip, o);
  return r;
}

int check_problem(const CombinedProblem& p, const AuditConfig& c, const OracleSpec& oracle, const CheckOptions& check,
                  std::ostream& table, const RunOptions& o) {
  validate_modes(p, c);
  const auto names = class_names(p);
  const double bound = oracle.per_cell_grid > 1 ? 2.0 / static_cast<double>(oracle.per_cell_grid - 1) : 2.0;
  bool mismatch = false;
  char line[256];
  std::snprintf(line, sizeof line, "%-6s %-20s %12s %12s %12s %12s %10s %s\n", "measure", "pair", "solver_lo",
                "solver_hi", "oracle_lo", "oracle_hi", "max_gap", "status");
  table << line;

  for (const auto& [m, pair] : c.jobs(p)) {
    const std::string label = pair_label(names, pair);
    const std::string mname(measure_name(m));
    if (p.num_classes() != 2) {
      std::snprintf(line, sizeof line, "%-6s %-20s %s\n", mname.c_str(), label.c_str(),
                    "skipped (interval oracle needs two classes)");
      table << line;
      continue;
    }
    // Oracles work on the pair (0, 1); flip to match the requested order.
    auto solver = free_interval(p, m, {0, 1}, c, o.threads);
    auto orc = m.family() == MeasureFamily::Demographic ? oracle_dd(p, oracle) : oracle_class(p, m, oracle);
    if (pair.a != 0) {
      solver = DisparityInterval{solver.measure, pair, -solver.upper, -solver.lower, solver.method};
      orc = DisparityInterval{orc.measure, pair, -orc.upper, -orc.lower, orc.method};
    }
    solver.lower += check.solver_shrink;
    solver.upper -= check.solver_shrink;
    const double gap = std::max(orc.lower - solver.lower, solver.upper - orc.upper);
    const bool inside = orc.lower >= solver.lower - 1e-9 && orc.upper <= solver.upper + 1e-9;
    const bool ok = inside && gap <= bound;
    mismatch = mismatch || !ok;
    std::snprintf(line, sizeof line, "%-6s %-20s %12.6f %12.6f %12.6f %12.6f %10.2e %s\n", mname.c_str(),
                  label.c_str(), solver.lower, solver.upper, orc.lower, orc.upper, gap,
                  ok ? "ok" : (inside ? "gap-exceeds-bound" : "oracle-outside-solver"));
    table << line;
    event(o, "check measure=" + mname + " pair=" + label + " status=" + (ok ? "ok" : "mismatch"));
  }

  if (p.num_classes() == 3) {
    for (const auto& m : distinct_measures(c)) {
      if (m.family() != MeasureFamily::Demographic) continue;
      const auto poly = polygon_from_support(sweep(p, m, c.directions, std::nullopt, c.grid, o.threads));
      const auto cloud = oracle_hull(p, m, oracle);
      std::size_t outside = 0;
      for (const auto& pt : cloud) outside += polygon_contains(poly, pt, 1e-6) ? 0 : 1;
      mismatch = mismatch || outside > 0;
      std::snprintf(line, sizeof line, "%-6s %-20s hull points=%zu outside=%zu %s\n", std::string(measure_name(m)).c_str(),
                    (names[1] + "," + names[2]).c_str(), cloud.size(), outside, outside == 0 ? "ok" : "oracle-outside-solver");
      table << line;
    }
  }
  return mismatch ? kExitMismatch : kExitOk;
}

int run_audit(const std::string& main_csv, const std::string& aux_csv, const std::string& config_path,
              const std::string& out_dir, const RunOptions& options) {
  return guarded(options, [&] {
    const auto config = AuditConfig::load(config_path);
    const auto problem = load_problem(main_csv, aux_csv, config, options);
    const auto report = build_report(problem, config, options);
    const std::string dir = out_dir.empty() ? (config.out_dir.empty() ? "." : config.out_dir) : out_dir;
    for (auto f : config.formats) {
      for (const auto& path : emit(report, f, dir)) event(options, "wrote path=" + quoted(path));
    }
    event(options, "done status=ok");
    return kExitOk;
  });
}

int run_check(const std::string& main_csv, const std::string& aux_csv, const std::string& config_path,
              const OracleSpec& oracle, const CheckOptions& check, std::ostream& table, const RunOptions& options) {
  return guarded(options, [&] {
    const auto config = AuditConfig::load(config_path);
    const auto problem = load_problem(main_csv, aux_csv, config, options);
    const int code = check_problem(problem, config, oracle, check, table, options);
    event(options, std::string("done status=") + (code == kExitOk ? "ok" : "mismatch"));
    return code;
  });
}

int run_entropy(const std::string& main_csv, const std::string& aux_csv, const std::string& config_path,
                std::ostream& out, const RunOptions& options) {
  return guarded(options, [&] {
    const auto config = AuditConfig::load(config_path);
    const auto problem = load_problem(main_csv, aux_csv, config, options);
    out << "entropy_class=" << num(negative_entropy(problem, EntropyTarget::Class)) << "\n";
    out << "entropy_outcome=" << num(negative_entropy(problem, EntropyTarget::Outcome)) << "\n";
    for (const auto& m : distinct_measures(config)) {
      if (m.family() == MeasureFamily::Classification && problem.mode() != OutcomeMode::Full) continue;
      const auto id = is_point_identified(problem, m);
      out << "identified_" << measure_name(m) << "=" << (id.identified ? "true" : "false")
          << " violating_mass=" << num(id.violating_mass) << "\n";
    }
    return kExitOk;
  });
}

int run_hull(const std::string& main_csv, const std::string& aux_csv, const std::string& config_path,
             const std::string& out_dir, const RunOptions& options) {
  return guarded(options, [&] {
    const auto config = AuditConfig::load(config_path);
    const auto problem = load_problem(main_csv, aux_csv, config, options);
    const auto report = build_hull_report(problem, config, options);
    const std::string dir = out_dir.empty() ? (config.out_dir.empty() ? "." : config.out_dir) : out_dir;
    for (auto f : config.formats) {
      for (const auto& path : emit(report, f, dir)) event(options, "wrote path=" + quoted(path));
    }
    event(options, "done status=ok");
    return kExitOk;
  });
}

}  // namespace dbounds
