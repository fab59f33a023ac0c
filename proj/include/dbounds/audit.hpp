#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "dbounds/distributions.hpp"
#include "dbounds/error.hpp"
#include "dbounds/lipschitz.hpp"
#include "dbounds/measure.hpp"
#include "dbounds/oracle.hpp"
#include "dbounds/report.hpp"
#include "dbounds/support_class.hpp"

namespace dbounds {

struct MeasureRequest {
  Measure measure;
  /// Class-name pairs (a, b); empty means the reference against every other class.
  std::vector<std::pair<std::string, std::string>> pairs;
};

/// Audit configuration, usually read from JSON:
///
///   {
///     "schema": "schema.json",              // path relative to the config, or inline object
///     "measures": ["DD", {"measure": "TPRD", "pairs": [["white", "black"]]}],
///     "lipschitz": "off" | "minimal" | {"L": 0.5, "weights": [1.0]},
///     "grid": {"resolution": 51, "refine_rounds": 1},
///     "directions": 64,
///     "output": {"dir": "out", "formats": ["json", "csv", "svg"]},
///     "alignment": "intersect" | "strict"
///   }
struct AuditConfig {
  enum class LipMode { Off, Fixed, Minimal };

  Schema schema;
  std::vector<MeasureRequest> measures;
  LipMode lipschitz = LipMode::Off;
  double L = 1.0;
  std::vector<double> metric_weights;
  GridSpec grid;
  std::size_t directions = 64;
  std::string out_dir;
  std::vector<Format> formats{Format::Json, Format::Csv, Format::Svg};
  AlignPolicy alignment = AlignPolicy::IntersectRenormalize;

  /// Relative schema paths resolve against `base_dir`. Throws Error(ConfigError).
  static AuditConfig from_json(const nlohmann::json& j, const std::string& base_dir = ".");
  static AuditConfig load(const std::string& path);

  /// Resolved (measure, pair) jobs in config order. Throws
  /// Error(UnknownClass) for undeclared classes and Error(ConfigError) when
  /// a pair omits the reference class.
  std::vector<std::pair<Measure, ClassPair>> jobs(const CombinedProblem& problem) const;
};

struct RunOptions {
  int threads = 1;
  std::uint64_t seed = 0;
  /// Receives `event=...` lines; nullptr silences them.
  std::ostream* events = nullptr;
};

/// Exit code for an error: 2 data, 3 solver, 4 budget.
int exit_code_for(ErrorCode code);

inline constexpr int kExitOk = 0;
inline constexpr int kExitMismatch = 5;

CombinedProblem load_problem(const std::string& main_csv, const std::string& aux_csv, const AuditConfig& config,
                             const RunOptions& options = {});

/// Diagnostics, intervals and (with three or more classes) polygons.
Report build_report(const CombinedProblem& problem, const AuditConfig& config, const RunOptions& options = {});

/// Polygons only.
Report build_hull_report(const CombinedProblem& problem, const AuditConfig& config, const RunOptions& options = {});

struct CheckOptions {
  /// Test hook: narrows every solver interval by this much at both ends.
  double solver_shrink = 0.0;
};

/// Compares solver and oracle on every configured job the oracle covers
/// and writes a table to `table`. Returns 0 or kExitMismatch.
int check_problem(const CombinedProblem& problem, const AuditConfig& config, const OracleSpec& oracle,
                  const CheckOptions& check, std::ostream& table, const RunOptions& options = {});

// Entry points for the CLI. They never throw; errors become an `event=error`
// line and an exit code.
int run_audit(const std::string& main_csv, const std::string& aux_csv, const std::string& config_path,
              const std::string& out_dir, const RunOptions& options);
int run_check(const std::string& main_csv, const std::string& aux_csv, const std::string& config_path,
              const OracleSpec& oracle, const CheckOptions& check, std::ostream& table, const RunOptions& options);
int run_entropy(const std::string& main_csv, const std::string& aux_csv, const std::string& config_path,
                std::ostream& out, const RunOptions& options);
int run_hull(const std::string& main_csv, const std::string& aux_csv, const std::string& config_path,
             const std::string& out_dir, const RunOptions& options);

}  // namespace dbounds
