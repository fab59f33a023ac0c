// disparity-bounds: audits disparity measures when the protected class is
// only observed in an auxiliary dataset linked through proxy variables.

#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "dbounds/audit.hpp"

namespace {

int default_threads() {
  if (const char* env = std::getenv("DISPARITY_BOUNDS_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
      // Fall through to the default.
    }
  }
  return 1;
}

struct Inputs {
  std::string main_csv;
  std::string aux_csv;
  std::string config;
};

void add_inputs(CLI::App* cmd, Inputs& in) {
  cmd->add_option("--main", in.main_csv, "Main dataset CSV (z_* proxies, yhat, optional y)")->required();
  cmd->add_option("--aux", in.aux_csv, "Auxiliary dataset CSV (z_* proxies and class labels or shares)")->required();
  cmd->add_option("--config", in.config, "Audit configuration JSON")->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sharp bounds on fairness disparities with an unobserved protected class"};
  app.require_subcommand(1);

  dbounds::RunOptions run;
  run.threads = default_threads();
  run.events = &std::cerr;
  app.add_option("--threads", run.threads, "Worker threads (default: DISPARITY_BOUNDS_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", run.seed, "Seed for randomized oracle sampling");

  Inputs in;
  std::string out_dir;

  auto* audit = app.add_subcommand("audit", "Compute intervals and hulls and write the report");
  add_inputs(audit, in);
  audit->add_option("--out", out_dir, "Output directory (overrides the config)");

  dbounds::OracleSpec oracle;
  dbounds::CheckOptions check;
  bool sample = false;
  auto* chk = app.add_subcommand("check", "Cross-check solver intervals against the brute-force oracle");
  add_inputs(chk, in);
  chk->add_option("--grid", oracle.per_cell_grid, "Oracle points per free parameter and cell")
      ->check(CLI::PositiveNumber);
  chk->add_option("--budget", oracle.max_total_points, "Largest number of enumerated oracle points");
  chk->add_flag("--sample", sample, "Random vertex-biased sampling instead of exhaustive enumeration");
  chk->add_option("--samples", oracle.n_samples, "Number of samples with --sample");
  chk->add_option("--corrupt-solver", check.solver_shrink, "Test hook: shrink solver intervals by this amount")
      ->group("");

  auto* entropy = app.add_subcommand("entropy", "Print entropy and identification diagnostics");
  add_inputs(entropy, in);

  auto* hull = app.add_subcommand("hull", "Compute hull polygons only");
  add_inputs(hull, in);
  hull->add_option("--out", out_dir, "Output directory (overrides the config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (audit->parsed()) return dbounds::run_audit(in.main_csv, in.aux_csv, in.config, out_dir, run);
  if (chk->parsed()) {
    oracle.seed = run.seed;
    if (sample) oracle.sampling = dbounds::OracleSpec::Sampling::RandomVertexMix;
    return dbounds::run_check(in.main_csv, in.aux_csv, in.config, oracle, check, std::cout, run);
  }
  if (entropy->parsed()) return dbounds::run_entropy(in.main_csv, in.aux_csv, in.config, std::cout, run);
  return dbounds::run_hull(in.main_csv, in.aux_csv, in.config, out_dir, run);
}
