// Benchmark CLI: solves the Epstein-Zin consumption-savings model with EGM,
// time iteration or VFI, and reproduces the benchmark tables and figure data
// as CSV/JSON.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ezegm/baselines.hpp"
#include "ezegm/bench.hpp"
#include "ezegm/config.hpp"
#include "ezegm/egm.hpp"
#include "ezegm/eval.hpp"

namespace {

namespace fs = std::filesystem;
using namespace ezegm;

struct CliOptions {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int repeats = 3;
  bool check = false;
};

RunConfig make_run_config(const CliOptions& opts) {
  RunConfig config;
  config.calibration = load_calibration(opts.config_path);
  if (opts.seed_set) config.calibration.seed = opts.seed;
  config.out_dir = opts.out_dir;
  config.repeats = opts.repeats;
  return config;
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream os(fs::path(dir) / name);
  if (!os) throw Error("cannot open output file " + name + " in " + dir);
  return os;
}

int report_checks(const std::vector<CheckResult>& checks) {
  int failures = 0;
  for (const auto& c : checks) {
    std::cout << (c.passed ? "PASS" : "FAIL") << "  " << c.name << "  [" << c.detail << "]\n";
    failures += !c.passed;
  }
  return failures;
}

void print_records(const std::vector<BenchmarkRecord>& records) {
  write_records_csv(std::cout, records);
}

int cmd_solve(const CliOptions& opts, const std::string& method, const std::string& mode,
              long howard_k, Index grid_size) {
  Calibration cal = load_calibration(opts.config_path);
  if (opts.seed_set) cal.seed = opts.seed;
  if (grid_size > 0) {
    cal.n_m = grid_size;
    cal.n_a = grid_size;
  }
  if (howard_k > 0) cal.howard_k = howard_k;

  const Model model = build_model(cal);
  Solution sol;
  if (method == "egm")
    sol = solve_egm(model, cal.howard_k);
  else if (method == "ti")
    sol = solve_ti(model, mode == "accurate" ? SolverMode::accurate : SolverMode::fast,
                   cal.howard_k);
  else if (method == "vfi")
    sol = solve_vfi(model, mode == "accurate" ? SolverMode::accurate : SolverMode::fast,
                    cal.howard_k);
  else
    throw InvalidArgument("unknown method '" + method + "'");

  const EulerErrorReport grid = grid_errors(sol, model);
  const SimPanel panel = simulate(sol, model, 10000, 500, 200, cal.seed);
  const EulerErrorReport erg = ergodic_errors(sol, model, panel);

  auto csv = open_out(opts.out_dir, "solution_" + method + ".csv");
  write_solution_csv(csv, model.grids, sol);
  auto json = open_out(opts.out_dir, "solution_" + method + ".json");
  write_report_json(json, grid, erg, sol);

  std::cout << method << ": " << sol.iters << " policy iterations, "
            << sol.solve_seconds * 1000.0 << " ms\n"
            << "grid errors    mean " << grid.mean_l1 << "  max " << grid.max_linf << '\n'
            << "ergodic errors mean " << erg.mean_l1 << "  max " << erg.max_linf << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Epstein-Zin EGM solver and benchmark harness"};
  app.require_subcommand(1);

  CliOptions opts;
  app.add_option("--config", opts.config_path, "calibration file (key = value)");
  app.add_option("--out", opts.out_dir, "output directory");
  auto* seed_opt = app.add_option("--seed", opts.seed, "simulation seed");
  app.add_option("--repeats", opts.repeats, "timed repeats per cell (min 3)");

  std::string method = "egm", mode = "fast";
  long howard_k = 0;
  Index grid_size = 0;
  auto* solve = app.add_subcommand("solve", "solve once and dump the solution");
  solve->add_option("--method", method, "egm | ti | vfi");
  solve->add_option("--mode", mode, "fast | accurate (ti/vfi only)");
  solve->add_option("--howard-k", howard_k, "Howard value updates per policy step");
  solve->add_option("--grid-size", grid_size, "points in both grids");

  auto* speed = app.add_subcommand("speed-table", "EGM vs TI-fast vs VFI-fast");
  speed->add_flag("--check", opts.check, "assert the expected orderings");
  auto* accuracy = app.add_subcommand("accuracy-table", "EGM vs accurate modes");
  accuracy->add_flag("--check", opts.check, "assert the expected orderings");
  auto* howard = app.add_subcommand("howard-sweep", "effect of the Howard parameter K");
  howard->add_flag("--check", opts.check, "assert the expected orderings");
  auto* equal = app.add_subcommand("equal-accuracy", "EGM grid matching VFI accuracy");
  equal->add_flag("--check", opts.check, "assert the expected orderings");
  auto* rho = app.add_subcommand("rho-sweep", "EGM across rho values");
  rho->add_flag("--check", opts.check, "assert the expected orderings");

  std::string which = "all";
  auto* figures = app.add_subcommand("figures", "emit plot-ready CSV data");
  figures->add_option("--which", which, "policy | pareto | tradeoff | all");

  auto* check = app.add_subcommand("check", "run every table with assertions");

  CLI11_PARSE(app, argc, argv);
  opts.seed_set = seed_opt->count() > 0;

  try {
    if (solve->parsed()) return cmd_solve(opts, method, mode, howard_k, grid_size);

    const RunConfig config = make_run_config(opts);
    int failures = 0;

    if (speed->parsed() || check->parsed()) {
      const auto records = run_speed_table(config);
      print_records(records);
      auto csv = open_out(config.out_dir, "speed_table.csv");
      write_records_csv(csv, records);
      auto json = open_out(config.out_dir, "speed_table.json");
      write_records_json(json, records);
      if (opts.check || check->parsed()) failures += report_checks(check_speed_table(records));
    }
    if (accuracy->parsed() || check->parsed()) {
      const auto records = run_accuracy_table(config);
      print_records(records);
      auto csv = open_out(config.out_dir, "accuracy_table.csv");
      write_records_csv(csv, records);
      auto json = open_out(config.out_dir, "accuracy_table.json");
      write_records_json(json, records);
      if (opts.check || check->parsed()) failures += report_checks(check_accuracy_table(records));
    }
    if (howard->parsed() || check->parsed()) {
      const auto records = run_howard_sweep(config);
      print_records(records);
      auto csv = open_out(config.out_dir, "howard_sweep.csv");
      write_records_csv(csv, records);
      auto json = open_out(config.out_dir, "howard_sweep.json");
      write_records_json(json, records);
      if (opts.check || check->parsed()) failures += report_checks(check_howard_sweep(records));
    }
    if (equal->parsed() || check->parsed()) {
      const auto rows = run_equal_accuracy(config);
      write_equal_accuracy_csv(std::cout, rows);
      auto csv = open_out(config.out_dir, "equal_accuracy.csv");
      write_equal_accuracy_csv(csv, rows);
      auto json = open_out(config.out_dir, "equal_accuracy.json");
      write_equal_accuracy_json(json, rows);
      if (opts.check || check->parsed()) failures += report_checks(check_equal_accuracy(rows));
    }
    if (rho->parsed() || check->parsed()) {
      const auto records = run_rho_sweep(config);
      print_records(records);
      auto csv = open_out(config.out_dir, "rho_sweep.csv");
      write_records_csv(csv, records);
      auto json = open_out(config.out_dir, "rho_sweep.json");
      write_records_json(json, records);
      if (opts.check || check->parsed()) failures += report_checks(check_rho_sweep(records));
    }
    if (figures->parsed()) {
      const bool all = which == "all";
      if (all || which == "policy") {
        auto os = open_out(config.out_dir, "figure_policy.csv");
        emit_figure_data(config, FigureKind::policy, os);
      }
      if (all || which == "pareto") {
        auto os = open_out(config.out_dir, "figure_pareto.csv");
        emit_figure_data(config, FigureKind::pareto, os);
      }
      if (all || which == "tradeoff") {
        auto os = open_out(config.out_dir, "figure_tradeoff.csv");
        emit_figure_data(config, FigureKind::tradeoff, os);
      }
      if (!all && which != "policy" && which != "pareto" && which != "tradeoff")
        throw InvalidArgument("figures: unknown --which '" + which + "'");
    }

    if (failures > 0) {
      std::cout << failures << " check(s) failed\n";
      return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
