#pragma once

// Benchmark harness: timed solver sweeps over method/mode/K/grid size, with
// accuracy evaluation and CSV/JSON emission. Accuracy numbers and iteration
// counts are pure functions of (config, seed); only wall times vary between
// runs.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ezegm/config.hpp"
#include "ezegm/eval.hpp"

namespace ezegm {

struct BenchmarkRecord {
  std::string method;  // egm | ti | vfi
  std::string mode;    // fast | accurate | n/a
  long howard_k = 1;
  Index n_grid = 0;
  double rho = 0.0;
  double time_ms = 0.0;  // median of timed repeats, warm-up discarded
  long policy_iters = 0;
  double euler_mean_grid = 0.0;
  double euler_max_grid = 0.0;
  double euler_mean_ergodic = 0.0;
  double euler_max_ergodic = 0.0;
  std::string error;  // nonempty when the cell failed; other fields are zero
};

struct RunConfig {
  Calibration calibration;
  std::vector<std::string> methods = {"egm", "ti", "vfi"};
  std::vector<std::string> modes = {"fast", "accurate"};
  std::vector<long> howard_small = {1, 2, 3, 4, 5};             // egm, ti
  std::vector<long> howard_large = {1, 10, 20, 30, 40, 50};     // vfi
  std::vector<Index> grid_sizes = {25, 50, 100, 200};           // pareto figure
  std::vector<Index> vfi_sizes = {50, 100, 150, 200, 300};      // equal accuracy
  std::vector<double> rho_list = {0.5, 0.9, 1.1, 1.5, 2.0, 3.0};
  std::string out_dir = ".";
  int repeats = 3;
};

/// Solve one benchmark cell: warm-up + timed repeats (median), then grid and
/// ergodic Euler errors. Failures land in record.error instead of throwing.
BenchmarkRecord run_cell(const RunConfig& config, const std::string& method,
                         const std::string& mode, long howard_k, Index n_grid);

std::vector<BenchmarkRecord> run_speed_table(const RunConfig& config);
std::vector<BenchmarkRecord> run_accuracy_table(const RunConfig& config);
std::vector<BenchmarkRecord> run_howard_sweep(const RunConfig& config);
std::vector<BenchmarkRecord> run_rho_sweep(const RunConfig& config);

struct EqualAccuracyRow {
  Index vfi_n = 0;
  Index egm_n = 0;
  double vfi_mean_error = 0.0;
  double egm_mean_error = 0.0;
  double vfi_ms = 0.0;
  double egm_ms = 0.0;
  double speedup = 0.0;
  std::string error;
};

/// For each VFI (fast) grid size, the smallest EGM grid from {10, 15, 20, ...}
/// whose mean grid Euler error is at least as negative.
std::vector<EqualAccuracyRow> run_equal_accuracy(const RunConfig& config);

inline constexpr const char* kBenchSchema = "bench-v1";
inline constexpr const char* kEqualAccuracySchema = "equal-accuracy-v1";

void write_records_csv(std::ostream& os, const std::vector<BenchmarkRecord>& records);
void write_records_json(std::ostream& os, const std::vector<BenchmarkRecord>& records);
void write_equal_accuracy_csv(std::ostream& os, const std::vector<EqualAccuracyRow>& rows);
void write_equal_accuracy_json(std::ostream& os, const std::vector<EqualAccuracyRow>& rows);
void write_report_json(std::ostream& os, const EulerErrorReport& grid,
                       const EulerErrorReport& ergodic, const Solution& solution);

enum class FigureKind { policy, pareto, tradeoff };

/// Plot-ready CSV data: consumption policy per income state, the
/// speed-accuracy frontier across grid sizes, or the fast/accurate pairs.
void emit_figure_data(const RunConfig& config, FigureKind kind, std::ostream& os);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<CheckResult> check_speed_table(const std::vector<BenchmarkRecord>& records);
std::vector<CheckResult> check_accuracy_table(const std::vector<BenchmarkRecord>& records);
std::vector<CheckResult> check_howard_sweep(const std::vector<BenchmarkRecord>& records);
std::vector<CheckResult> check_equal_accuracy(const std::vector<EqualAccuracyRow>& rows);
std::vector<CheckResult> check_rho_sweep(const std::vector<BenchmarkRecord>& records);

const BenchmarkRecord* find_record(const std::vector<BenchmarkRecord>& records,
                                   const std::string& method, const std::string& mode,
                                   long howard_k);

}  // namespace ezegm
