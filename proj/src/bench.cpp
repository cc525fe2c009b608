#include "ezegm/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "ezegm/baselines.hpp"
#include "ezegm/egm.hpp"
#include "ezegm/errors.hpp"

namespace ezegm {

namespace {

constexpr Index kSimAgents = 10000;
constexpr Index kSimPeriods = 500;
constexpr Index kSimBurnIn = 200;

Solution dispatch_solve(const Model& model, const std::string& method, const std::string& mode,
                        long howard_k) {
  if (method == "egm") return solve_egm(model, howard_k);
  const SolverMode solver_mode = mode == "accurate" ? SolverMode::accurate : SolverMode::fast;
  if (method == "ti") return solve_ti(model, solver_mode, howard_k);
  if (method == "vfi") return solve_vfi(model, solver_mode, howard_k);
  throw InvalidArgument("unknown method '" + method + "'");
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

BenchmarkRecord run_cell_with(const RunConfig& config, Calibration cal, const std::string& method,
                              const std::string& mode, long howard_k, Index n_grid) {
  cal.n_m = n_grid;
  cal.n_a = n_grid;
  cal.howard_k = howard_k;

  BenchmarkRecord rec;
  rec.method = method;
  rec.mode = method == "egm" ? "n/a" : mode;
  rec.howard_k = howard_k;
  rec.n_grid = n_grid;
  rec.rho = cal.params.rho;
  try {
    const Model model = build_model(cal);
    Solution sol = dispatch_solve(model, method, mode, howard_k);  // warm-up

    const int repeats = std::max(3, config.repeats);
    std::vector<double> times_ms;
    times_ms.reserve(repeats);
    for (int rep = 0; rep < repeats; ++rep) {
      const auto start = std::chrono::steady_clock::now();
      sol = dispatch_solve(model, method, mode, howard_k);
      times_ms.push_back(
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
              .count());
    }
    rec.time_ms = median(std::move(times_ms));
    rec.policy_iters = sol.iters;

    const EulerErrorReport grid = grid_errors(sol, model);
    const SimPanel panel = simulate(sol, model, kSimAgents, kSimPeriods, kSimBurnIn, cal.seed);
    const EulerErrorReport ergodic = ergodic_errors(sol, model, panel);
    rec.euler_mean_grid = grid.mean_l1;
    rec.euler_max_grid = grid.max_linf;
    rec.euler_mean_ergodic = ergodic.mean_l1;
    rec.euler_max_ergodic = ergodic.max_linf;
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  return rec;
}

}  // namespace

BenchmarkRecord run_cell(const RunConfig& config, const std::string& method,
                         const std::string& mode, long howard_k, Index n_grid) {
  return run_cell_with(config, config.calibration, method, mode, howard_k, n_grid);
}

std::vector<BenchmarkRecord> run_speed_table(const RunConfig& config) {
  const Index n = config.calibration.n_m;
  std::vector<BenchmarkRecord> records;
  records.push_back(run_cell(config, "egm", "n/a", 1, n));
  records.push_back(run_cell(config, "ti", "fast", 1, n));
  records.push_back(run_cell(config, "vfi", "fast", 1, n));
  std::stable_sort(records.begin(), records.end(),
                   [](const auto& a, const auto& b) { return a.time_ms < b.time_ms; });
  return records;
}

std::vector<BenchmarkRecord> run_accuracy_table(const RunConfig& config) {
  const Index n = config.calibration.n_m;
  std::vector<BenchmarkRecord> records;
  records.push_back(run_cell(config, "egm", "n/a", 1, n));
  records.push_back(run_cell(config, "ti", "accurate", 1, n));
  records.push_back(run_cell(config, "vfi", "accurate", 1, n));
  return records;
}

std::vector<BenchmarkRecord> run_howard_sweep(const RunConfig& config) {
  const Index n = config.calibration.n_m;
  std::vector<BenchmarkRecord> records;
  for (long k : config.howard_small) records.push_back(run_cell(config, "egm", "n/a", k, n));
  for (const char* mode : {"fast", "accurate"})
    for (long k : config.howard_small) records.push_back(run_cell(config, "ti", mode, k, n));
  for (const char* mode : {"fast", "accurate"})
    for (long k : config.howard_large) records.push_back(run_cell(config, "vfi", mode, k, n));
  return records;
}

std::vector<BenchmarkRecord> run_rho_sweep(const RunConfig& config) {
  std::vector<BenchmarkRecord> records;
  for (double rho : config.rho_list) {
    Calibration cal = config.calibration;
    cal.params.rho = rho;
    records.push_back(run_cell_with(config, cal, "egm", "n/a", 1, cal.n_m));
  }
  return records;
}

std::vector<EqualAccuracyRow> run_equal_accuracy(const RunConfig& config) {
  std::vector<EqualAccuracyRow> rows;
  std::map<Index, BenchmarkRecord> egm_cache;
  const auto egm_at = [&](Index n) -> const BenchmarkRecord& {
    auto it = egm_cache.find(n);
    if (it == egm_cache.end()) it = egm_cache.emplace(n, run_cell(config, "egm", "n/a", 1, n)).first;
    return it->second;
  };

  for (Index vfi_n : config.vfi_sizes) {
    EqualAccuracyRow row;
    row.vfi_n = vfi_n;
    const BenchmarkRecord vfi = run_cell(config, "vfi", "fast", 1, vfi_n);
    if (!vfi.error.empty()) {
      row.error = vfi.error;
      rows.push_back(row);
      continue;
    }
    row.vfi_mean_error = vfi.euler_mean_grid;
    row.vfi_ms = vfi.time_ms;

    bool matched = false;
    for (Index egm_n = 10; egm_n <= 100; egm_n += 5) {
      const BenchmarkRecord& egm = egm_at(egm_n);
      if (!egm.error.empty()) continue;
      if (egm.euler_mean_grid <= vfi.euler_mean_grid) {
        row.egm_n = egm_n;
        row.egm_mean_error = egm.euler_mean_grid;
        row.egm_ms = egm.time_ms;
        row.speedup = vfi.time_ms / egm.time_ms;
        matched = true;
        break;
      }
    }
    if (!matched) row.error = "no EGM grid size up to 100 matched the VFI error";
    rows.push_back(row);
  }
  return rows;
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

void write_records_csv(std::ostream& os, const std::vector<BenchmarkRecord>& records) {
  const auto saved = os.precision(10);
  os << "schema,method,mode,howard_k,n_grid,rho,time_ms,policy_iters,euler_mean_grid,"
        "euler_max_grid,euler_mean_ergodic,euler_max_ergodic,error\n";
  for (const auto& r : records)
    os << kBenchSchema << ',' << r.method << ',' << r.mode << ',' << r.howard_k << ',' << r.n_grid
       << ',' << r.rho << ',' << r.time_ms << ',' << r.policy_iters << ',' << r.euler_mean_grid
       << ',' << r.euler_max_grid << ',' << r.euler_mean_ergodic << ',' << r.euler_max_ergodic
       << ',' << csv_escape(r.error) << '\n';
  os.precision(saved);
}

namespace {

nlohmann::json to_json(const BenchmarkRecord& r) {
  return nlohmann::json{{"schema", kBenchSchema},
                        {"method", r.method},
                        {"mode", r.mode},
                        {"howard_k", r.howard_k},
                        {"n_grid", r.n_grid},
                        {"rho", r.rho},
                        {"time_ms", r.time_ms},
                        {"policy_iters", r.policy_iters},
                        {"euler_mean_grid", r.euler_mean_grid},
                        {"euler_max_grid", r.euler_max_grid},
                        {"euler_mean_ergodic", r.euler_mean_ergodic},
                        {"euler_max_ergodic", r.euler_max_ergodic},
                        {"error", r.error}};
}

nlohmann::json to_json(const EulerErrorReport& rep) {
  return nlohmann::json{{"mean_l1", rep.mean_l1},       {"max_linf", rep.max_linf},
                        {"n_points", rep.n_points},     {"weighting", rep.weighting},
                        {"pct_lo", rep.pct_lo},         {"pct_hi", rep.pct_hi}};
}

}  // namespace

void write_records_json(std::ostream& os, const std::vector<BenchmarkRecord>& records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : records) arr.push_back(to_json(r));
  os << arr.dump(2) << '\n';
}

void write_equal_accuracy_csv(std::ostream& os, const std::vector<EqualAccuracyRow>& rows) {
  const auto saved = os.precision(10);
  os << "schema,vfi_n,egm_n,vfi_mean_error,egm_mean_error,vfi_ms,egm_ms,speedup,error\n";
  for (const auto& r : rows)
    os << kEqualAccuracySchema << ',' << r.vfi_n << ',' << r.egm_n << ',' << r.vfi_mean_error
       << ',' << r.egm_mean_error << ',' << r.vfi_ms << ',' << r.egm_ms << ',' << r.speedup << ','
       << csv_escape(r.error) << '\n';
  os.precision(saved);
}

void write_equal_accuracy_json(std::ostream& os, const std::vector<EqualAccuracyRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows)
    arr.push_back(nlohmann::json{{"schema", kEqualAccuracySchema},
                                 {"vfi_n", r.vfi_n},
                                 {"egm_n", r.egm_n},
                                 {"vfi_mean_error", r.vfi_mean_error},
                                 {"egm_mean_error", r.egm_mean_error},
                                 {"vfi_ms", r.vfi_ms},
                                 {"egm_ms", r.egm_ms},
                                 {"speedup", r.speedup},
                                 {"error", r.error}});
  os << arr.dump(2) << '\n';
}

void write_report_json(std::ostream& os, const EulerErrorReport& grid,
                       const EulerErrorReport& ergodic, const Solution& solution) {
  const nlohmann::json doc{{"schema", "report-v1"},
                           {"grid", to_json(grid)},
                           {"ergodic", to_json(ergodic)},
                           {"policy_iters", solution.iters},
                           {"converged", solution.converged},
                           {"solve_seconds", solution.solve_seconds}};
  os << doc.dump(2) << '\n';
}

void emit_figure_data(const RunConfig& config, FigureKind kind, std::ostream& os) {
  const auto saved = os.precision(10);
  switch (kind) {
    case FigureKind::policy: {
      const Model model = build_model(config.calibration);
      const Solution sol = solve_egm(model, config.calibration.howard_k);
      os << "schema,m";
      for (Index k = 0; k < model.income.n_states(); ++k) os << ",c_z" << k;
      os << '\n';
      for (Index i = 0; i < model.grids.n_m(); ++i) {
        os << "policy-v1," << model.grids.m_grid[i];
        for (Index k = 0; k < model.income.n_states(); ++k) os << ',' << sol.c(i, k);
        os << '\n';
      }
      break;
    }
    case FigureKind::pareto: {
      os << "schema,method,mode,n_grid,time_ms,euler_mean_grid,euler_mean_ergodic\n";
      for (const auto& method : config.methods) {
        const std::string mode = method == "egm" ? "n/a" : "fast";
        for (Index n : config.grid_sizes) {
          const BenchmarkRecord r = run_cell(config, method, mode, 1, n);
          os << "pareto-v1," << r.method << ',' << r.mode << ',' << r.n_grid << ',' << r.time_ms
             << ',' << r.euler_mean_grid << ',' << r.euler_mean_ergodic << '\n';
        }
      }
      break;
    }
    case FigureKind::tradeoff: {
      os << "schema,method,mode,time_ms,euler_mean_grid,euler_mean_ergodic\n";
      const Index n = config.calibration.n_m;
      std::vector<std::pair<std::string, std::string>> cells = {
          {"egm", "n/a"}, {"ti", "fast"}, {"ti", "accurate"}, {"vfi", "fast"}, {"vfi", "accurate"}};
      for (const auto& [method, mode] : cells) {
        const BenchmarkRecord r = run_cell(config, method, mode, 1, n);
        os << "tradeoff-v1," << r.method << ',' << r.mode << ',' << r.time_ms << ','
           << r.euler_mean_grid << ',' << r.euler_mean_ergodic << '\n';
      }
      break;
    }
  }
  os.precision(saved);
}

const BenchmarkRecord* find_record(const std::vector<BenchmarkRecord>& records,
                                   const std::string& method, const std::string& mode,
                                   long howard_k) {
  for (const auto& r : records)
    if (r.method == method && r.mode == mode && r.howard_k == howard_k) return &r;
  return nullptr;
}

namespace {

void add_check(std::vector<CheckResult>& out, const std::string& name, bool passed,
               std::string detail) {
  out.push_back(CheckResult{name, passed, std::move(detail)});
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

}  // namespace

std::vector<CheckResult> check_speed_table(const std::vector<BenchmarkRecord>& records) {
  std::vector<CheckResult> out;
  const auto* egm = find_record(records, "egm", "n/a", 1);
  const auto* ti = find_record(records, "ti", "fast", 1);
  const auto* vfi = find_record(records, "vfi", "fast", 1);
  if (!egm || !ti || !vfi || !egm->error.empty() || !ti->error.empty() || !vfi->error.empty()) {
    add_check(out, "speed-table-complete", false, "missing or failed cells");
    return out;
  }
  add_check(out, "egm-ergodic-mean<=-4.0", egm->euler_mean_ergodic <= -4.0,
            fmt(egm->euler_mean_ergodic));
  add_check(out, "egm-ergodic-max<=-2.8", egm->euler_max_ergodic <= -2.8,
            fmt(egm->euler_max_ergodic));
  add_check(out, "egm-runtime<5s", egm->time_ms < 5000.0, fmt(egm->time_ms) + " ms");
  add_check(out, "time-ordering-egm<ti<vfi",
            egm->time_ms < ti->time_ms && ti->time_ms < vfi->time_ms,
            fmt(egm->time_ms) + " / " + fmt(ti->time_ms) + " / " + fmt(vfi->time_ms) + " ms");
  add_check(out, "vfi/egm-time>=20", vfi->time_ms / egm->time_ms >= 20.0,
            fmt(vfi->time_ms / egm->time_ms) + "x");
  add_check(out, "ti/egm-time>=4", ti->time_ms / egm->time_ms >= 4.0,
            fmt(ti->time_ms / egm->time_ms) + "x");
  add_check(out, "egm-ti-iters-within-15pct",
            std::abs(double(egm->policy_iters - ti->policy_iters)) <=
                0.15 * double(egm->policy_iters),
            std::to_string(egm->policy_iters) + " vs " + std::to_string(ti->policy_iters));
  add_check(out, "vfi-iters>=1.5x-egm",
            double(vfi->policy_iters) >= 1.5 * double(egm->policy_iters),
            std::to_string(vfi->policy_iters) + " vs " + std::to_string(egm->policy_iters));
  add_check(out, "egm<=ti-fast-minus-0.8",
            egm->euler_mean_ergodic <= ti->euler_mean_ergodic - 0.8,
            fmt(egm->euler_mean_ergodic) + " vs " + fmt(ti->euler_mean_ergodic));
  add_check(out, "egm<=vfi-fast-minus-1.0",
            egm->euler_mean_ergodic <= vfi->euler_mean_ergodic - 1.0,
            fmt(egm->euler_mean_ergodic) + " vs " + fmt(vfi->euler_mean_ergodic));
  return out;
}

std::vector<CheckResult> check_accuracy_table(const std::vector<BenchmarkRecord>& records) {
  std::vector<CheckResult> out;
  const auto* egm = find_record(records, "egm", "n/a", 1);
  const auto* ti = find_record(records, "ti", "accurate", 1);
  const auto* vfi = find_record(records, "vfi", "accurate", 1);
  if (!egm || !ti || !vfi || !egm->error.empty() || !ti->error.empty() || !vfi->error.empty()) {
    add_check(out, "accuracy-table-complete", false, "missing or failed cells");
    return out;
  }
  add_check(out, "ti-accurate-within-0.3-of-egm",
            std::abs(ti->euler_mean_ergodic - egm->euler_mean_ergodic) <= 0.3,
            fmt(ti->euler_mean_ergodic) + " vs " + fmt(egm->euler_mean_ergodic));
  add_check(out, "ti-accurate/egm-time>=30", ti->time_ms / egm->time_ms >= 30.0,
            fmt(ti->time_ms / egm->time_ms) + "x");
  add_check(out, "vfi-accurate/ti-accurate-time>=2", vfi->time_ms / ti->time_ms >= 2.0,
            fmt(vfi->time_ms / ti->time_ms) + "x");
  return out;
}

std::vector<CheckResult> check_howard_sweep(const std::vector<BenchmarkRecord>& records) {
  std::vector<CheckResult> out;
  const auto* egm1 = find_record(records, "egm", "n/a", 1);
  bool egm_min_at_1 = egm1 != nullptr && egm1->error.empty();
  std::string egm_detail = egm1 ? fmt(egm1->time_ms) + " ms at K=1" : "missing K=1";
  for (long k = 2; k <= 5 && egm_min_at_1; ++k) {
    const auto* r = find_record(records, "egm", "n/a", k);
    if (r && r->error.empty() && r->time_ms < egm1->time_ms) {
      egm_min_at_1 = false;
      egm_detail += ", beaten at K=" + std::to_string(k) + " (" + fmt(r->time_ms) + " ms)";
    }
  }
  add_check(out, "egm-time-minimized-at-k1", egm_min_at_1, egm_detail);

  const auto* vfi1 = find_record(records, "vfi", "fast", 1);
  double vfi_best = std::numeric_limits<double>::infinity();
  for (long k : {20L, 30L, 40L, 50L}) {
    const auto* r = find_record(records, "vfi", "fast", k);
    if (r && r->error.empty()) vfi_best = std::min(vfi_best, r->time_ms);
  }
  const bool vfi_ok = vfi1 && vfi1->error.empty() && vfi_best <= 0.5 * vfi1->time_ms;
  add_check(out, "vfi-fast-best-k-at-most-half-of-k1", vfi_ok,
            vfi1 ? fmt(vfi_best) + " vs " + fmt(vfi1->time_ms) + " ms" : "missing K=1");

  const auto* ti1 = find_record(records, "ti", "fast", 1);
  const auto* ti3 = find_record(records, "ti", "fast", 3);
  const auto* ti4 = find_record(records, "ti", "fast", 4);
  const bool ti_ok = ti1 && ti3 && ti4 && ti1->error.empty() && ti3->error.empty() &&
                     ti4->error.empty() && ti3->time_ms <= ti1->time_ms &&
                     ti4->time_ms <= ti1->time_ms;
  add_check(out, "ti-fast-k3-k4-at-most-k1", ti_ok,
            ti1 && ti3 && ti4 ? fmt(ti3->time_ms) + ", " + fmt(ti4->time_ms) + " vs " +
                                    fmt(ti1->time_ms) + " ms"
                              : "missing cells");
  return out;
}

std::vector<CheckResult> check_equal_accuracy(const std::vector<EqualAccuracyRow>& rows) {
  std::vector<CheckResult> out;
  const EqualAccuracyRow* at100 = nullptr;
  for (const auto& r : rows)
    if (r.vfi_n == 100) at100 = &r;
  if (!at100 || !at100->error.empty()) {
    add_check(out, "equal-accuracy-vfi-100-present", false, "missing or failed row");
    return out;
  }
  add_check(out, "egm-n<=25-matches-vfi-n100", at100->egm_n <= 25,
            "egm n=" + std::to_string(at100->egm_n));
  add_check(out, "speedup>=50-at-vfi-n100", at100->speedup >= 50.0, fmt(at100->speedup) + "x");
  return out;
}

std::vector<CheckResult> check_rho_sweep(const std::vector<BenchmarkRecord>& records) {
  std::vector<CheckResult> out;
  bool all_converged = !records.empty();
  bool all_accurate = !records.empty();
  std::string detail;
  for (const auto& r : records) {
    if (!r.error.empty()) all_converged = false;
    if (r.euler_mean_grid > -4.0 || r.euler_mean_ergodic > -4.0) all_accurate = false;
    detail += (detail.empty() ? "" : "; ") + std::string("rho=") + fmt(r.rho) + ": " +
              (r.error.empty() ? fmt(r.euler_mean_grid) : "FAILED");
  }
  add_check(out, "all-rho-converge", all_converged, detail);
  add_check(out, "rho-mean-errors<=-4.0", all_converged && all_accurate, detail);
  return out;
}

}  // namespace ezegm
