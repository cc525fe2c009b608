#include "ezegm/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ezegm/errors.hpp"
#include "ezegm/kernels.hpp"

namespace ezegm {

namespace {

// SplitMix64: 64-bit state, one multiply-xor chain per draw. Deterministic
// across platforms, which is all the simulation contract asks of the RNG.
struct SplitMix64 {
  std::uint64_t state;

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  double uniform01() { return double(next() >> 11) * 0x1.0p-53; }
};

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SplitMix64 agent_stream(std::uint64_t seed, Index agent) {
  return SplitMix64{mix64(seed + 0x9E3779B97F4A7C15ULL * std::uint64_t(agent + 1))};
}

Index draw_from_cdf(const ArrayXd& cdf, double u) {
  const double* begin = cdf.data();
  const double* end = begin + cdf.size();
  const double* it = std::lower_bound(begin, end, u);
  return std::min<Index>(static_cast<Index>(it - begin), cdf.size() - 1);
}

ArrayXd cumsum(const ArrayXd& p) {
  ArrayXd out(p.size());
  double acc = 0.0;
  for (Index i = 0; i < p.size(); ++i) out[i] = (acc += p[i]);
  return out;
}

double percentile(std::vector<double>& values, double pct) {
  const auto idx =
      static_cast<std::ptrdiff_t>(std::llround(pct / 100.0 * double(values.size() - 1)));
  std::nth_element(values.begin(), values.begin() + idx, values.end());
  return values[idx];
}

}  // namespace

double euler_error_at(double m, Index z, const Solution& solution, const Model& model) {
  const double c = interp(model.grids.m_grid, solution.c.col(z), m);
  const double a = m - c;
  if (a <= kConstraintSlack)
    throw ConstrainedPointError("euler_error_at: constraint binds at m=" + std::to_string(m));

  const auto terms = log_euler_terms_at(a, z, solution.c, solution.v, model);
  const double log_c_tilde = invert_euler_log(terms.log_ev_pow, terms.log_xi, model.params,
                                              model.prefs);
  const double ratio = std::exp(log_c_tilde - std::log(c));
  if (ratio == 1.0) return kErrorFloor;
  return std::max(std::log10(std::abs(1.0 - ratio)), kErrorFloor);
}

namespace {

struct ErrorAccumulator {
  double sum = 0.0;
  double max = -std::numeric_limits<double>::infinity();
  long n = 0;

  void add(double e) {
    sum += e;
    max = std::max(max, e);
    ++n;
  }

  EulerErrorReport report(std::string weighting, double pct_lo, double pct_hi) const {
    EulerErrorReport rep;
    rep.mean_l1 = n > 0 ? sum / double(n) : 0.0;
    rep.max_linf = n > 0 ? max : 0.0;
    rep.n_points = n;
    rep.weighting = std::move(weighting);
    rep.pct_lo = pct_lo;
    rep.pct_hi = pct_hi;
    return rep;
  }
};

}  // namespace

EulerErrorReport grid_errors(const Solution& solution, const Model& model, double pct_lo,
                             double pct_hi) {
  const Index n_m = model.grids.n_m();
  const Index n_z = model.income.n_states();
  ErrorAccumulator acc;
  for (Index i = 0; i < n_m; ++i) {
    const double position = 100.0 * double(i) / double(n_m - 1);
    if (position < pct_lo || position > pct_hi) continue;
    for (Index k = 0; k < n_z; ++k) {
      const double m = model.grids.m_grid[i];
      if (m - solution.c(i, k) <= kConstraintSlack) continue;
      acc.add(euler_error_at(m, k, solution, model));
    }
  }
  return acc.report("grid", pct_lo, pct_hi);
}

SimPanel simulate(const Solution& solution, const Model& model, Index n_agents, Index n_periods,
                  Index burn_in, std::uint64_t seed) {
  if (n_agents < 1 || n_periods < 2) throw InvalidArgument("simulate: panel too small");
  if (burn_in < 0 || burn_in >= n_periods) throw InvalidArgument("simulate: bad burn_in");

  const Index n_z = model.income.n_states();
  const ArrayXd stat_cdf = cumsum(model.income.stat_dist);
  std::vector<ArrayXd> row_cdfs(n_z);
  for (Index k = 0; k < n_z; ++k) row_cdfs[k] = cumsum(model.income.trans.row(k).array());

  SimPanel panel;
  panel.wealth.resize(n_agents, n_periods);
  panel.state.resize(n_agents, n_periods);
  panel.seed = seed;
  panel.burn_in = burn_in;

  const auto& m_grid = model.grids.m_grid;
  for (Index agent = 0; agent < n_agents; ++agent) {
    SplitMix64 rng = agent_stream(seed, agent);
    Index z = draw_from_cdf(stat_cdf, rng.uniform01());
    double m = 1.0;  // start at mean income; burn-in washes the choice out
    panel.state(agent, 0) = int(z);
    panel.wealth(agent, 0) = m;
    for (Index t = 1; t < n_periods; ++t) {
      double c = interp(m_grid, solution.c.col(z), m);
      c = std::clamp(c, std::numeric_limits<double>::min(), m);
      const Index z_next = draw_from_cdf(row_cdfs[z], rng.uniform01());
      m = model.params.R * (m - c) + model.income.y[z_next];
      z = z_next;
      panel.state(agent, t) = int(z);
      panel.wealth(agent, t) = m;
    }
  }
  return panel;
}

EulerErrorReport ergodic_errors(const Solution& solution, const Model& model,
                                const SimPanel& panel, double pct_lo, double pct_hi) {
  constexpr long kSampleCap = 50000;
  const Index n_agents = panel.wealth.rows();
  const Index n_periods = panel.wealth.cols();
  const Index t0 = panel.burn_in;

  std::vector<double> pooled;
  pooled.reserve(std::size_t(n_agents) * std::size_t(n_periods - t0));
  for (Index agent = 0; agent < n_agents; ++agent)
    for (Index t = t0; t < n_periods; ++t) pooled.push_back(panel.wealth(agent, t));

  const double w_lo = percentile(pooled, pct_lo);
  const double w_hi = percentile(pooled, pct_hi);

  long eligible = 0;
  for (double w : pooled) eligible += (w >= w_lo && w <= w_hi);
  const double keep = eligible > kSampleCap ? double(kSampleCap) / double(eligible) : 1.0;

  SplitMix64 rng{mix64(panel.seed ^ 0x51a2b3c4d5e6f708ULL)};
  ErrorAccumulator acc;
  for (Index agent = 0; agent < n_agents; ++agent) {
    for (Index t = t0; t < n_periods; ++t) {
      const double m = panel.wealth(agent, t);
      if (m < w_lo || m > w_hi) continue;
      if (keep < 1.0 && rng.uniform01() > keep) continue;
      const Index z = panel.state(agent, t);
      const double c = interp(model.grids.m_grid, solution.c.col(z), m);
      if (m - c <= kConstraintSlack) continue;
      acc.add(euler_error_at(m, z, solution, model));
    }
  }
  return acc.report("ergodic", pct_lo, pct_hi);
}

namespace {

double mean_value_on_path(const Solution& sol, const Model& model, const SimPanel& panel) {
  double sum = 0.0;
  long n = 0;
  for (Index agent = 0; agent < panel.wealth.rows(); ++agent) {
    for (Index t = panel.burn_in; t < panel.wealth.cols(); ++t) {
      const Index z = panel.state(agent, t);
      sum += interp(model.grids.m_grid, sol.v.col(z), panel.wealth(agent, t));
      ++n;
    }
  }
  return sum / double(n);
}

}  // namespace

double welfare_cost(const Solution& approx, const Model& model_approx, const Solution& reference,
                    const Model& model_reference, Index n_agents, std::uint64_t seed) {
  constexpr Index kPeriods = 500;
  constexpr Index kBurnIn = 200;
  // Identical seeds give identical income paths: the state process does not
  // depend on the policy.
  const SimPanel panel_approx = simulate(approx, model_approx, n_agents, kPeriods, kBurnIn, seed);
  const SimPanel panel_ref =
      simulate(reference, model_reference, n_agents, kPeriods, kBurnIn, seed);
  const double v_approx = mean_value_on_path(approx, model_approx, panel_approx);
  const double v_ref = mean_value_on_path(reference, model_reference, panel_ref);
  return v_ref / v_approx - 1.0;
}

}  // namespace ezegm
