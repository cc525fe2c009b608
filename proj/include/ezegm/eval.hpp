#pragma once

// Accuracy and welfare evaluation: normalized Euler equation errors on the
// grid and on the simulated ergodic distribution, panel simulation, and
// consumption-equivalent welfare costs.

#include <cstdint>
#include <string>

#include "ezegm/euler.hpp"
#include "ezegm/model.hpp"
#include "ezegm/types.hpp"

namespace ezegm {

/// Points where the constraint (almost) binds are excluded from error
/// statistics: the Euler equation holds only as an inequality there.
inline constexpr double kConstraintSlack = 1e-8;
/// Floor applied when the implied and computed consumption agree to machine
/// precision.
inline constexpr double kErrorFloor = -16.0;

struct EulerErrorReport {
  double mean_l1 = 0.0;   // mean log10 error
  double max_linf = 0.0;  // max log10 error
  long n_points = 0;
  std::string weighting;  // "grid" or "ergodic"
  double pct_lo = 0.0, pct_hi = 0.0;
};

/// Normalized Euler error log10|1 - c_tilde/c| at (m, z), with mu and Xi
/// recomputed exactly from the converged (c, V) so the metric does not
/// depend on any solver's fast-mode shortcuts. Throws ConstrainedPointError
/// when m - c(m, z) <= kConstraintSlack.
double euler_error_at(double m, Index z, const Solution& solution, const Model& model);

/// Errors over m-grid points inside the index-percentile window, all states.
EulerErrorReport grid_errors(const Solution& solution, const Model& model, double pct_lo = 10.0,
                             double pct_hi = 90.0);

/// Simulated wealth/state panel. Per-agent random streams are derived from
/// (seed, agent index), so identical seeds give bit-identical panels
/// regardless of evaluation order.
struct SimPanel {
  ArrayXXd wealth;                              // (n_agents, n_periods)
  Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic> state;  // (n_agents, n_periods)
  std::uint64_t seed = 0;
  Index burn_in = 0;
};

SimPanel simulate(const Solution& solution, const Model& model, Index n_agents, Index n_periods,
                  Index burn_in, std::uint64_t seed);

/// Errors at post-burn-in panel points inside the pooled wealth-percentile
/// window, subsampled to at most 50,000 points (seeded).
EulerErrorReport ergodic_errors(const Solution& solution, const Model& model,
                                const SimPanel& panel, double pct_lo = 5.0, double pct_hi = 95.0);

/// Consumption-equivalent cost of using `approx` instead of `reference`:
/// both policies are simulated with identical shock sequences, each
/// solution's V is averaged along its own path, and the ratio minus one is
/// returned (V is homogeneous of degree 1 in a permanent consumption
/// scaling).
double welfare_cost(const Solution& approx, const Model& model_approx, const Solution& reference,
                    const Model& model_reference, Index n_agents, std::uint64_t seed);

}  // namespace ezegm
