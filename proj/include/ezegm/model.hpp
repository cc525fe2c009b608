#pragma once

// Economic model: preferences, the W <-> V power transform, the discretized
// income process, grids, and the solution container shared by all solvers.

#include <cmath>
#include <iosfwd>

#include "ezegm/errors.hpp"
#include "ezegm/types.hpp"

namespace ezegm {

struct ModelParams {
  double beta = 0.96;      // discount factor
  double R = 1.02;         // gross interest rate
  double gamma = 10.0;     // risk aversion
  double rho = 2.0 / 3.0;  // inverse elasticity of intertemporal substitution
  double conv_tol = 1e-6;  // sup-norm tolerance on consumption change
  long max_iters = 5000;
};

/// Exponents derived from (gamma, rho). theta = (1-gamma)/(1-rho) is the
/// power-mean exponent of the certainty equivalent; theta = 1 recovers CRRA.
struct DerivedPrefs {
  double theta;
  double one_minus_rho;

  double rho() const { return 1.0 - one_minus_rho; }
  double one_minus_gamma() const { return theta * one_minus_rho; }
};

/// Rejects invalid parameters (including the out-of-scope limiting cases
/// rho = 1 and gamma = 1).
void validate(const ModelParams& params);

DerivedPrefs derive_prefs(const ModelParams& params);

/// Sufficient existence condition beta * R^theta < 1 (equivalently
/// beta < R^|theta| for theta < 0). Sufficient only: the rho > 1
/// robustness calibrations violate it yet converge, so it is exposed as a
/// predicate rather than enforced by validate().
bool satisfies_existence_condition(const ModelParams& params);

/// W = V^(1-rho). Decreasing in V when rho > 1.
double v_to_w(double v, double rho);
/// V = W^(1/(1-rho)), the inverse of v_to_w.
double w_to_v(double w, double rho);

ArrayXXd v_to_w(const ArrayXXd& v, double rho);
ArrayXXd w_to_v(const ArrayXXd& w, double rho);

/// Discretized AR(1) income process in logs. Income levels are rescaled so
/// that mean income under the stationary distribution is 1.
struct IncomeProcess {
  ArrayXd z_grid;    // log-income states
  MatrixXd trans;    // row-stochastic transition matrix pi[k][l]
  ArrayXd y;         // income level per state
  ArrayXd stat_dist; // stationary distribution over states

  Index n_states() const { return z_grid.size(); }
  double mean_income() const { return (stat_dist * y).sum(); }
};

/// Tauchen discretization: z_grid spans +/- width unconditional standard
/// deviations, transition rows from normal CDF differences.
IncomeProcess tauchen(double persistence, double innovation_sd, Index n_states, double width);

/// Exogenous cash-on-hand grid {m_i} and end-of-period asset grid {a_j},
/// both strictly increasing with a_grid[0] = 0.
struct Grids {
  ArrayXd m_grid;
  ArrayXd a_grid;

  Index n_m() const { return m_grid.size(); }
  Index n_a() const { return a_grid.size(); }
};

/// Default curvature puts the ratio of the last to the first grid interval
/// near 50, concentrating points where the policy curves most.
inline constexpr double kDefaultCurvature = 3.912023005428146;  // ln 50
inline constexpr double kMinCashOnHand = 1e-6;

/// Normalized exponential spacing: maps u in [0,1] to
/// (exp(u*curvature)-1)/(exp(curvature)-1); curvature -> 0 gives uniform.
ArrayXd exp_spaced(Index n, double lo, double hi, double curvature);

Grids build_grids(Index n_m, Index n_a, double m_max_multiple, double curvature,
                  const IncomeProcess& income);

/// Converged policy and value on the exogenous grid, column per income state.
/// Stores V rather than W: V is the stable object to interpolate near the
/// constraint, for either sign of 1-rho.
struct Solution {
  ArrayXXd c;  // consumption, (m_i, z_k)
  ArrayXXd v;  // value, (m_i, z_k)
  long iters = 0;
  bool converged = false;
  double solve_seconds = 0.0;
};

/// Columnar dump (state index, m, c, v), one row per grid point.
void write_solution_csv(std::ostream& os, const Grids& grids, const Solution& solution);

}  // namespace ezegm
