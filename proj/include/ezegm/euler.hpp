#pragma once

// Certainty-equivalent and Euler-equation machinery shared by the EGM solver,
// the baselines and the error metrics. Everything is computed from stored V
// (never W): the exponent identities
//     W^theta           = V^(1-gamma)
//     W^(theta-1) c^-rho = V^(rho-gamma) c^-rho
// keep all expectations in terms of log V, and the log-sum-exp reductions
// shift by the per-asset-row maximum so theta = -27 style exponents never
// leave the double range.

#include "ezegm/model.hpp"
#include "ezegm/types.hpp"

namespace ezegm {

/// Model bundle shared by solvers and evaluators.
struct Model {
  ModelParams params;
  DerivedPrefs prefs;
  IncomeProcess income;
  Grids grids;
};

Model make_model(const ModelParams& params, IncomeProcess income, Grids grids);

/// log E[V'(m')^(1-gamma) | z] and log Xi on the asset grid, shape (n_a, n_z).
/// m' = R a_j + y(z'): next-period values are interpolated once per
/// destination state and reused across all current states.
struct AssetGridExpectations {
  ArrayXXd log_ev_pow;
  ArrayXXd log_xi;  // empty unless requested
};

AssetGridExpectations asset_grid_expectations(const ArrayXXd& c_next, const ArrayXXd& v_next,
                                              const Model& model, bool need_xi);

/// Exact pointwise versions used by accurate-mode search and by the Euler
/// error metric (which always recomputes expectations exactly).
double log_ev_pow_at(double a, Index z, const ArrayXXd& v_next, const Model& model);

struct LogEulerTerms {
  double log_ev_pow;
  double log_xi;
};
LogEulerTerms log_euler_terms_at(double a, Index z, const ArrayXXd& c_next,
                                 const ArrayXXd& v_next, const Model& model);

/// Consumption from the inverted Euler equation, in logs:
/// log c = -(log(beta R) + (1-theta) log mu_W + log Xi) / rho,
/// with log mu_W = log_ev_pow / theta.
double invert_euler_log(double log_ev_pow, double log_xi, const ModelParams& params,
                        const DerivedPrefs& prefs);

/// How the certainty equivalent is evaluated during a value update at fixed
/// policy: interpolated from the asset grid, or recomputed exactly at each
/// a_i = m_i - c_i.
enum class MuEval { interp_asset_grid, exact };

/// One policy-evaluation sweep W <- (1-beta) c^(1-rho) + beta mu_W(m-c, z)
/// at fixed policy. Rewrites sol.v in place and returns the value sup-norm
/// change.
double policy_value_update(Solution& sol, const Model& model, MuEval flavor);

}  // namespace ezegm
