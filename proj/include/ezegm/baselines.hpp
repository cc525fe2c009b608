#pragma once

// Reference solvers the benchmarks compare against: value function iteration
// with golden-section search and time iteration with bisection. Both come in
// two modes: fast precomputes the certainty equivalent on the asset grid and
// interpolates during search, accurate recomputes it exactly at each
// candidate consumption.

#include <string>

#include "ezegm/euler.hpp"
#include "ezegm/model.hpp"
#include "ezegm/types.hpp"

namespace ezegm {

enum class SolverMode { fast, accurate };

std::string to_string(SolverMode mode);

/// Certainty equivalent in V units on the asset grid:
/// mu_V(a, z) = (E[V'(Ra + y')^(1-gamma) | z])^(1/(1-gamma)).
/// Relation to the EGM solver's object: mu_W = mu_V^(1-rho).
ArrayXXd mu_v_on_asset_grid(const Solution& next, const Model& model);

/// Bellman right-hand side in V units:
/// [(1-beta) c^(1-rho) + beta mu_V(m-c, z)^(1-rho)]^(1/(1-rho)).
/// Fast mode interpolates mu_V from mu_v_grid (required non-null).
double vfi_objective(double c, double m, Index z, const Solution& next, const Model& model,
                     SolverMode mode, const ArrayXXd* mu_v_grid = nullptr);

Solution solve_vfi(const Model& model, SolverMode mode, long howard_k = 1);

/// Euler residual r(c) = c^-rho - beta R mu_W(m-c, z)^(1-theta) Xi(m-c, z),
/// strictly decreasing in c. Fast mode interpolates mu_W and Xi from the
/// precomputed asset-grid arrays (required non-null).
double ti_residual(double c, double m, Index z, const Solution& next, const Model& model,
                   SolverMode mode, const ArrayXXd* mu_w_grid = nullptr,
                   const ArrayXXd* xi_grid = nullptr);

Solution solve_ti(const Model& model, SolverMode mode, long howard_k = 1);

}  // namespace ezegm
