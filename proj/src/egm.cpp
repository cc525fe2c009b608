#include "ezegm/egm.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "ezegm/errors.hpp"
#include "ezegm/kernels.hpp"

namespace ezegm {

namespace {

void resize_workspace(EgmWorkspace& ws, Index n_a, Index n_z) {
  ws.mu.resize(n_a, n_z);
  ws.xi.resize(n_a, n_z);
  ws.endo_m.resize(n_a, n_z);
  ws.endo_c.resize(n_a, n_z);
}

}  // namespace

ArrayXXd compute_mu(const Solution& solution_next, const Model& model) {
  const auto tables = asset_grid_expectations(solution_next.c, solution_next.v, model, false);
  return (tables.log_ev_pow / model.prefs.theta).exp();
}

ArrayXXd compute_xi(const Solution& solution_next, const Model& model) {
  const auto tables = asset_grid_expectations(solution_next.c, solution_next.v, model, true);
  return tables.log_xi.exp();
}

ArrayXXd invert_euler(const ArrayXXd& mu, const ArrayXXd& xi, const DerivedPrefs& prefs,
                      const ModelParams& params) {
  if (!(mu > 0.0).all() || !(xi > 0.0).all())
    throw DomainError("invert_euler: mu and xi must be positive");
  const double log_beta_r = std::log(params.beta * params.R);
  return (-(log_beta_r + (1.0 - prefs.theta) * mu.log() + xi.log()) / prefs.rho()).exp();
}

Solution egm_step(const Solution& current, const Model& model) {
  EgmWorkspace ws;
  return egm_step(current, model, ws);
}

Solution egm_step(const Solution& current, const Model& model, EgmWorkspace& ws) {
  const Index n_a = model.grids.n_a();
  const Index n_m = model.grids.n_m();
  const Index n_z = model.income.n_states();
  const auto& a_grid = model.grids.a_grid;
  const auto& m_grid = model.grids.m_grid;
  const double beta = model.params.beta;
  const double theta = model.prefs.theta;
  const double one_minus_rho = model.prefs.one_minus_rho;

  resize_workspace(ws, n_a, n_z);
  const auto tables = asset_grid_expectations(current.c, current.v, model, true);
  const ArrayXXd log_mu = tables.log_ev_pow / theta;
  ws.mu = log_mu.exp();
  ws.xi = tables.log_xi.exp();

  // Inverted Euler equation on the asset grid, then m = c + a.
  const double log_beta_r = std::log(model.params.beta * model.params.R);
  ws.endo_c =
      (-(log_beta_r + (1.0 - theta) * log_mu + tables.log_xi) / model.prefs.rho()).exp();
  ws.endo_m = ws.endo_c.colwise() + a_grid;

  Solution out;
  out.c.resize(n_m, n_z);
  out.v.resize(n_m, n_z);

  ArrayXd knots_m(n_a + 1), knots_c(n_a + 1);
  for (Index k = 0; k < n_z; ++k) {
    for (Index j = 1; j < n_a; ++j)
      if (!(ws.endo_m(j, k) > ws.endo_m(j - 1, k))) throw NonMonotoneGridError(k, j);

    // Anchor the constraint: (m, c) = (0, 0). Because a_0 = 0 the first
    // endogenous point has m = c, so interpolation gives c(m) = m on the
    // whole constrained segment.
    knots_m[0] = 0.0;
    knots_c[0] = 0.0;
    knots_m.tail(n_a) = ws.endo_m.col(k);
    knots_c.tail(n_a) = ws.endo_c.col(k);

    for (Index i = 0; i < n_m; ++i) {
      const double m = m_grid[i];
      double c = interp(knots_m, knots_c, m);
      if (c >= m - a_grid[0]) c = m;  // constrained; exact clamp guards roundoff
      const double a = m - c;
      const double mu_w = interp(a_grid, ws.mu.col(k), std::max(a, 0.0));
      const double w = (1.0 - beta) * std::pow(c, one_minus_rho) + beta * mu_w;
      out.c(i, k) = c;
      out.v(i, k) = std::pow(w, 1.0 / one_minus_rho);
    }
  }
  return out;
}

Solution initial_guess(const Model& model) {
  Solution sol;
  sol.c = model.grids.m_grid.replicate(1, model.income.n_states());
  sol.v = sol.c;
  return sol;
}

Solution solve_egm(const Model& model, long howard_k, const std::optional<Solution>& init) {
  if (howard_k < 1) throw InvalidArgument("solve_egm: howard_k must be at least 1");
  const auto start = std::chrono::steady_clock::now();

  Solution sol = init ? *init : initial_guess(model);
  EgmWorkspace ws;
  double change = std::numeric_limits<double>::infinity();
  for (long n = 1; n <= model.params.max_iters; ++n) {
    Solution next = egm_step(sol, model, ws);
    change = (next.c - sol.c).abs().maxCoeff();
    sol = std::move(next);
    if (change < model.params.conv_tol) {
      sol.iters = n;
      sol.converged = true;
      break;
    }
    for (long h = 1; h < howard_k; ++h)
      if (policy_value_update(sol, model, MuEval::interp_asset_grid) < model.params.conv_tol)
        break;
  }
  if (!sol.converged) throw MaxItersError(model.params.max_iters, change);

  sol.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return sol;
}

}  // namespace ezegm
