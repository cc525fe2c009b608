#include "ezegm/baselines.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "ezegm/errors.hpp"
#include "ezegm/kernels.hpp"

namespace ezegm {

namespace {

constexpr double kConsumptionFloorFraction = 1e-10;
constexpr double kGoldenTolFraction = 1e-10;
constexpr double kBisectTolFraction = 1e-12;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

std::string to_string(SolverMode mode) { return mode == SolverMode::fast ? "fast" : "accurate"; }

ArrayXXd mu_v_on_asset_grid(const Solution& next, const Model& model) {
  const auto tables = asset_grid_expectations(next.c, next.v, model, false);
  return (tables.log_ev_pow / model.prefs.one_minus_gamma()).exp();
}

double vfi_objective(double c, double m, Index z, const Solution& next, const Model& model,
                     SolverMode mode, const ArrayXXd* mu_v_grid) {
  if (!(c > 0.0) || !(c <= m)) throw DomainError("vfi_objective: need 0 < c <= m");
  const double a = m - c;
  double mu_v;
  if (mode == SolverMode::fast) {
    if (mu_v_grid == nullptr) throw InvalidArgument("vfi_objective: fast mode needs mu_v grid");
    mu_v = interp(model.grids.a_grid, mu_v_grid->col(z), a);
  } else {
    mu_v = std::exp(log_ev_pow_at(a, z, next.v, model) / model.prefs.one_minus_gamma());
  }
  const double one_minus_rho = model.prefs.one_minus_rho;
  const double beta = model.params.beta;
  const double w =
      (1.0 - beta) * std::pow(c, one_minus_rho) + beta * std::pow(mu_v, one_minus_rho);
  return std::pow(w, 1.0 / one_minus_rho);
}

Solution solve_vfi(const Model& model, SolverMode mode, long howard_k) {
  if (howard_k < 1) throw InvalidArgument("solve_vfi: howard_k must be at least 1");
  const auto start = Clock::now();
  const Index n_m = model.grids.n_m();
  const Index n_z = model.income.n_states();
  const double conv_tol = model.params.conv_tol;

  Solution sol;
  sol.c = model.grids.m_grid.replicate(1, n_z);
  sol.v = sol.c;

  ArrayXXd c_new(n_m, n_z), v_new(n_m, n_z);
  double last_dc = std::numeric_limits<double>::infinity();
  for (long n = 1; n <= model.params.max_iters; ++n) {
    ArrayXXd mu_v_grid;
    if (mode == SolverMode::fast) mu_v_grid = mu_v_on_asset_grid(sol, model);

    for (Index k = 0; k < n_z; ++k) {
      for (Index i = 0; i < n_m; ++i) {
        const double m = model.grids.m_grid[i];
        const double lo = kConsumptionFloorFraction * m;
        const auto f = [&](double c) {
          return vfi_objective(c, m, k, sol, model, mode, &mu_v_grid);
        };
        const auto [c_opt, v_opt] = golden_max(f, lo, m, kGoldenTolFraction * (m - lo));
        c_new(i, k) = c_opt;
        v_new(i, k) = v_opt;
      }
    }

    const double dc = (c_new - sol.c).abs().maxCoeff();
    const double dv_rel = ((v_new - sol.v).abs() / sol.v.abs()).maxCoeff();
    last_dc = dc;
    sol.c = c_new;
    sol.v = v_new;
    if (dc < conv_tol && dv_rel < conv_tol) {
      sol.iters = n;
      sol.converged = true;
      break;
    }
    const MuEval flavor =
        mode == SolverMode::fast ? MuEval::interp_asset_grid : MuEval::exact;
    for (long h = 1; h < howard_k; ++h)
      if (policy_value_update(sol, model, flavor) < conv_tol) break;
  }
  if (!sol.converged) throw MaxItersError(model.params.max_iters, last_dc);
  sol.solve_seconds = seconds_since(start);
  return sol;
}

double ti_residual(double c, double m, Index z, const Solution& next, const Model& model,
                   SolverMode mode, const ArrayXXd* mu_w_grid, const ArrayXXd* xi_grid) {
  if (!(c > 0.0) || !(c <= m)) throw DomainError("ti_residual: need 0 < c <= m");
  const double a = m - c;
  double log_mu_w, log_xi;
  if (mode == SolverMode::fast) {
    if (mu_w_grid == nullptr || xi_grid == nullptr)
      throw InvalidArgument("ti_residual: fast mode needs mu_w and xi grids");
    const double mu_w = interp(model.grids.a_grid, mu_w_grid->col(z), a);
    const double xi = interp(model.grids.a_grid, xi_grid->col(z), a);
    if (!(mu_w > 0.0) || !(xi > 0.0)) throw DomainError("ti_residual: nonpositive mu or xi");
    log_mu_w = std::log(mu_w);
    log_xi = std::log(xi);
  } else {
    const auto terms = log_euler_terms_at(a, z, next.c, next.v, model);
    log_mu_w = terms.log_ev_pow / model.prefs.theta;
    log_xi = terms.log_xi;
  }
  const double rho = model.prefs.rho();
  const double rhs = std::exp(std::log(model.params.beta * model.params.R) +
                              (1.0 - model.prefs.theta) * log_mu_w + log_xi);
  return std::pow(c, -rho) - rhs;
}

Solution solve_ti(const Model& model, SolverMode mode, long howard_k) {
  if (howard_k < 1) throw InvalidArgument("solve_ti: howard_k must be at least 1");
  const auto start = Clock::now();
  const Index n_m = model.grids.n_m();
  const Index n_z = model.income.n_states();
  const double conv_tol = model.params.conv_tol;
  const double theta = model.prefs.theta;
  const MuEval flavor = mode == SolverMode::fast ? MuEval::interp_asset_grid : MuEval::exact;

  Solution sol;
  sol.c = model.grids.m_grid.replicate(1, n_z);
  sol.v = sol.c;

  ArrayXXd c_new(n_m, n_z);
  double last_dc = std::numeric_limits<double>::infinity();
  for (long n = 1; n <= model.params.max_iters; ++n) {
    ArrayXXd mu_w_grid, xi_grid;
    if (mode == SolverMode::fast) {
      const auto tables = asset_grid_expectations(sol.c, sol.v, model, true);
      mu_w_grid = (tables.log_ev_pow / theta).exp();
      xi_grid = tables.log_xi.exp();
    }

    for (Index k = 0; k < n_z; ++k) {
      for (Index i = 0; i < n_m; ++i) {
        const double m = model.grids.m_grid[i];
        const auto r = [&](double c) {
          return ti_residual(c, m, k, sol, model, mode, &mu_w_grid, &xi_grid);
        };
        // r(m) >= 0 means the marginal utility of consuming everything still
        // exceeds the marginal value of saving: the constraint binds.
        if (r(m) >= 0.0) {
          c_new(i, k) = m;
        } else {
          const double lo = kConsumptionFloorFraction * m;
          try {
            c_new(i, k) = bisect(r, lo, m, kBisectTolFraction * (m - lo));
          } catch (const BracketError& e) {
            throw Error("ti: Euler bracket failed at m=" + std::to_string(m) + ", z=" +
                        std::to_string(k) + ": " + e.what());
          }
        }
      }
    }

    const double dc = (c_new - sol.c).abs().maxCoeff();
    last_dc = dc;
    sol.c = c_new;
    policy_value_update(sol, model, flavor);
    for (long h = 1; h < howard_k; ++h)
      if (policy_value_update(sol, model, flavor) < conv_tol) break;
    if (dc < conv_tol) {
      sol.iters = n;
      sol.converged = true;
      break;
    }
  }
  if (!sol.converged) throw MaxItersError(model.params.max_iters, last_dc);
  sol.solve_seconds = seconds_since(start);
  return sol;
}

}  // namespace ezegm
