#include <doctest.h>

#include <cmath>

#include "ezegm/egm.hpp"
#include "ezegm/kernels.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace ezegm;
using test_support::degenerate_model;
using test_support::model_with;
using test_support::paper_model;

TEST_CASE("compute_mu: single income state collapses to W(Ra + y)") {
  ModelParams params;
  const Model model = degenerate_model(params, 50);
  const Solution next = initial_guess(model);  // c = v = m
  const ArrayXXd mu = compute_mu(next, model);
  for (Index j = 0; j < model.grids.n_a(); ++j) {
    const double m_next = params.R * model.grids.a_grid[j] + 1.0;
    const double v = interp(model.grids.m_grid, next.v.col(0), m_next);
    CHECK(mu(j, 0) == doctest::Approx(v_to_w(v, params.rho)).epsilon(1e-12));
  }
}

TEST_CASE("compute_mu: theta = 1 is the arithmetic mean of W") {
  ModelParams params;
  params.gamma = 2.0;
  params.rho = 2.0;
  const Model model = model_with(params, 40);
  const Solution next = initial_guess(model);
  const ArrayXXd mu = compute_mu(next, model);
  for (Index k = 0; k < model.income.n_states(); ++k) {
    for (Index j : {Index(0), Index(17), Index(39)}) {
      double mean_w = 0.0;
      for (Index l = 0; l < model.income.n_states(); ++l) {
        const double m_next = params.R * model.grids.a_grid[j] + model.income.y[l];
        const double v = interp(model.grids.m_grid, next.v.col(l), m_next);
        mean_w += model.income.trans(k, l) * v_to_w(v, params.rho);
      }
      CHECK(mu(j, k) == doctest::Approx(mean_w).epsilon(1e-12));
    }
  }
}

TEST_CASE("compute_mu: constant next value gives vbar^(1-rho)") {
  ModelParams params;
  const Model model = paper_model(40);
  Solution next = initial_guess(model);
  next.v.setConstant(2.5);
  const ArrayXXd mu = compute_mu(next, model);
  const double expected = std::pow(2.5, 1.0 - params.rho);
  CHECK((mu - expected).abs().maxCoeff() < 1e-12);
}

TEST_CASE("compute_mu: rejects a nonpositive value iterate") {
  const Model model = paper_model(40);
  Solution next = initial_guess(model);
  next.v.col(0).setConstant(-1.0);
  CHECK_THROWS_AS(compute_mu(next, model), DomainError);
}

TEST_CASE("compute_xi: theta = 1 is expected marginal utility") {
  ModelParams params;
  params.gamma = 2.0;
  params.rho = 2.0;
  const Model model = model_with(params, 40);
  const Solution next = initial_guess(model);
  const ArrayXXd xi = compute_xi(next, model);
  for (Index k = 0; k < model.income.n_states(); ++k) {
    for (Index j : {Index(3), Index(25)}) {
      double emu = 0.0;
      for (Index l = 0; l < model.income.n_states(); ++l) {
        const double m_next = params.R * model.grids.a_grid[j] + model.income.y[l];
        const double c = interp(model.grids.m_grid, next.c.col(l), m_next);
        emu += model.income.trans(k, l) * std::pow(c, -params.rho);
      }
      CHECK(xi(j, k) == doctest::Approx(emu).epsilon(1e-12));
    }
  }
}

TEST_CASE("compute_xi: single state with unit W is c'^-rho") {
  ModelParams params;
  params.gamma = 10.0;
  params.rho = 2.0 / 3.0;
  const Model model = degenerate_model(params, 50);
  Solution next = initial_guess(model);
  next.v.setConstant(1.0);  // W' = 1 identically
  const ArrayXXd xi = compute_xi(next, model);
  for (Index j : {Index(0), Index(20), Index(49)}) {
    const double m_next = params.R * model.grids.a_grid[j] + 1.0;
    const double c = interp(model.grids.m_grid, next.c.col(0), m_next);
    CHECK(xi(j, 0) == doctest::Approx(std::pow(c, -params.rho)).epsilon(1e-12));
  }
}

TEST_CASE("xi formula: hand evaluation with two equiprobable states") {
  // Direct check of E[W^(theta-1) c^-rho] at theta = 2, rho = 1 with
  // W' = {1, 4}, c' = {1, 2}.
  const double theta = 2.0, rho = 1.0;
  const double xi = 0.5 * std::pow(1.0, theta - 1.0) * std::pow(1.0, -rho) +
                    0.5 * std::pow(4.0, theta - 1.0) * std::pow(2.0, -rho);
  CHECK(xi == doctest::Approx(1.5));
}

TEST_CASE("invert_euler: theta = 1 reduces to the CRRA inversion") {
  ModelParams params;
  params.gamma = 2.0;
  params.rho = 2.0;
  const DerivedPrefs prefs = derive_prefs(params);
  ArrayXXd mu(2, 1), xi(2, 1);
  mu << 0.8, 1.3;  // irrelevant at theta = 1
  xi << 0.9, 2.1;
  const ArrayXXd c = invert_euler(mu, xi, prefs, params);
  for (Index j = 0; j < 2; ++j)
    CHECK(c(j, 0) ==
          doctest::Approx(std::pow(params.beta * params.R * xi(j, 0), -1.0 / params.rho))
              .epsilon(1e-12));
}

TEST_CASE("invert_euler: scalar arithmetic example") {
  ModelParams params;
  params.beta = 0.96;
  params.R = 1.02;
  params.gamma = 10.0;
  params.rho = 2.0 / 3.0;
  const DerivedPrefs prefs{1.0, 1.0 - params.rho};  // theta = 1 isolates beta R
  ArrayXXd mu(1, 1), xi(1, 1);
  mu << 1.0;
  xi << 1.0;
  const ArrayXXd c = invert_euler(mu, xi, prefs, params);
  CHECK(c(0, 0) == doctest::Approx(std::pow(0.9792, -1.5)).epsilon(1e-10));
  CHECK(c(0, 0) == doctest::Approx(1.0320).epsilon(1e-4));
}

TEST_CASE("invert_euler: deterministic stationary point at beta R = 1, theta = 1") {
  ModelParams params;
  params.beta = 0.96;
  params.R = 1.0 / 0.96;
  params.gamma = 2.0;
  params.rho = 2.0;
  const DerivedPrefs prefs = derive_prefs(params);
  ArrayXXd mu(1, 1), xi(1, 1);
  const double c_prev = 1.37;
  mu << 1.0;
  xi << std::pow(c_prev, -params.rho);  // degenerate income, c' = c
  const ArrayXXd c = invert_euler(mu, xi, prefs, params);
  CHECK(c(0, 0) == doctest::Approx(c_prev).epsilon(1e-12));
}

TEST_CASE("invert_euler rejects nonpositive inputs") {
  ModelParams params;
  const DerivedPrefs prefs = derive_prefs(params);
  ArrayXXd mu = ArrayXXd::Constant(2, 1, 1.0);
  ArrayXXd xi = ArrayXXd::Constant(2, 1, 1.0);
  xi(1, 0) = 0.0;
  CHECK_THROWS_AS(invert_euler(mu, xi, prefs, params), DomainError);
}

TEST_CASE("egm_step: endogenous grid satisfies m = c + a and the workspace invariants") {
  const Model model = paper_model(60);
  const Solution current = initial_guess(model);
  EgmWorkspace ws;
  egm_step(current, model, ws);
  CHECK((ws.mu > 0.0).all());
  CHECK((ws.xi > 0.0).all());
  CHECK(((ws.endo_m - ws.endo_c).colwise() - model.grids.a_grid).abs().maxCoeff() < 1e-14);
  for (Index k = 0; k < model.income.n_states(); ++k)
    for (Index j = 0; j < model.grids.n_a(); ++j)
      CHECK(ws.endo_m(j, k) > model.grids.a_grid[j]);
}

TEST_CASE("egm_step: constrained region has c = m and W = (1-b) m^(1-rho) + b mu(0)") {
  const Model model = paper_model(100);
  const Solution sol = solve_egm(model);
  const Solution stepped = egm_step(sol, model);
  const ArrayXXd mu = compute_mu(sol, model);
  const double beta = model.params.beta;
  const double one_minus_rho = model.prefs.one_minus_rho;

  long constrained_points = 0;
  for (Index k = 0; k < model.income.n_states(); ++k) {
    for (Index i = 0; i < model.grids.n_m(); ++i) {
      const double m = model.grids.m_grid[i];
      if (stepped.c(i, k) < m) continue;
      ++constrained_points;
      CHECK(stepped.c(i, k) == m);
      const double w_expected = (1.0 - beta) * std::pow(m, one_minus_rho) + beta * mu(0, k);
      CHECK(v_to_w(stepped.v(i, k), model.prefs.rho()) ==
            doctest::Approx(w_expected).epsilon(1e-12));
    }
  }
  CHECK(constrained_points > 0);  // low m_grid points bind at the paper calibration
}

TEST_CASE("egm_step: near-fixed-point of a dense VFI oracle") {
  // A 2000-point VFI solve pinned to 1e-9 sits within interpolation error of
  // the true policy; one EGM step should barely move it.
  const Model model = paper_model(2000);
  const auto oracle = oracles::dense_vfi(model, 1e-9, 120, 60);
  Solution sol;
  sol.c = oracle.c;
  sol.v = oracle.v;
  const Solution stepped = egm_step(sol, model);
  const double drift = (stepped.c - sol.c).abs().maxCoeff();
  CHECK(drift < 1e-4);
}

TEST_CASE("solve_egm: matches an independently coded CRRA EGM at theta = 1") {
  ModelParams params;
  params.gamma = 2.0;
  params.rho = 2.0;
  params.conv_tol = 1e-10;
  const Model model = model_with(params, 100);
  const Solution sol = solve_egm(model);
  const ArrayXXd reference = oracles::crra_egm_policy(model, 1e-10, 5000);
  CHECK((sol.c - reference).abs().maxCoeff() < 1e-8);
}

TEST_CASE("solve_egm: paper calibration iteration count and invariants") {
  const Model model = paper_model(100);
  const Solution sol = solve_egm(model);
  CHECK(sol.converged);
  CHECK(sol.iters > 100);
  CHECK(sol.iters < 200);
  CHECK(sol.solve_seconds < 5.0);

  // Policy and value monotone in m, consumption within (0, m].
  for (Index k = 0; k < model.income.n_states(); ++k) {
    for (Index i = 0; i < model.grids.n_m(); ++i) {
      CHECK(sol.c(i, k) > 0.0);
      CHECK(sol.c(i, k) <= model.grids.m_grid[i]);
      if (i > 0) {
        CHECK(sol.c(i, k) > sol.c(i - 1, k));
        CHECK(sol.v(i, k) > sol.v(i - 1, k));
        const double a_hi = model.grids.m_grid[i] - sol.c(i, k);
        const double a_lo = model.grids.m_grid[i - 1] - sol.c(i - 1, k);
        CHECK(a_hi >= a_lo - 1e-12);  // savings non-decreasing
      }
    }
  }
  // Consumption non-decreasing in the income state.
  for (Index k = 1; k < model.income.n_states(); ++k)
    CHECK(((sol.c.col(k) - sol.c.col(k - 1)) >= -1e-12).all());
}

TEST_CASE("solve_egm: howard_k = 5 cuts policy iterations roughly in half") {
  const Model model = paper_model(100);
  const Solution base = solve_egm(model, 1);
  const Solution fast = solve_egm(model, 5);
  CHECK(fast.iters < base.iters);
  CHECK(fast.iters > 40);
  CHECK(fast.iters < 100);
  CHECK((fast.c - base.c).abs().maxCoeff() < 40.0 * model.params.conv_tol);
}

TEST_CASE("solve_egm: Bellman consistency at convergence") {
  const Model model = paper_model(100, 1e-10);
  const Solution sol = solve_egm(model);
  const ArrayXXd mu = compute_mu(sol, model);
  const double beta = model.params.beta;
  const double one_minus_rho = model.prefs.one_minus_rho;
  for (Index k = 0; k < model.income.n_states(); ++k) {
    for (Index i = 0; i < model.grids.n_m(); ++i) {
      const double m = model.grids.m_grid[i];
      const double a = m - sol.c(i, k);
      if (a <= 1e-8) continue;  // constrained points hold with inequality
      const double mu_at = interp(model.grids.a_grid, mu.col(k), a);
      const double rhs = (1.0 - beta) * std::pow(sol.c(i, k), one_minus_rho) + beta * mu_at;
      const double w = v_to_w(sol.v(i, k), model.prefs.rho());
      CHECK(std::abs(w - rhs) <= 1e-8 * std::abs(w));
    }
  }
}

TEST_CASE("solve_egm: initialization independence") {
  const Model model = paper_model(100);
  const Solution from_m = solve_egm(model);
  Solution half = initial_guess(model);
  half.c *= 0.5;
  half.v = half.c;
  const Solution from_half = solve_egm(model, 1, half);
  CHECK((from_m.c - from_half.c).abs().maxCoeff() < 10.0 * model.params.conv_tol);
}

TEST_CASE("solve_egm: converges for rho > 1 with monotone positive policies") {
  for (double rho : {1.1, 1.5, 2.0, 3.0}) {
    ModelParams params;
    params.rho = rho;  // gamma stays 10
    const Model model = model_with(params, 100);
    const Solution sol = solve_egm(model);
    CHECK(sol.converged);
    CHECK((sol.c > 0.0).all());
    CHECK((sol.v > 0.0).all());
    for (Index k = 0; k < model.income.n_states(); ++k)
      for (Index i = 1; i < model.grids.n_m(); ++i) CHECK(sol.c(i, k) > sol.c(i - 1, k));
  }
}

TEST_CASE("solve_egm: hits MaxIters on an impossible tolerance cap") {
  Calibration cal;
  cal.n_m = 40;
  cal.n_a = 40;
  cal.params.conv_tol = 1e-14;
  cal.params.max_iters = 5;
  const Model model = build_model(cal);
  CHECK_THROWS_AS(solve_egm(model), MaxItersError);
}

TEST_CASE("egm_step: non-monotone endogenous grid aborts with a diagnostic") {
  // A violent dip in next-period consumption spikes Xi over a narrow asset
  // range, which drives the endogenous grid back on itself.
  const Model model = paper_model(60);
  Solution bad = solve_egm(model);
  for (Index k = 0; k < model.income.n_states(); ++k)
    for (Index i = 30; i < 34; ++i) bad.c(i, k) *= 0.02;
  try {
    egm_step(bad, model);
    FAIL("expected NonMonotoneGridError");
  } catch (const NonMonotoneGridError& e) {
    CHECK(e.index > 0);
  }
}
