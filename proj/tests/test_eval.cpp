#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ezegm/egm.hpp"
#include "ezegm/eval.hpp"
#include "test_support.hpp"

using namespace ezegm;
using test_support::degenerate_income;
using test_support::paper_model;

namespace {

// Single income state with beta R = 1 and gamma = rho: any constant
// consumption policy satisfies the Euler equation exactly, pinning the
// implied/computed consumption ratio at a chosen value.
Model stationary_model(double beta_r_scale = 1.0) {
  ModelParams params;
  params.beta = 0.96;
  params.R = beta_r_scale / params.beta;
  params.gamma = 2.0;
  params.rho = 2.0;
  IncomeProcess income = degenerate_income();
  Grids grids;
  grids.m_grid = ArrayXd::LinSpaced(50, 0.1, 10.0);
  grids.a_grid = ArrayXd::LinSpaced(50, 0.0, 9.0);
  return make_model(params, std::move(income), std::move(grids));
}

Solution constant_policy(const Model& model, double c_bar) {
  Solution sol;
  sol.c = ArrayXXd::Constant(model.grids.n_m(), model.income.n_states(), c_bar);
  sol.v = ArrayXXd::Constant(model.grids.n_m(), model.income.n_states(), 1.0);
  sol.converged = true;
  return sol;
}

}  // namespace

TEST_CASE("euler_error_at: floors at -16 when the Euler equation holds exactly") {
  const Model model = stationary_model();
  const Solution sol = constant_policy(model, 1.0);
  CHECK(euler_error_at(2.0, 0, sol, model) == kErrorFloor);
  CHECK(euler_error_at(5.0, 0, sol, model) == kErrorFloor);
}

TEST_CASE("euler_error_at: ratio 1.001 gives -3") {
  // Scaling beta R by 1.001^-rho moves the implied consumption by 0.1%.
  const Model model = stationary_model(std::pow(1.001, -2.0));
  const Solution sol = constant_policy(model, 1.0);
  CHECK(euler_error_at(2.0, 0, sol, model) == doctest::Approx(-3.0).epsilon(1e-9));
}

TEST_CASE("euler_error_at: rejects constrained points") {
  const Model model = stationary_model();
  const Solution sol = constant_policy(model, 1.0);
  CHECK_THROWS_AS(euler_error_at(1.0, 0, sol, model), ConstrainedPointError);
}

TEST_CASE("euler_error_at: converged EGM endogenous points satisfy the identity") {
  const Model model = paper_model(100, 1e-10);
  const Solution sol = solve_egm(model);
  const ArrayXXd mu = compute_mu(sol, model);
  const ArrayXXd xi = compute_xi(sol, model);
  const ArrayXXd c_endo = invert_euler(mu, xi, model.prefs, model.params);
  for (Index k : {Index(2), Index(7)}) {
    for (Index j : {Index(20), Index(60)}) {
      const double a = model.grids.a_grid[j];
      const auto terms = log_euler_terms_at(a, k, sol.c, sol.v, model);
      const double log_c_tilde =
          invert_euler_log(terms.log_ev_pow, terms.log_xi, model.params, model.prefs);
      const double err =
          std::log10(std::abs(1.0 - std::exp(log_c_tilde - std::log(c_endo(j, k)))));
      CHECK(err <= -10.0);
    }
  }
}

TEST_CASE("grid_errors: perfect policy reports the floor everywhere") {
  const Model model = stationary_model();
  const Solution sol = constant_policy(model, 1.0);
  const EulerErrorReport rep = grid_errors(sol, model);
  CHECK(rep.n_points > 0);
  CHECK(rep.mean_l1 == kErrorFloor);
  CHECK(rep.max_linf == kErrorFloor);
  CHECK(rep.weighting == "grid");
}

TEST_CASE("grid_errors: EGM at the paper calibration") {
  const Model model = paper_model(100);
  const Solution sol = solve_egm(model);
  const EulerErrorReport rep = grid_errors(sol, model);
  CHECK(rep.max_linf >= rep.mean_l1);
  CHECK(rep.mean_l1 < -4.0);
  CHECK(rep.mean_l1 > -6.0);
  CHECK(rep.n_points > 500);  // 80 interior points x 10 states minus constrained
}

TEST_CASE("simulate: hand dynamics with R = 1 and degenerate income") {
  ModelParams params;
  params.R = 1.0;
  IncomeProcess income = degenerate_income();
  Grids grids;
  grids.m_grid = ArrayXd::LinSpaced(20, 0.1, 10.0);
  grids.a_grid = ArrayXd::LinSpaced(20, 0.0, 9.0);
  const Model model = make_model(params, std::move(income), std::move(grids));
  Solution sol;
  sol.c = model.grids.m_grid.replicate(1, 1);  // consume everything
  sol.v = sol.c;
  const SimPanel panel = simulate(sol, model, 5, 10, 0, 42);
  CHECK((panel.wealth == 1.0).all());  // y forever from the first period on
  CHECK((panel.state == 0).all());
}

TEST_CASE("simulate: identical seeds give bit-identical panels") {
  const Model model = paper_model(60);
  const Solution sol = solve_egm(model);
  const SimPanel a = simulate(sol, model, 200, 80, 20, 987);
  const SimPanel b = simulate(sol, model, 200, 80, 20, 987);
  const SimPanel c = simulate(sol, model, 200, 80, 20, 988);
  CHECK((a.wealth == b.wealth).all());
  CHECK((a.state == b.state).all());
  CHECK_FALSE((a.wealth == c.wealth).all());
}

TEST_CASE("simulate: empirical state frequencies approach the stationary distribution") {
  const Model model = paper_model(60);
  const Solution sol = solve_egm(model);
  const SimPanel panel = simulate(sol, model, 10000, 300, 100, 2024);
  ArrayXd freq = ArrayXd::Zero(model.income.n_states());
  long count = 0;
  for (Index agent = 0; agent < panel.state.rows(); ++agent)
    for (Index t = panel.burn_in; t < panel.state.cols(); ++t) {
      freq[panel.state(agent, t)] += 1.0;
      ++count;
    }
  freq /= double(count);
  const double total_variation = 0.5 * (freq - model.income.stat_dist).abs().sum();
  CHECK(total_variation < 1e-2);
}

TEST_CASE("simulate: wealth stays positive, median lands in the impatient range") {
  const Model model = paper_model(100);
  const Solution sol = solve_egm(model);
  const SimPanel panel = simulate(sol, model, 2000, 500, 200, 7);
  CHECK((panel.wealth > 0.0).all());
  std::vector<double> terminal(panel.wealth.rows());
  for (Index agent = 0; agent < panel.wealth.rows(); ++agent)
    terminal[agent] = panel.wealth(agent, panel.wealth.cols() - 1);
  std::nth_element(terminal.begin(), terminal.begin() + terminal.size() / 2, terminal.end());
  const double median = terminal[terminal.size() / 2];
  CHECK(median > 1.0);
  CHECK(median < 8.0);
}

TEST_CASE("ergodic_errors: deterministic, capped, ordered") {
  const Model model = paper_model(100);
  const Solution sol = solve_egm(model);
  const SimPanel panel = simulate(sol, model, 10000, 500, 200, 11);
  const EulerErrorReport a = ergodic_errors(sol, model, panel);
  const EulerErrorReport b = ergodic_errors(sol, model, panel);
  CHECK(a.mean_l1 == b.mean_l1);
  CHECK(a.max_linf == b.max_linf);
  CHECK(a.n_points == b.n_points);
  CHECK(a.n_points > 1000);
  CHECK(a.n_points <= 50000);
  CHECK(a.max_linf >= a.mean_l1);
  CHECK(a.weighting == "ergodic");
}

TEST_CASE("ergodic vs grid errors stay close for EGM") {
  const Model model = paper_model(100);
  const Solution sol = solve_egm(model);
  const SimPanel panel = simulate(sol, model, 10000, 500, 200, 13);
  const EulerErrorReport grid = grid_errors(sol, model);
  const EulerErrorReport ergodic = ergodic_errors(sol, model, panel);
  CHECK(std::abs(grid.mean_l1 - ergodic.mean_l1) <= 0.3);
}

TEST_CASE("welfare_cost: zero for identical solutions, positive for a degraded one") {
  const Model model = paper_model(100);
  const Solution sol = solve_egm(model);
  CHECK(welfare_cost(sol, model, sol, model, 2000, 3) == 0.0);

  Solution degraded = sol;
  degraded.c *= 0.9;
  degraded.v *= 0.9;  // consuming 10% less in every state scales V by 0.9
  const double lambda = welfare_cost(degraded, model, sol, model, 2000, 3);
  CHECK(lambda > 0.0);
}

TEST_CASE("welfare_cost: invariant to common scaling of both value functions") {
  const Model model = paper_model(60);
  const Solution sol = solve_egm(model);
  Solution worse = sol;
  worse.c *= 0.95;
  worse.v *= 0.95;
  const double lambda = welfare_cost(worse, model, sol, model, 500, 5);
  Solution sol_scaled = sol, worse_scaled = worse;
  sol_scaled.v *= 3.7;
  worse_scaled.v *= 3.7;
  const double lambda_scaled = welfare_cost(worse_scaled, model, sol_scaled, model, 500, 5);
  CHECK(lambda_scaled == doctest::Approx(lambda).epsilon(1e-12));
}
