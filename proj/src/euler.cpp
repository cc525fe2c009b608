#include "ezegm/euler.hpp"

#include <cmath>
#include <limits>

#include "ezegm/errors.hpp"
#include "ezegm/kernels.hpp"

namespace ezegm {

namespace {

// Stack-buffer capacity of the pointwise evaluators.
constexpr Index kMaxStates = 64;

// Next-period values and consumption are positive at the knots, but linear
// extrapolation above the grid can undershoot on rough transition iterates
// (value function iteration's early sweeps). Extrapolated queries are
// floored here; genuinely diverging iterates are caught at the knots.
constexpr double kInterpFloor = 1e-30;

void check_state_count(Index n_z) {
  if (n_z > kMaxStates) throw InvalidArgument("more than 64 income states not supported");
}

// Interior nonpositive results flag a diverging iterate; extrapolated
// undershoot is floored.
double positive_interp(const ArrayXd& xs, const Eigen::Ref<const ArrayXd>& ys, double x,
                       const char* what) {
  const double out = interp(xs, ys, x);
  if (out > kInterpFloor) return out;
  if (x >= xs[0] && x <= xs[xs.size() - 1] && !(out > 0.0)) throw DomainError(what);
  return kInterpFloor;
}

double checked_lerp(const Eigen::Ref<const ArrayXd>& ys, Index hi, double t, double x,
                    const ArrayXd& xs, const char* what) {
  const double out = ys[hi - 1] + t * (ys[hi] - ys[hi - 1]);
  if (out > kInterpFloor) return out;
  if (x >= xs[0] && x <= xs[xs.size() - 1] && !(out > 0.0)) throw DomainError(what);
  return kInterpFloor;
}

}  // namespace

Model make_model(const ModelParams& params, IncomeProcess income, Grids grids) {
  return Model{params, derive_prefs(params), std::move(income), std::move(grids)};
}

namespace {

// Linear interpolation of (xs, ys) at an ascending query vector; one forward
// sweep instead of a binary search per query.
void interp_ascending(const ArrayXd& xs, const Eigen::Ref<const ArrayXd>& ys,
                      const ArrayXd& queries, Eigen::Ref<ArrayXd> out) {
  const Index n = xs.size();
  Index hi = 1;
  for (Index q = 0; q < queries.size(); ++q) {
    const double x = queries[q];
    while (hi < n - 1 && xs[hi] < x) ++hi;
    const double t = (x - xs[hi - 1]) / (xs[hi] - xs[hi - 1]);
    out[q] = ys[hi - 1] + t * (ys[hi] - ys[hi - 1]);
  }
}

}  // namespace

AssetGridExpectations asset_grid_expectations(const ArrayXXd& c_next, const ArrayXXd& v_next,
                                              const Model& model, bool need_xi) {
  const Index n_a = model.grids.n_a();
  const Index n_z = model.income.n_states();
  const double one_minus_gamma = model.prefs.one_minus_gamma();
  const double rho = model.prefs.rho();

  if (!(v_next > 0.0).all()) throw DomainError("expectations: value iterate not positive");
  if (need_xi && !(c_next > 0.0).all())
    throw DomainError("expectations: consumption iterate not positive");

  ArrayXXd v_interp(n_a, n_z);
  ArrayXXd c_interp(need_xi ? n_a : 0, need_xi ? n_z : 0);
  ArrayXd m_next(n_a);
  for (Index l = 0; l < n_z; ++l) {
    m_next = model.params.R * model.grids.a_grid + model.income.y[l];
    interp_ascending(model.grids.m_grid, v_next.col(l), m_next, v_interp.col(l));
    if (need_xi) interp_ascending(model.grids.m_grid, c_next.col(l), m_next, c_interp.col(l));
  }
  v_interp = v_interp.max(kInterpFloor);
  if (need_xi) c_interp = c_interp.max(kInterpFloor);

  AssetGridExpectations out;
  const ArrayXXd log_v = v_interp.log();

  // log-sum-exp over destination states, shifted by the per-asset-row max so
  // the matrix product with the transition rows stays in range.
  const ArrayXXd terms_mu = one_minus_gamma * log_v;
  const ArrayXd shift_mu = terms_mu.rowwise().maxCoeff();
  const ArrayXXd exp_mu = (terms_mu.colwise() - shift_mu).exp();
  out.log_ev_pow =
      ((exp_mu.matrix() * model.income.trans.transpose()).array().log().colwise() + shift_mu);

  if (need_xi) {
    const ArrayXXd terms_xi = (rho - model.params.gamma) * log_v - rho * c_interp.log();
    const ArrayXd shift_xi = terms_xi.rowwise().maxCoeff();
    const ArrayXXd exp_xi = (terms_xi.colwise() - shift_xi).exp();
    out.log_xi =
        ((exp_xi.matrix() * model.income.trans.transpose()).array().log().colwise() + shift_xi);
  }
  return out;
}

double log_ev_pow_at(double a, Index z, const ArrayXXd& v_next, const Model& model) {
  const Index n_z = model.income.n_states();
  check_state_count(n_z);
  const double one_minus_gamma = model.prefs.one_minus_gamma();
  const auto& m_grid = model.grids.m_grid;

  double terms[kMaxStates];
  double shift = -std::numeric_limits<double>::infinity();
  for (Index l = 0; l < n_z; ++l) {
    const double m_next = model.params.R * a + model.income.y[l];
    const double v = positive_interp(m_grid, v_next.col(l), m_next,
                                     "expectations: value iterate not positive");
    terms[l] = one_minus_gamma * std::log(v);
    shift = std::max(shift, terms[l]);
  }
  double acc = 0.0;
  for (Index l = 0; l < n_z; ++l) acc += model.income.trans(z, l) * std::exp(terms[l] - shift);
  return shift + std::log(acc);
}

LogEulerTerms log_euler_terms_at(double a, Index z, const ArrayXXd& c_next,
                                 const ArrayXXd& v_next, const Model& model) {
  const Index n_z = model.income.n_states();
  check_state_count(n_z);
  const double one_minus_gamma = model.prefs.one_minus_gamma();
  const double rho = model.prefs.rho();
  const auto& m_grid = model.grids.m_grid;

  double t_mu[kMaxStates], t_xi[kMaxStates];
  double shift_mu = -std::numeric_limits<double>::infinity();
  double shift_xi = shift_mu;
  for (Index l = 0; l < n_z; ++l) {
    const double m_next = model.params.R * a + model.income.y[l];
    // one segment lookup serves both interpolations
    const Index hi = detail::segment_upper(m_grid.data(), m_grid.size(), m_next);
    const double t = (m_next - m_grid[hi - 1]) / (m_grid[hi] - m_grid[hi - 1]);
    const double v = checked_lerp(v_next.col(l), hi, t, m_next, m_grid,
                                  "expectations: value iterate not positive");
    const double c = checked_lerp(c_next.col(l), hi, t, m_next, m_grid,
                                  "expectations: consumption iterate not positive");
    const double log_v = std::log(v);
    t_mu[l] = one_minus_gamma * log_v;
    t_xi[l] = (rho - model.params.gamma) * log_v - rho * std::log(c);
    shift_mu = std::max(shift_mu, t_mu[l]);
    shift_xi = std::max(shift_xi, t_xi[l]);
  }
  double acc_mu = 0.0, acc_xi = 0.0;
  for (Index l = 0; l < n_z; ++l) {
    const double w = model.income.trans(z, l);
    acc_mu += w * std::exp(t_mu[l] - shift_mu);
    acc_xi += w * std::exp(t_xi[l] - shift_xi);
  }
  return {shift_mu + std::log(acc_mu), shift_xi + std::log(acc_xi)};
}

double invert_euler_log(double log_ev_pow, double log_xi, const ModelParams& params,
                        const DerivedPrefs& prefs) {
  const double log_mu_scaled = (1.0 - prefs.theta) / prefs.theta * log_ev_pow;
  return -(std::log(params.beta * params.R) + log_mu_scaled + log_xi) / prefs.rho();
}

double policy_value_update(Solution& sol, const Model& model, MuEval flavor) {
  const Index n_m = model.grids.n_m();
  const Index n_z = model.income.n_states();
  const double beta = model.params.beta;
  const double one_minus_rho = model.prefs.one_minus_rho;
  const double theta = model.prefs.theta;

  ArrayXXd mu_w_grid;
  ArrayXXd v_prev;
  if (flavor == MuEval::interp_asset_grid) {
    const auto tables = asset_grid_expectations(sol.c, sol.v, model, false);
    mu_w_grid = (tables.log_ev_pow / theta).exp();
  } else {
    v_prev = sol.v;  // the update uses the previous iterate throughout
  }

  double sup_change = 0.0;
  for (Index k = 0; k < n_z; ++k) {
    for (Index i = 0; i < n_m; ++i) {
      const double a = std::max(model.grids.m_grid[i] - sol.c(i, k), 0.0);
      const double mu_w = flavor == MuEval::interp_asset_grid
                              ? interp(model.grids.a_grid, mu_w_grid.col(k), a)
                              : std::exp(log_ev_pow_at(a, k, v_prev, model) / theta);
      const double w = (1.0 - beta) * std::pow(sol.c(i, k), one_minus_rho) + beta * mu_w;
      const double v = std::pow(w, 1.0 / one_minus_rho);
      sup_change = std::max(sup_change, std::abs(v - sol.v(i, k)));
      sol.v(i, k) = v;
    }
  }
  return sup_change;
}

}  // namespace ezegm
