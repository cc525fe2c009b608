#include "ezegm/model.hpp"

#include <cmath>
#include <ostream>

namespace ezegm {

void validate(const ModelParams& params) {
  if (!(params.beta > 0.0 && params.beta < 1.0)) throw InvalidArgument("beta must be in (0,1)");
  if (!(params.R > 0.0)) throw InvalidArgument("R must be positive");
  if (!(params.gamma > 0.0)) throw InvalidArgument("gamma must be positive");
  if (params.gamma == 1.0) throw InvalidArgument("gamma = 1 (geometric-mean limit) not supported");
  if (!(params.rho > 0.0)) throw InvalidArgument("rho must be positive");
  if (params.rho == 1.0) throw InvalidArgument("rho = 1 (log-transform limit) not supported");
  if (!(params.conv_tol > 0.0)) throw InvalidArgument("conv_tol must be positive");
  if (params.max_iters < 1) throw InvalidArgument("max_iters must be at least 1");
}

DerivedPrefs derive_prefs(const ModelParams& params) {
  validate(params);
  return DerivedPrefs{(1.0 - params.gamma) / (1.0 - params.rho), 1.0 - params.rho};
}

bool satisfies_existence_condition(const ModelParams& params) {
  const double theta = (1.0 - params.gamma) / (1.0 - params.rho);
  return params.beta * std::pow(params.R, theta) < 1.0;
}

double v_to_w(double v, double rho) {
  if (!(v > 0.0)) throw DomainError("v_to_w: value must be positive");
  return std::pow(v, 1.0 - rho);
}

double w_to_v(double w, double rho) {
  if (!(w > 0.0)) throw DomainError("w_to_v: transformed value must be positive");
  return std::pow(w, 1.0 / (1.0 - rho));
}

ArrayXXd v_to_w(const ArrayXXd& v, double rho) {
  if (!(v > 0.0).all()) throw DomainError("v_to_w: value must be positive");
  return v.pow(1.0 - rho);
}

ArrayXXd w_to_v(const ArrayXXd& w, double rho) {
  if (!(w > 0.0).all()) throw DomainError("w_to_v: transformed value must be positive");
  return w.pow(1.0 / (1.0 - rho));
}

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

IncomeProcess tauchen(double persistence, double innovation_sd, Index n_states, double width) {
  if (!(std::abs(persistence) < 1.0)) throw InvalidArgument("tauchen: |persistence| must be < 1");
  if (!(innovation_sd > 0.0)) throw InvalidArgument("tauchen: innovation_sd must be positive");
  if (n_states < 2) throw InvalidArgument("tauchen: need at least 2 states");
  if (!(width > 0.0)) throw InvalidArgument("tauchen: width must be positive");

  IncomeProcess proc;
  const double uncond_sd = innovation_sd / std::sqrt(1.0 - persistence * persistence);
  proc.z_grid = ArrayXd::LinSpaced(n_states, -width * uncond_sd, width * uncond_sd);
  const double step = n_states > 1 ? proc.z_grid[1] - proc.z_grid[0] : 0.0;

  proc.trans.resize(n_states, n_states);
  for (Index k = 0; k < n_states; ++k) {
    const double mean = persistence * proc.z_grid[k];
    for (Index l = 0; l < n_states; ++l) {
      const double lo = (proc.z_grid[l] - mean - 0.5 * step) / innovation_sd;
      const double hi = (proc.z_grid[l] - mean + 0.5 * step) / innovation_sd;
      if (l == 0)
        proc.trans(k, l) = normal_cdf(hi);
      else if (l == n_states - 1)
        proc.trans(k, l) = 1.0 - normal_cdf(lo);
      else
        proc.trans(k, l) = normal_cdf(hi) - normal_cdf(lo);
    }
  }

  // Stationary distribution by iterating the transition map to a fixed point.
  VectorXd dist = VectorXd::Constant(n_states, 1.0 / double(n_states));
  for (int it = 0; it < 200000; ++it) {
    VectorXd next = proc.trans.transpose() * dist;
    next /= next.sum();
    const double change = (next - dist).cwiseAbs().maxCoeff();
    dist = next;
    if (change < 1e-13) break;
  }
  proc.stat_dist = dist.array();

  const ArrayXd y_raw = proc.z_grid.exp();
  proc.y = y_raw / (proc.stat_dist * y_raw).sum();
  return proc;
}

ArrayXd exp_spaced(Index n, double lo, double hi, double curvature) {
  ArrayXd out(n);
  const ArrayXd u = ArrayXd::LinSpaced(n, 0.0, 1.0);
  if (curvature == 0.0) {
    out = lo + u * (hi - lo);
  } else {
    const double denom = std::expm1(curvature);
    out = lo + ((u * curvature).unaryExpr([](double x) { return std::expm1(x); }) / denom) * (hi - lo);
  }
  out[0] = lo;
  out[n - 1] = hi;
  return out;
}

Grids build_grids(Index n_m, Index n_a, double m_max_multiple, double curvature,
                  const IncomeProcess& income) {
  if (n_m < 10 || n_a < 10) throw InvalidArgument("build_grids: need at least 10 points per grid");
  if (!(m_max_multiple > 0.0)) throw InvalidArgument("build_grids: m_max_multiple must be positive");

  const double m_max = m_max_multiple * income.mean_income();
  const double y_min = income.y.minCoeff();
  Grids grids;
  grids.a_grid = exp_spaced(n_a, 0.0, m_max - y_min, curvature);
  grids.m_grid = exp_spaced(n_m, kMinCashOnHand, m_max, curvature);
  return grids;
}

void write_solution_csv(std::ostream& os, const Grids& grids, const Solution& solution) {
  const auto saved = os.precision(17);
  os << "schema,z_index,m,c,v\n";
  for (Index k = 0; k < solution.c.cols(); ++k)
    for (Index i = 0; i < solution.c.rows(); ++i)
      os << "solution-v1," << k << ',' << grids.m_grid[i] << ',' << solution.c(i, k) << ','
         << solution.v(i, k) << '\n';
  os.precision(saved);
}

}  // namespace ezegm
