#pragma once

// Root-finding-free EGM fixed-point iteration on (c, V) for Epstein-Zin
// preferences. Each step inverts the Euler equation on the asset grid,
// recovers the endogenous cash-on-hand grid m = c + a, anchors the
// borrowing constraint with the point (0, 0), and updates the value.

#include <optional>

#include "ezegm/euler.hpp"
#include "ezegm/model.hpp"
#include "ezegm/types.hpp"

namespace ezegm {

/// Per-step arrays, all shaped (n_a, n_z).
struct EgmWorkspace {
  ArrayXXd mu;      // certainty equivalent mu_W(a_j, z_k)
  ArrayXXd xi;      // Xi(a_j, z_k)
  ArrayXXd endo_m;  // endogenous grid c_j + a_j
  ArrayXXd endo_c;  // consumption at the endogenous points
};

/// Certainty equivalent mu_W(a_j, z_k) of next-period transformed value.
ArrayXXd compute_mu(const Solution& solution_next, const Model& model);

/// Xi(a_j, z_k) = E[ W'(m')^(theta-1) c'(m')^-rho | z ].
ArrayXXd compute_xi(const Solution& solution_next, const Model& model);

/// c = (beta R mu^(1-theta) Xi)^(-1/rho), elementwise in log space.
ArrayXXd invert_euler(const ArrayXXd& mu, const ArrayXXd& xi, const DerivedPrefs& prefs,
                      const ModelParams& params);

/// One EGM iteration. Throws NonMonotoneGridError if the endogenous grid is
/// not strictly increasing for some state (upper-envelope refinement is out
/// of scope).
Solution egm_step(const Solution& current, const Model& model);
Solution egm_step(const Solution& current, const Model& model, EgmWorkspace& workspace);

/// Default starting point c(m, z) = m, V = c.
Solution initial_guess(const Model& model);

/// Iterates egm_step until the consumption sup-norm change drops below
/// conv_tol, with up to howard_k - 1 value-only updates after each policy
/// update (skipped early once the value change is below conv_tol).
Solution solve_egm(const Model& model, long howard_k = 1,
                   const std::optional<Solution>& init = std::nullopt);

}  // namespace ezegm
