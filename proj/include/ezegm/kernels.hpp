#pragma once

// Shared numerical primitives: monotone linear interpolation, power means,
// golden-section maximization and bisection root-finding. All functions are
// pure and templated on the scalar type; Eigen is the only dependency.

#include <algorithm>
#include <cmath>
#include <utility>

#include "ezegm/errors.hpp"
#include "ezegm/types.hpp"

namespace ezegm {

/// Piecewise-linear interpolant on strictly increasing knots.
template <class Scalar>
struct InterpTable {
  ArrayX<Scalar> xs;
  ArrayX<Scalar> ys;

  InterpTable(ArrayX<Scalar> xs_in, ArrayX<Scalar> ys_in)
      : xs(std::move(xs_in)), ys(std::move(ys_in)) {
    if (xs.size() != ys.size()) throw InvalidArgument("interp table: xs/ys length mismatch");
    if (xs.size() < 2) throw InvalidArgument("interp table: need at least 2 knots");
    for (Index i = 1; i < xs.size(); ++i)
      if (!(xs[i] > xs[i - 1])) throw InvalidArgument("interp table: knots not strictly increasing");
  }
};

namespace detail {

// Index of the segment's upper knot; clamping extends the end segments so
// queries outside [xs[0], xs[n-1]] extrapolate linearly.
template <class Scalar>
inline Index segment_upper(const Scalar* xs, Index n, Scalar x) {
  const Scalar* it = std::upper_bound(xs, xs + n, x);
  return std::clamp<Index>(static_cast<Index>(it - xs), 1, n - 1);
}

template <class Scalar>
inline Scalar lerp_segment(const Scalar* xs, const Scalar* ys, Index hi, Scalar x) {
  const Scalar t = (x - xs[hi - 1]) / (xs[hi] - xs[hi - 1]);
  return ys[hi - 1] + t * (ys[hi] - ys[hi - 1]);
}

}  // namespace detail

/// Linear interpolation with linear extrapolation beyond both ends.
/// xs must be strictly increasing (not checked here).
template <class Scalar>
inline Scalar interp(const Eigen::Ref<const ArrayX<Scalar>>& xs,
                     const Eigen::Ref<const ArrayX<Scalar>>& ys, Scalar x) {
  const Index hi = detail::segment_upper(xs.data(), xs.size(), x);
  return detail::lerp_segment(xs.data(), ys.data(), hi, x);
}

inline double interp(const Eigen::Ref<const ArrayXd>& xs, const Eigen::Ref<const ArrayXd>& ys,
                     double x) {
  return interp<double>(xs, ys, x);
}

template <class Scalar>
inline Scalar interp(const InterpTable<Scalar>& table, Scalar x) {
  return interp<Scalar>(table.xs, table.ys, x);
}

/// Weighted power mean (sum_l w_l v_l^p)^(1/p). Switches to a log-sum-exp
/// evaluation when |p| > 8: exponents like theta = -27 would otherwise push
/// v^p through the double range.
template <class DV, class DW, class Scalar = typename DV::Scalar>
Scalar power_mean(const Eigen::ArrayBase<DV>& values, const Eigen::ArrayBase<DW>& weights,
                  Scalar exponent) {
  if (exponent == Scalar(0)) throw InvalidArgument("power_mean: exponent must be nonzero");
  if (values.size() != weights.size()) throw InvalidArgument("power_mean: size mismatch");
  if (!(values > Scalar(0)).all()) throw DomainError("power_mean: nonpositive value");

  using std::abs;
  using std::exp;
  using std::log;
  using std::pow;
  if (abs(exponent) <= Scalar(8)) {
    const Scalar mean = (weights.derived() * values.derived().pow(exponent)).sum();
    return pow(mean, Scalar(1) / exponent);
  }
  const ArrayX<Scalar> t = exponent * values.derived().log();
  const Scalar shift = t.maxCoeff();
  const Scalar mean = (weights.derived() * (t - shift).exp()).sum();
  return exp((shift + log(mean)) / exponent);
}

/// Golden-section search for the maximum of a unimodal f on [lo, hi].
/// The iteration count is fixed upfront from the bracket/tolerance ratio, so
/// the final bracket width is at most tol. Returns (argmax, f(argmax)).
template <class Scalar, class Func>
std::pair<Scalar, Scalar> golden_max(Func&& f, Scalar lo, Scalar hi, Scalar tol) {
  if (!(lo < hi)) throw InvalidArgument("golden_max: need lo < hi");
  constexpr double invphi = 0.6180339887498949;   // 1/phi
  constexpr double invphi2 = 0.3819660112501051;  // 1/phi^2

  const int iters =
      tol >= hi - lo
          ? 0
          : static_cast<int>(std::ceil(std::log(double((hi - lo) / tol)) / -std::log(invphi)));

  Scalar x1 = lo + Scalar(invphi2) * (hi - lo);
  Scalar x2 = lo + Scalar(invphi) * (hi - lo);
  Scalar f1 = f(x1);
  Scalar f2 = f(x2);
  for (int it = 0; it < iters; ++it) {
    if (f1 > f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = lo + Scalar(invphi2) * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + Scalar(invphi) * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 > f2 ? std::pair<Scalar, Scalar>{x1, f1} : std::pair<Scalar, Scalar>{x2, f2};
}

/// Bisection root of r on [lo, hi]. Requires a sign change; throws
/// BracketError with the endpoint residuals otherwise. The iteration count is
/// fixed so the final bracket width is at most tol.
template <class Scalar, class Func>
Scalar bisect(Func&& r, Scalar lo, Scalar hi, Scalar tol) {
  if (!(lo < hi)) throw InvalidArgument("bisect: need lo < hi");
  Scalar r_lo = r(lo);
  Scalar r_hi = r(hi);
  if (r_lo == Scalar(0)) return lo;
  if (r_hi == Scalar(0)) return hi;
  if ((r_lo > Scalar(0)) == (r_hi > Scalar(0)))
    throw BracketError(double(lo), double(hi), double(r_lo), double(r_hi));

  const int iters =
      tol >= hi - lo
          ? 0
          : static_cast<int>(std::ceil(std::log2(double((hi - lo) / tol))));
  for (int it = 0; it < iters; ++it) {
    const Scalar mid = (lo + hi) / Scalar(2);
    const Scalar r_mid = r(mid);
    if (r_mid == Scalar(0)) return mid;
    if ((r_mid > Scalar(0)) == (r_lo > Scalar(0))) {
      lo = mid;
      r_lo = r_mid;
    } else {
      hi = mid;
    }
  }
  return (lo + hi) / Scalar(2);
}

}  // namespace ezegm
