#pragma once

#include <stdexcept>
#include <string>

namespace ezegm {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid model parameters or malformed inputs.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A quantity left its mathematical domain (nonpositive value, consumption, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A root bracket did not contain a sign change. Carries the diagnostic values.
class BracketError : public Error {
 public:
  BracketError(double lo, double hi, double r_lo, double r_hi)
      : Error("bisect: no sign change on [" + std::to_string(lo) + ", " + std::to_string(hi) +
              "], r(lo)=" + std::to_string(r_lo) + ", r(hi)=" + std::to_string(r_hi)),
        lo(lo),
        hi(hi),
        r_lo(r_lo),
        r_hi(r_hi) {}

  double lo, hi, r_lo, r_hi;
};

/// The endogenous cash-on-hand grid lost strict monotonicity for some income state.
class NonMonotoneGridError : public Error {
 public:
  NonMonotoneGridError(long state, long index)
      : Error("endogenous grid not strictly increasing at state " + std::to_string(state) +
              ", knot " + std::to_string(index)),
        state(state),
        index(index) {}

  long state, index;
};

/// Solver hit the iteration cap before converging.
class MaxItersError : public Error {
 public:
  explicit MaxItersError(long iters, double residual)
      : Error("no convergence after " + std::to_string(iters) +
              " iterations, last sup-norm change " + std::to_string(residual)),
        iters(iters),
        residual(residual) {}

  long iters;
  double residual;
};

/// Euler-error evaluation requested at a point where the constraint binds.
class ConstrainedPointError : public Error {
 public:
  using Error::Error;
};

}  // namespace ezegm
