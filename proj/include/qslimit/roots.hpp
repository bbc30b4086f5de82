#pragma once

#include <cmath>
#include <utility>

#include "qslimit/errors.hpp"

namespace qsl {

/// Bisection on a bracketing interval. Stops when the bracket is narrower than
/// `tol` or when the midpoint can no longer be distinguished from an endpoint.
template <class F>
double bisect(F&& f, double lo, double hi, double tol = 1e-13) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0) == (fhi < 0)) throw DomainError("bisect: interval does not bracket a root");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((fmid < 0) == (flo < 0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace qsl
