#pragma once

#include <cmath>
#include <numbers>

namespace qsl {

/// Fixed numbers attached to the limiting Quicksort law.
///
/// `sigma2` is Var Y, `eta` is -g(1/2), `rho` the per-step d2 contraction
/// factor, `L0` the largest root of e^L = 6 L^2 and `p0` the nontrivial root of
/// (2/(p+1))^(1/p) = (2/3)^(1/2).
struct Constants {
  double sigma2;
  double eta;
  double rho;
  double L0;
  double p0;

  double sigma() const { return std::sqrt(sigma2); }
};

inline constexpr double kSigma2 = 7.0 - 2.0 * std::numbers::pi * std::numbers::pi / 3.0;
inline constexpr double kEta = 2.0 * std::numbers::ln2 - 1.0;

/// Computed once on first use; the root finders run under a static initializer.
const Constants& constants();

double solve_L0();
double solve_p0();

/// A := (Var Z0 + sigma^2)^(1/2), the scale appearing in every convergence bound.
inline double bound_scale(double var_z0) { return std::sqrt(var_z0 + kSigma2); }

}  // namespace qsl
