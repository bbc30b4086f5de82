#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>

namespace qsl {

/// Four-point Lagrange interpolation on a uniform grid starting at `lo` with
/// spacing `h`. The stencil is the two nodes on each side of x, shifted inward
/// near the ends. Arguments outside the grid are clamped to it.
template <class Scalar>
Scalar cubic_at(const Eigen::Array<Scalar, Eigen::Dynamic, 1>& v, double lo, double h, double x) {
  const Eigen::Index n = v.size();
  double s = (x - lo) / h;
  s = std::clamp(s, 0.0, static_cast<double>(n - 1));
  Eigen::Index j = static_cast<Eigen::Index>(s) - 1;
  j = std::clamp<Eigen::Index>(j, 0, n - 4);
  const double r = s - static_cast<double>(j);  // position relative to node j, in [0, 3]
  const double r1 = r - 1.0;
  const double r2 = r - 2.0;
  const double r3 = r - 3.0;
  const double w0 = -r1 * r2 * r3 / 6.0;
  const double w1 = r * r2 * r3 / 2.0;
  const double w2 = -r * r1 * r3 / 2.0;
  const double w3 = r * r1 * r2 / 6.0;
  return w0 * v[j] + w1 * v[j + 1] + w2 * v[j + 2] + w3 * v[j + 3];
}

/// 9/16 / 24: the cubic interpolation error is at most this times h^4 max|f''''|,
/// and h^4 f'''' is estimated by the fourth difference.
inline constexpr double kCubicErrorFactor = 9.0 / 16.0 / 24.0;

/// Estimate of the cubic interpolation error from the largest fourth difference.
template <class Scalar>
double cubic_error_estimate(const Eigen::Array<Scalar, Eigen::Dynamic, 1>& v) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i + 4 < v.size(); ++i) {
    const Scalar d4 = v[i] - 4.0 * v[i + 1] + 6.0 * v[i + 2] - 4.0 * v[i + 3] + v[i + 4];
    worst = std::max(worst, static_cast<double>(std::abs(d4)));
  }
  return kCubicErrorFactor * worst;
}

}  // namespace qsl
