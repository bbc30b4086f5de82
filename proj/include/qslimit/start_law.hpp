#pragma once

#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qslimit/grid_function.hpp"

namespace qsl {

struct PointMassZero {};
struct NormalLaw {
  double variance;
};
struct UniformLaw {
  double lo;
  double hi;
};
struct GridLaw {
  RealGrid density;
};

/// The law of Z_0 from which the operator is iterated.
class StartLaw {
 public:
  using Variant = std::variant<PointMassZero, NormalLaw, UniformLaw, GridLaw>;

  static StartLaw point_mass_zero();
  /// Centered normal; variance must be positive.
  static StartLaw normal(double variance);
  static StartLaw uniform(double lo, double hi);
  static StartLaw grid(RealGrid density);

  /// "delta0", "normal:<variance>", "uniform:<lo>:<hi>".
  static StartLaw parse(std::string_view text);
  /// Inverse of parse for the closed-form laws; "grid" for grid laws.
  std::string describe() const;

  const Variant& variant() const { return law_; }
  bool is_point_mass() const { return std::holds_alternative<PointMassZero>(law_); }
  bool has_density() const { return !is_point_mass(); }

  double mean() const;
  double variance() const;
  /// E Z^0 .. E Z^max_order.
  std::vector<double> moments(int max_order) const;
  std::complex<double> cf(double t) const;
  double mgf(double lambda) const;

  /// Cell averages against hat functions on the grid, so that the trapezoid
  /// integral equals the exact mass F(hi) - F(lo); the missing mass becomes
  /// tol_mass. Throws UnsupportedRepresentation for the point mass.
  RealGrid density_on(const GridSpec& spec) const;

  /// Distribution function; used by quantile and KS comparisons.
  double cdf(double x) const;

 private:
  explicit StartLaw(Variant law) : law_(std::move(law)) {}
  Variant law_;
};

/// Hat-function projection of a law given through G(x) = int_{-inf}^x F and F.
/// Shared by closed-form start laws and the law of g(U).
template <class IntegratedCdf, class Cdf>
RealGrid hat_projection(const GridSpec& spec, IntegratedCdf&& G, Cdf&& F) {
  const Eigen::Index n = spec.points;
  const double h = spec.spacing();
  Eigen::ArrayXd gv(n);
  for (Eigen::Index i = 0; i < n; ++i) gv[i] = G(spec.x(i));
  Eigen::ArrayXd v(n);
  const double f_lo = F(spec.lo);
  const double f_hi = F(spec.hi);
  v[0] = 2.0 * ((gv[1] - gv[0]) / h - f_lo) / h;
  v[n - 1] = 2.0 * (f_hi - (gv[n - 1] - gv[n - 2]) / h) / h;
  for (Eigen::Index i = 1; i + 1 < n; ++i) v[i] = (gv[i + 1] - 2.0 * gv[i] + gv[i - 1]) / (h * h);
  v = v.max(0.0);
  Eigen::ArrayXd w = Eigen::ArrayXd::Constant(n, h);
  w[0] *= 0.5;
  w[n - 1] *= 0.5;
  const double mass = (w * v).sum();
  const double tol = std::max(std::abs(1.0 - mass), 1.0 - (f_hi - f_lo));
  return RealGrid(spec.lo, spec.hi, std::move(v), GridKind::density, std::max(tol, 0.0));
}

}  // namespace qsl
