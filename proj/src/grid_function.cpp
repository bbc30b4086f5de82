#include "qslimit/grid_function.hpp"

#include <algorithm>

namespace qsl {

std::string_view to_string(GridKind kind) {
  switch (kind) {
    case GridKind::density: return "density";
    case GridKind::cdf: return "cdf";
    case GridKind::cf: return "cf";
    case GridKind::generic: return "generic";
  }
  return "generic";
}

GridKind grid_kind_from_string(std::string_view name) {
  if (name == "density") return GridKind::density;
  if (name == "cdf") return GridKind::cdf;
  if (name == "cf" || name == "cf_real_imag") return GridKind::cf;
  if (name == "generic") return GridKind::generic;
  throw ContractViolation("unknown grid kind: " + std::string(name));
}

double grid_moment(const RealGrid& f, int order) {
  const Eigen::ArrayXd xs = f.abscissae();
  return (f.trapezoid_weights() * xs.pow(order) * f.values()).sum();
}

double grid_mean(const RealGrid& f) { return grid_moment(f, 1) / f.integral(); }

double grid_variance(const RealGrid& f) {
  const double mass = f.integral();
  const double m = grid_moment(f, 1) / mass;
  const Eigen::ArrayXd xs = f.abscissae() - m;
  return (f.trapezoid_weights() * xs.square() * f.values()).sum() / mass;
}

RealGrid density_to_cdf(const RealGrid& f) {
  const double h = f.spacing();
  Eigen::ArrayXd c(f.size());
  c[0] = 0.0;
  for (Eigen::Index i = 1; i < f.size(); ++i) c[i] = c[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
  c = c.min(1.0).max(0.0);
  const double tol = std::max({f.tol_mass(), c[0], 1.0 - c[c.size() - 1]});
  return RealGrid(f.lo(), f.hi(), std::move(c), GridKind::cdf, tol, f.slack());
}

}  // namespace qsl
