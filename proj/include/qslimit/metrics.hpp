#pragma once

#include <functional>
#include <vector>

#include "qslimit/grid_function.hpp"

namespace qsl {

/// Quantiles F^-1(u_i) at the midpoints u_i = (i + 1/2)/m of (0, 1).
struct QuantileGrid {
  std::vector<double> quantiles;
  /// Probability mass of the law outside the x-domain the quantiles were
  /// read from; quantiles in that mass are clamped to the domain ends.
  double tail_mass = 0.0;

  std::size_t size() const { return quantiles.size(); }
  double probability(std::size_t i) const { return (static_cast<double>(i) + 0.5) / static_cast<double>(size()); }
};

inline constexpr std::size_t kDefaultQuantilePoints = 100000;
inline constexpr std::size_t kMinQuantilePoints = 64;

/// Left-continuous inverse of a grid CDF with linear interpolation inside
/// cells; flat stretches map to their left end.
QuantileGrid quantiles_from_cdf(const RealGrid& cdf, std::size_t m = kDefaultQuantilePoints);
QuantileGrid quantiles_from_density(const RealGrid& density, std::size_t m = kDefaultQuantilePoints);
/// Quantiles from a closed-form inverse distribution function.
QuantileGrid quantiles_from_inverse(const std::function<double(double)>& inverse_cdf,
                                    std::size_t m = kDefaultQuantilePoints);
QuantileGrid point_mass_quantiles(double at, std::size_t m = kDefaultQuantilePoints);
/// Inverse of the standard normal distribution function (Acklam start, Newton polish).
double normal_quantile(double u);

/// (int_0^1 |F^-1 - G^-1|^p du)^(1/p) by the midpoint rule on the common
/// probability grid. The two extreme cells use a fit a + b ln u (resp.
/// ln(1-u)) through the two outermost midpoints, which captures the
/// logarithmic growth of |F^-1 - G^-1|^p produced by exponential tails.
double wasserstein_p(const QuantileGrid& F, const QuantileGrid& G, double p);

/// Largest CDF difference at the common grid points.
double ks_distance(const RealGrid& F, const RealGrid& G);
/// (1/2) int |f - g| by the trapezoid rule on the common grid.
double tv_distance(const RealGrid& f, const RealGrid& g);
/// Largest absolute difference at the common grid points.
template <class Scalar>
double sup_distance(const GridFunction<Scalar>& f, const GridFunction<Scalar>& g) {
  if (!f.same_grid(g)) throw ContractViolation("sup_distance: grids differ");
  return static_cast<double>((f.values() - g.values()).abs().maxCoeff());
}

/// Resamples a density grid onto another grid by linear interpolation
/// (zero outside the source domain). Mass changes go into tol_mass.
RealGrid resample_density(const RealGrid& f, const GridSpec& spec);

}  // namespace qsl
