#include "qslimit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qslimit/errors.hpp"

namespace qsl {

namespace {

void check_size(std::size_t m) {
  if (m < kMinQuantilePoints) throw ContractViolation("quantile grid needs at least 64 points");
}

// int_0^{1/m} (a + b ln u) du with a, b through (u1, v1), (u2, v2).
double log_tail_cell(double v1, double v2, std::size_t m) {
  const double md = static_cast<double>(m);
  const double b = (v2 - v1) / std::log(3.0);
  const double a = v1 - b * std::log(0.5 / md);
  const double cell = (a + b * (std::log(1.0 / md) - 1.0)) / md;
  // Keep the fit only when it behaves like a growing tail; otherwise midpoint.
  return (cell >= 0.0 && b <= 0.0) ? cell : v1 / md;
}

}  // namespace

QuantileGrid quantiles_from_cdf(const RealGrid& cdf, std::size_t m) {
  check_size(m);
  if (cdf.kind() != GridKind::cdf) throw ContractViolation("quantiles_from_cdf: expected a cdf grid");
  const auto& c = cdf.values();
  const Eigen::Index n = c.size();
  QuantileGrid q;
  q.quantiles.resize(m);
  q.tail_mass = c[0] + (1.0 - c[n - 1]);
  Eigen::Index k = 0;  // first index with c[k] >= u
  for (std::size_t i = 0; i < m; ++i) {
    const double u = q.probability(i);
    while (k < n && c[k] < u) ++k;
    if (k == 0) {
      q.quantiles[i] = cdf.lo();
    } else if (k == n) {
      q.quantiles[i] = cdf.hi();
    } else {
      const double frac = (u - c[k - 1]) / (c[k] - c[k - 1]);
      q.quantiles[i] = cdf.x(k - 1) + frac * cdf.spacing();
    }
  }
  return q;
}

QuantileGrid quantiles_from_density(const RealGrid& density, std::size_t m) {
  return quantiles_from_cdf(density_to_cdf(density), m);
}

QuantileGrid quantiles_from_inverse(const std::function<double(double)>& inverse_cdf, std::size_t m) {
  check_size(m);
  QuantileGrid q;
  q.quantiles.resize(m);
  for (std::size_t i = 0; i < m; ++i) q.quantiles[i] = inverse_cdf(q.probability(i));
  return q;
}

QuantileGrid point_mass_quantiles(double at, std::size_t m) {
  check_size(m);
  return QuantileGrid{std::vector<double>(m, at), 0.0};
}

double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("normal_quantile: u must lie in (0, 1)");
  // 1 - u is exact here; the lower tail avoids cancellation in Phi(x) - u.
  if (u > 0.5) return -normal_quantile(1.0 - u);
  // Acklam's rational approximation.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01, -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  double x;
  if (u < 0.02425) {
    const double q = std::sqrt(-2.0 * std::log(u));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = u - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  // Halley steps on Phi(x) - u.
  for (int it = 0; it < 2; ++it) {
    const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - u;
    const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    const double step = e / pdf;
    x -= step / (1.0 + 0.5 * x * step);
  }
  return x;
}

double wasserstein_p(const QuantileGrid& F, const QuantileGrid& G, double p) {
  if (F.size() != G.size()) throw ContractViolation("wasserstein_p: probability grids differ");
  if (!(p >= 1.0)) throw DomainError("wasserstein_p: p must be >= 1");
  const std::size_t m = F.size();
  check_size(m);
  auto cell = [&](std::size_t i) { return std::pow(std::abs(F.quantiles[i] - G.quantiles[i]), p); };
  double inner = 0.0;
  for (std::size_t i = 1; i + 1 < m; ++i) inner += cell(i);
  const double md = static_cast<double>(m);
  const double total = inner / md + log_tail_cell(cell(0), cell(1), m) + log_tail_cell(cell(m - 1), cell(m - 2), m);
  return std::pow(std::max(total, 0.0), 1.0 / p);
}

double ks_distance(const RealGrid& F, const RealGrid& G) {
  if (!F.same_grid(G)) throw ContractViolation("ks_distance: grids differ");
  if (F.kind() != GridKind::cdf || G.kind() != GridKind::cdf) throw ContractViolation("ks_distance: expected cdf grids");
  return (F.values() - G.values()).abs().maxCoeff();
}

double tv_distance(const RealGrid& f, const RealGrid& g) {
  if (!f.same_grid(g)) throw ContractViolation("tv_distance: grids differ");
  if (f.kind() != GridKind::density || g.kind() != GridKind::density)
    throw ContractViolation("tv_distance: expected density grids");
  return 0.5 * (f.trapezoid_weights() * (f.values() - g.values()).abs()).sum();
}

RealGrid resample_density(const RealGrid& f, const GridSpec& spec) {
  Eigen::ArrayXd v(spec.points);
  for (Eigen::Index i = 0; i < spec.points; ++i) v[i] = f.linear_at(spec.x(i));
  Eigen::ArrayXd w = Eigen::ArrayXd::Constant(spec.points, spec.spacing());
  w[0] *= 0.5;
  w[spec.points - 1] *= 0.5;
  const double mass = (w * v).sum();
  return RealGrid(spec.lo, spec.hi, std::move(v), GridKind::density, f.tol_mass() + std::abs(1.0 - mass), f.slack());
}

}  // namespace qsl
