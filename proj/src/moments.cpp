#include "qslimit/moments.hpp"

#include <cmath>

#include "qslimit/errors.hpp"
#include "qslimit/quadrature.hpp"
#include "qslimit/toll.hpp"

namespace qsl {

namespace {

double beta_integral(int j, int k) {
  // j! k! / (j+k+1)! = 1/(j+k+1) * prod_{i=1..k} i/(j+i)
  double v = 1.0 / (j + k + 1);
  for (int i = 1; i <= k; ++i) v *= static_cast<double>(i) / (j + i);
  return v;
}

MixedIntegralTable::Entry compute_entry(int j, int k, int l) {
  if (l == 0) return {beta_integral(j, k), 0.0};
  // E g(U) = 0; exact zero keeps E Y = 0 a fixed point of the recursion.
  if (j == 0 && k == 0 && l == 1) return {0.0, 0.0};
  auto integrand = [j, k, l](double u) {
    return std::pow(u, j) * std::pow(1.0 - u, k) * std::pow(toll(u), l);
  };
  const auto left = quad::gauss_legendre_adaptive(integrand, 0.0, 0.5, 2e-14);
  const auto right = quad::gauss_legendre_adaptive(integrand, 0.5, 1.0, 2e-14);
  return {left.value + right.value, left.error + right.error};
}

void check_moment_vector(const MomentVector& m) {
  if (m.values.size() < 2) throw ContractViolation("moment vector needs at least m_0 and m_1");
  if (m.values[0] != 1.0) throw ContractViolation("moment vector must have m_0 = 1");
}

}  // namespace

MixedIntegralTable::Entry MixedIntegralTable::lookup(int j, int k, int l) {
  if (j < 0 || k < 0 || l < 0) throw DomainError("mixed_integral: indices must be nonnegative");
  const std::array<int, 3> key{std::min(j, k), std::max(j, k), l};
  std::lock_guard lock(mutex_);
  const auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  const Entry e = compute_entry(key[0], key[1], key[2]);
  cache_.emplace(key, e);
  return e;
}

std::size_t MixedIntegralTable::size() const {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

MixedIntegralTable& mixed_integral_table() {
  static MixedIntegralTable table;
  return table;
}

double mixed_integral(int j, int k, int l) { return mixed_integral_table().lookup(j, k, l).value; }

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double v = 1.0;
  for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
  return std::round(v);
}

MomentVector moments_of(const StartLaw& law, int max_order) {
  return MomentVector{law.moments(max_order), law.describe(), 0};
}

MomentVector apply_S_moments(const MomentVector& m) {
  check_moment_vector(m);
  return MomentVector{apply_S_moment_values(m.values), m.origin, m.iteration + 1};
}

MomentVector iterate_moments(const MomentVector& m, int steps) {
  if (steps < 0) throw DomainError("iterate_moments: steps must be nonnegative");
  MomentVector cur = m;
  for (int i = 0; i < steps; ++i) cur = apply_S_moments(cur);
  return cur;
}

MomentVector limit_moments(int max_order) {
  if (max_order < 2) throw DomainError("limit_moments: order must be at least 2");
  return MomentVector{limit_moment_values<double>(max_order), "limit", -1};
}

}  // namespace qsl
