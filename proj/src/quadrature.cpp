#include "qslimit/quadrature.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "qslimit/errors.hpp"

namespace qsl::quad {

namespace {

Rule build_gauss_legendre(int n) {
  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const Rule& gauss_legendre(int order) {
  if (order < 1) throw DomainError("gauss_legendre: order must be positive");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<Rule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<Rule>(build_gauss_legendre(order));
  return *slot;
}

const GradedHalfRule& graded_half_rule() {
  static const GradedHalfRule rule = [] {
    GradedHalfRule r;
    // Widths 2^-k for k = 1..40; beyond that the remaining sliver has width
    // below 1e-12 and a bounded integrand.
    for (int k = 1; k <= 40; ++k) {
      const int order = k <= 2 ? 16 : k <= 6 ? 8 : k <= 12 ? 4 : 1;
      const double w_hi = std::ldexp(1.0, -k);       // 1 - a
      const double w_lo = std::ldexp(1.0, -(k + 1));  // 1 - b
      const Rule& gl = gauss_legendre(order);
      const double half = 0.5 * (w_hi - w_lo);
      const double mid = 0.5 * (w_hi + w_lo);
      for (int i = 0; i < order; ++i) {
        const double w = mid - half * gl.nodes[i];
        r.one_minus_u.push_back(w);
        r.u.push_back(1.0 - w);
        r.weights.push_back(half * gl.weights[i]);
      }
    }
    return r;
  }();
  return rule;
}

namespace {

// Clenshaw-Curtis weights for n + 1 Chebyshev extreme points (n even).
template <std::size_t M>
std::array<double, M> clenshaw_curtis_weights(int n) {
  std::array<double, M> w{};
  for (int k = 0; k <= n; ++k) {
    double s = 0.0;
    for (int j = 1; j <= n / 2; ++j) {
      const double b = (2 * j == n) ? 1.0 : 2.0;
      s += b / (4.0 * j * j - 1.0) * std::cos(2.0 * j * k * std::numbers::pi / n);
    }
    const double c = (k == 0 || k == n) ? 1.0 : 2.0;
    w[k] = c / n * (1.0 - s);
  }
  return w;
}

}  // namespace

const NestedClenshawCurtis& clenshaw_curtis_64() {
  static const NestedClenshawCurtis cc = [] {
    NestedClenshawCurtis r;
    for (int k = 0; k <= 64; ++k) r.nodes[k] = std::cos(k * std::numbers::pi / 64.0);
    r.weights_fine = clenshaw_curtis_weights<65>(64);
    r.weights_coarse = clenshaw_curtis_weights<33>(32);
    return r;
  }();
  return cc;
}

}  // namespace qsl::quad
