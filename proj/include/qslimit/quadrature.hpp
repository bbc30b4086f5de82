#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

namespace qsl::quad {

/// Nodes and weights of an n-point rule on [-1, 1].
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule by Newton iteration on P_n; cached per order.
const Rule& gauss_legendre(int order);

template <class T>
struct Estimate {
  T value{};
  double error = 0.0;
  long evaluations = 0;
};

namespace detail {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

template <class F>
auto gl_panel(F& f, const Rule& rule, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  using T = decltype(f(mid));
  T sum{};
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) sum += rule.weights[k] * f(mid + half * rule.nodes[k]);
  return T(sum * half);
}

template <class F, class T>
void gl_recurse(F& f, const Rule& rule, double a, double b, T whole, double tol, int depth,
                Estimate<T>& out) {
  const double mid = 0.5 * (a + b);
  const T left = gl_panel(f, rule, a, mid);
  const T right = gl_panel(f, rule, mid, b);
  out.evaluations += 2 * static_cast<long>(rule.nodes.size());
  const double err = magnitude(T(left + right - whole));
  if (err <= tol || depth <= 0 || mid <= a || mid >= b) {
    out.value += left + right;
    out.error += err;
    return;
  }
  gl_recurse(f, rule, a, mid, left, 0.5 * tol, depth - 1, out);
  gl_recurse(f, rule, mid, b, right, 0.5 * tol, depth - 1, out);
}

}  // namespace detail

/// Composite Gauss-Legendre with adaptive bisection: a panel is accepted when
/// the rule on the panel and on its two halves agree to the panel's share of
/// `tol`. Suited to integrands that are analytic inside the interval but may
/// have weak endpoint singularities (e.g. powers of g).
template <class F>
auto gauss_legendre_adaptive(F&& f, double a, double b, double tol = 1e-12, int order = 32,
                             int max_depth = 60) {
  const Rule& rule = gauss_legendre(order);
  using T = decltype(f(a));
  Estimate<T> out;
  const T whole = detail::gl_panel(f, rule, a, b);
  out.evaluations = static_cast<long>(rule.nodes.size());
  detail::gl_recurse(f, rule, a, b, whole, tol, max_depth, out);
  return out;
}

/// Gauss-Kronrod 7/15 nodes and weights (QUADPACK qk15), positive half.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights7 = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Panel {
  double a;
  double b;
  T value;
  double error;
};

/// One G7/K15 panel: returns the Kronrod value and |K15 - G7| as error.
template <class F>
auto gk15_panel(F& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  using T = decltype(f(mid));
  const T fc = f(mid);
  T kron = kKronrodWeights[7] * fc;
  T gauss = kGaussWeights7[3] * fc;
  for (int k = 0; k < 7; ++k) {
    const double dx = half * kKronrodNodes[k];
    const T s = f(mid - dx) + f(mid + dx);
    kron += kKronrodWeights[k] * s;
    if (k % 2 == 1) gauss += kGaussWeights7[k / 2] * s;
  }
  return Panel<T>{a, b, T(kron * half), detail::magnitude(T((kron - gauss) * half))};
}

/// Nested Clenshaw-Curtis nodes on [-1, 1]: the 65 points cos(k pi / 64),
/// with weights for the 65-point rule and for the 33-point rule on the even
/// indices.
struct NestedClenshawCurtis {
  std::array<double, 65> nodes;
  std::array<double, 65> weights_fine;
  std::array<double, 33> weights_coarse;
};

const NestedClenshawCurtis& clenshaw_curtis_64();

/// One nested Clenshaw-Curtis panel: the 65-point value with |CC65 - CC33|
/// as error. Well suited to oscillatory integrands spanning many radians.
template <class F>
auto clenshaw_curtis_panel(F& f, double a, double b) {
  const NestedClenshawCurtis& cc = clenshaw_curtis_64();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  using T = decltype(f(mid));
  T fine{};
  T coarse{};
  for (int k = 0; k <= 64; ++k) {
    const T v = f(mid + half * cc.nodes[k]);
    fine += cc.weights_fine[k] * v;
    if (k % 2 == 0) coarse += cc.weights_coarse[k / 2] * v;
  }
  return Panel<T>{a, b, T(fine * half), detail::magnitude(T((fine - coarse) * half))};
}

struct GaussKronrodRule {
  template <class F>
  auto operator()(F& f, double a, double b) const { return gk15_panel(f, a, b); }
  static constexpr long evaluations = 15;
};

struct ClenshawCurtisRule {
  template <class F>
  auto operator()(F& f, double a, double b) const { return clenshaw_curtis_panel(f, a, b); }
  static constexpr long evaluations = 65;
};

/// Globally adaptive integration over the partition given by `breaks` (sorted,
/// at least two points): the panel with the largest error estimate is bisected
/// until the summed estimate falls below max(abs_tol, rel_tol |I|) or
/// `max_panels` is reached. Panel sums are reduced in ascending abscissa order,
/// so the result does not depend on heap layout or scheduling.
template <class Rule = GaussKronrodRule, class F>
auto integrate_adaptive(F&& f, std::span<const double> breaks, double abs_tol, double rel_tol = 0.0,
                        std::size_t max_panels = 4000, Rule rule = {}) {
  using T = decltype(f(breaks[0]));
  thread_local std::vector<Panel<T>> heap;
  heap.clear();
  auto by_error = [](const Panel<T>& x, const Panel<T>& y) { return x.error < y.error; };
  Estimate<T> out;
  double total_error = 0.0;
  T total{};
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    heap.push_back(rule(f, breaks[i], breaks[i + 1]));
    total_error += heap.back().error;
    total += heap.back().value;
  }
  out.evaluations = Rule::evaluations * static_cast<long>(heap.size());
  std::make_heap(heap.begin(), heap.end(), by_error);
  while (total_error > std::max(abs_tol, rel_tol * detail::magnitude(total)) &&
         heap.size() < max_panels) {
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const Panel<T> worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end(), by_error);
      break;
    }
    const Panel<T> left = rule(f, worst.a, mid);
    const Panel<T> right = rule(f, mid, worst.b);
    out.evaluations += 2 * Rule::evaluations;
    total_error += left.error + right.error - worst.error;
    total += left.value + right.value - worst.value;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), by_error);
  }
  std::sort(heap.begin(), heap.end(), [](const Panel<T>& x, const Panel<T>& y) { return x.a < y.a; });
  out.value = T{};
  out.error = 0.0;
  for (const auto& p : heap) {
    out.value += p.value;
    out.error += p.error;
  }
  return out;
}

/// Adaptive G7/K15 over a partition.
template <class F>
auto gauss_kronrod(F&& f, std::span<const double> breaks, double abs_tol, double rel_tol = 0.0,
                   std::size_t max_panels = 4000) {
  return integrate_adaptive<GaussKronrodRule>(std::forward<F>(f), breaks, abs_tol, rel_tol, max_panels);
}

template <class F>
auto gauss_kronrod(F&& f, double a, double b, double abs_tol, double rel_tol = 0.0,
                   std::size_t max_panels = 4000) {
  const std::array<double, 2> breaks{a, b};
  return gauss_kronrod(std::forward<F>(f), std::span<const double>(breaks), abs_tol, rel_tol,
                       max_panels);
}

/// A fixed rule on [1/2, 1] built from Gauss-Legendre panels graded
/// geometrically toward u = 1, where g' diverges. Panel k covers
/// [1 - 2^-k, 1 - 2^-(k+1)]; node counts shrink with the panel width. Weights
/// integrate over [1/2, 1] (not doubled).
struct GradedHalfRule {
  std::vector<double> u;
  std::vector<double> one_minus_u;
  std::vector<double> weights;
};

const GradedHalfRule& graded_half_rule();

}  // namespace qsl::quad
