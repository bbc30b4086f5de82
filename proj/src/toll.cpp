#include "qslimit/toll.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "qslimit/constants.hpp"
#include "qslimit/errors.hpp"
#include "qslimit/roots.hpp"

namespace qsl {

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    const __int128 r = a % b;
    a = b;
    b = r;
  }
  return a;
}

Rational reduced(__int128 num, __int128 den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const __int128 g = gcd128(num, den);
  return g > 1 ? Rational{num / g, den / g} : Rational{num, den};
}

}  // namespace

double toll(double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("toll: u must lie in [0, 1]");
  return 2.0 * xlogx(u) + 2.0 * xlogx(1.0 - u) + 1.0;
}

double toll_derivative(double u) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("toll_derivative: u must lie in (0, 1)");
  return 2.0 * std::log(u) - 2.0 * std::log1p(-u);
}

double toll_inverse_upper(double x) {
  if (x <= -kEta) return 0.5;
  if (x >= 1.0) return 1.0;
  return bisect([x](double u) { return toll(u) - x; }, 0.5, 1.0, 0.0);
}

double toll_antiderivative(double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("toll_antiderivative: u must lie in [0, 1]");
  const double w = 1.0 - u;
  // d/du [u^2 ln u - u^2/2] = 2u ln u; d/du [-(w^2 ln w - w^2/2)] = 2w ln w.
  const double a = u > 0.0 ? u * u * std::log(u) : 0.0;
  const double b = w > 0.0 ? w * w * std::log(w) : 0.0;
  const double at_u = a - 0.5 * u * u - b + 0.5 * w * w + u;
  return at_u - 0.5;  // value of the bracket at u = 0 is +1/2
}

std::pair<double, double> toll_support() { return {-kEta, 1.0}; }

Rational operator+(const Rational& a, const Rational& b) {
  const __int128 g = gcd128(a.den, b.den);
  return reduced(a.num * (b.den / g) + b.num * (a.den / g), a.den / g * b.den);
}

Rational operator-(const Rational& a, const Rational& b) { return a + Rational{-b.num, b.den}; }

Rational operator*(const Rational& a, const Rational& b) {
  const __int128 g1 = gcd128(a.num, b.den);
  const __int128 g2 = gcd128(b.num, a.den);
  return reduced((a.num / g1) * (b.num / g2), (a.den / g2) * (b.den / g1));
}

Rational harmonic_exact(int n) {
  if (n < 0) throw DomainError("harmonic_exact: n must be nonnegative");
  if (n > kMaxExactHarmonic)
    throw ResourceError("harmonic_exact: n above " + std::to_string(kMaxExactHarmonic) +
                        " overflows 128-bit rationals");
  Rational h{0, 1};
  for (int k = 1; k <= n; ++k) h = h + Rational{1, k};
  return h;
}

long double harmonic(std::int64_t n) {
  if (n < 0) throw DomainError("harmonic: n must be nonnegative");
  if (n <= 1'000'000) {
    // Kahan summation from the small terms upward.
    long double sum = 0.0L;
    long double carry = 0.0L;
    for (std::int64_t k = n; k >= 1; --k) {
      const long double y = 1.0L / static_cast<long double>(k) - carry;
      const long double t = sum + y;
      carry = (t - sum) - y;
      sum = t;
    }
    return sum;
  }
  const long double x = static_cast<long double>(n);
  const long double x2 = x * x;
  constexpr long double euler_gamma = 0.577215664901532860606512090082402431L;
  return std::log(x) + euler_gamma + 1.0L / (2.0L * x) - 1.0L / (12.0L * x2) +
         1.0L / (120.0L * x2 * x2) - 1.0L / (252.0L * x2 * x2 * x2);
}

Rational mu_exact(int n) {
  const Rational h = harmonic_exact(n);
  return Rational{2 * (n + 1), 1} * h - Rational{4 * static_cast<__int128>(n), 1};
}

long double mu(std::int64_t n) {
  if (n < 0) throw DomainError("mu: n must be nonnegative");
  const long double x = static_cast<long double>(n);
  return 2.0L * (x + 1.0L) * harmonic(n) - 4.0L * x;
}

}  // namespace qsl
