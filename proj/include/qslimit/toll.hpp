#pragma once

#include <cstdint>
#include <utility>

namespace qsl {

/// The toll function g(u) = 2u ln u + 2(1-u) ln(1-u) + 1 on [0, 1], with the
/// limit value 1 at both endpoints. Throws DomainError outside [0, 1].
double toll(double u);

/// g'(u) = 2 ln u - 2 ln(1-u) on (0, 1).
double toll_derivative(double u);

/// The root u in [1/2, 1] of g(u) = x, for x in [-eta, 1].
double toll_inverse_upper(double x);

/// int_0^u g(s) ds in closed form.
double toll_antiderivative(double u);

/// Range of g(U): (-eta, 1).
std::pair<double, double> toll_support();

/// Exact rational value num/den with den > 0.
struct Rational {
  __int128 num;
  __int128 den;

  double to_double() const { return static_cast<double>(static_cast<long double>(num) / den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

Rational operator+(const Rational& a, const Rational& b);
Rational operator*(const Rational& a, const Rational& b);
Rational operator-(const Rational& a, const Rational& b);

/// Largest n for which harmonic_exact stays within 128-bit integers.
inline constexpr int kMaxExactHarmonic = 80;

/// H_n as an exact reduced fraction; throws ResourceError above kMaxExactHarmonic.
Rational harmonic_exact(int n);

/// H_n in extended precision (compensated summation up to 10^6, asymptotic series beyond).
long double harmonic(std::int64_t n);

/// Exact E X_n = 2(n+1)H_n - 4n for small n.
Rational mu_exact(int n);

/// E X_n = 2(n+1)H_n - 4n, mean comparison count of randomized Quicksort.
long double mu(std::int64_t n);

}  // namespace qsl
