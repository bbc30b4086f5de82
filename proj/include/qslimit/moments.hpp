#pragma once

#include <array>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "qslimit/start_law.hpp"

namespace qsl {

/// Memo of I(j, k, l) = E[U^j (1-U)^k g(U)^l] with quadrature error estimates.
/// Lookups are safe from any thread; each key is computed under the lock.
class MixedIntegralTable {
 public:
  struct Entry {
    double value;
    double error;
  };

  Entry lookup(int j, int k, int l);
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::array<int, 3>, Entry> cache_;
};

/// Process-wide table shared by the moment recursions.
MixedIntegralTable& mixed_integral_table();

/// I(j, k, l) to absolute accuracy 1e-13; exact beta value when l = 0.
double mixed_integral(int j, int k, int l);

/// Binomial coefficient as a floating value; exact for the orders used here.
double binomial(int n, int k);

/// One application of the operator to the moment sequence m_0..m_M:
/// (SZ)^m moments by the trinomial expansion over j + k + l = m.
template <class Scalar>
std::vector<Scalar> apply_S_moment_values(const std::vector<Scalar>& m) {
  const int M = static_cast<int>(m.size()) - 1;
  std::vector<Scalar> out(m.size(), Scalar(0));
  out[0] = Scalar(1);
  for (int order = 1; order <= M; ++order) {
    Scalar sum(0);
    for (int j = 0; j <= order; ++j) {
      for (int k = 0; j + k <= order; ++k) {
        const double coeff = binomial(order, j) * binomial(order - j, k);
        const Scalar term = Scalar(coeff) * Scalar(mixed_integral(j, k, order - j - k));
        sum += term * m[j] * m[k];
      }
    }
    out[order] = sum;
  }
  return out;
}

/// Moments of the fixed point with E Y = 0, solved order by order:
/// E Y^m (m-1)/(m+1) equals the trinomial sum without the (m,0,0), (0,m,0) terms.
template <class Scalar>
std::vector<Scalar> limit_moment_values(int max_order) {
  std::vector<Scalar> y(max_order + 1, Scalar(0));
  y[0] = Scalar(1);
  for (int order = 2; order <= max_order; ++order) {
    Scalar sum(0);
    for (int j = 0; j <= order; ++j) {
      for (int k = 0; j + k <= order; ++k) {
        if ((j == order && k == 0) || (j == 0 && k == order)) continue;
        const double coeff = binomial(order, j) * binomial(order - j, k);
        sum += Scalar(coeff) * Scalar(mixed_integral(j, k, order - j - k)) * y[j] * y[k];
      }
    }
    // 1 - I(m,0,0) - I(0,m,0) = (m-1)/(m+1), taken from the same table so that
    // y is a fixed point of apply_S_moment_values to working precision.
    const Scalar diag = Scalar(mixed_integral(order, 0, 0)) + Scalar(mixed_integral(0, order, 0));
    y[order] = sum / (Scalar(1) - diag);
  }
  return y;
}

/// Moments E Z^0..E Z^M of an iterate, tagged with where it came from.
struct MomentVector {
  std::vector<double> values;
  std::string origin;
  int iteration = 0;

  int max_order() const { return static_cast<int>(values.size()) - 1; }
};

inline constexpr int kDefaultMomentOrder = 12;

MomentVector moments_of(const StartLaw& law, int max_order = kDefaultMomentOrder);
MomentVector apply_S_moments(const MomentVector& m);
MomentVector iterate_moments(const MomentVector& m, int steps);
MomentVector limit_moments(int max_order = kDefaultMomentOrder);

}  // namespace qsl
