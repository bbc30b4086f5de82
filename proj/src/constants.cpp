#include "qslimit/constants.hpp"

#include "qslimit/roots.hpp"

namespace qsl {

double solve_L0() {
  // Log form L - ln 6 - 2 ln L is increasing for L > 2 and brackets the larger root.
  return bisect([](double L) { return L - std::log(6.0) - 2.0 * std::log(L); }, 4.0, 6.0, 0.0);
}

double solve_p0() {
  const double target = 0.5 * std::log(2.0 / 3.0);
  return bisect([target](double p) { return std::log(2.0 / (p + 1.0)) / p - target; }, 5.0, 8.0,
                0.0);
}

const Constants& constants() {
  static const Constants c{kSigma2, kEta, std::sqrt(2.0 / 3.0), solve_L0(), solve_p0()};
  return c;
}

}  // namespace qsl
