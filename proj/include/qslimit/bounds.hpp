#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qsl {

/// A named bound value with its inputs and validity. When a precondition
/// fails the value is still computed and `valid` is false with `reason` set.
struct BoundReport {
  std::string name;
  double value = 0.0;
  std::map<std::string, double> inputs;
  bool valid = true;
  std::string reason;
  /// Which route produced the value, when several apply.
  std::string route;

  friend bool operator==(const BoundReport&, const BoundReport&) = default;
};

// ---- characteristic function decay constants c_p -----------------------------

struct CpValue {
  double value;
  std::string route;
};

/// Smallest constant c_p with |phi_n(t)| <= c_p |t|^-p obtainable from the
/// ladder: direct values on [0, 1], the doubling map for p < 2, the (p -> p+1)
/// recursion for p > 2, and the blanket 2^(p^2 + 6p). Throws DomainError for p < 0.
CpValue cp_ladder(double p);
inline double cp(double p) { return cp_ladder(p).value; }

/// c_{p+1} from c_p by the one-step recursion; requires p > 1.
double cp_step(double p, double cp_value);

/// (32 pi^2 / t^2)(ln(t / 4 pi) + 2), valid for t >= 1.72.
BoundReport cf_log_bound(double t);

// ---- density sup-norm error -------------------------------------------------

/// Exponent constant multiplying sqrt(n) in the fn3 bound, in closed form.
double fn3_sqrt_constant_exact();
inline constexpr double kFn3SqrtConstant = 3.7;
/// Rounded base in the simplified fn2 form 2297 A b^n; b exceeds (2/3)^(5/18).
inline constexpr double kFn2RoundedBase = 0.8935;
/// 2/3 rounded up to four digits; fn3 uses it where that can only enlarge the value.
inline constexpr double kFn3RoundedBase = 0.6667;

struct DensitySupError {
  BoundReport fn1;
  BoundReport fn2;
  BoundReport fn3;
  /// Minimum over the valid members (fn1 included only when valid).
  BoundReport best;
};

/// Bounds on sup_x |f_n(x) - f(x)| with A = (Var Z0 + sigma^2)^(1/2).
/// fn1 uses c_p from the ladder. fn2 is evaluated in the rounded-base form;
/// fn3 uses the constant 3.7 and the larger of the exact and four-digit bases.
/// Both are the forms whose printed values are commonly quoted; the exact
/// variants are kept in `inputs`.
DensitySupError density_sup_error(int n, double A, double p = 3.5);

/// Total variation bound 135 A n (2/3)^(n/2 - 3.7 sqrt n).
BoundReport tv_error(int n, double A);
/// 384 e ln(3/2) / pi, the constant the value 135 rounds up.
double tv_constant();

// ---- moment generating functions ------------------------------------------

/// K_L with psi(lambda) <= exp(K_L lambda^2) preserved on |lambda| <= L
/// (or on -L <= lambda <= 0 when negative_side).
double mgf_KL(double L, bool negative_side);

/// Upper bound on psi_Y(lambda). With `refined`, |lambda| <= 0.42 uses K = 1.
double ymgf_upper(double lambda, bool refined = false);

/// exp(gamma e^lambda / lambda); valid only for large lambda. Requires gamma < 2/e.
BoundReport mgf_lower(double lambda, double gamma);

/// P(Y > y) <= exp(-y (ln y - 1 - ln 2)) for y >= 2 e^{L0}.
BoundReport tail_upper(double y);
double tail_threshold();

/// |psi_n(lambda) - psi_Y(lambda)| <= sqrt(2) A |lambda| e^{2 K_L lambda^2} (2/3)^{n/2}.
BoundReport mgf_conv_error(int n, double lambda, double var_z0, double K_L, double L);

// ---- d_p rates --------------------------------------------------------------

/// Geometric d_p upper rate beta_p for p >= 1.
double dp_upper_rate(double p, double eps);

struct LowerRates {
  double dp_rate;
  double d2_rate_sup;
  double ks_rate_sup;
  /// r_p = 2^-q for p >= 3.
  std::optional<double> rp;
  std::optional<double> q;
};

LowerRates lower_rates(int p);

/// Residual of 2^{2q(q-p)/(p(q-2))} = (p+1)/2 in log form.
double rp_residual(int p, double q);

/// Bounds for an n-step iterate, as written next to computed outputs.
std::vector<BoundReport> iterate_certificate(int n, double var_z0);

}  // namespace qsl
