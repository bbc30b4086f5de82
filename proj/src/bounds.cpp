#include "qslimit/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "qslimit/constants.hpp"
#include "qslimit/errors.hpp"
#include "qslimit/roots.hpp"

namespace qsl {

namespace {

constexpr double kPi = std::numbers::pi;
const double kLn23 = std::log(2.0 / 3.0);

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void invalidate(BoundReport& r, const std::string& why) {
  if (r.valid) {
    r.valid = false;
    r.reason = why;
  } else {
    r.reason += "; " + why;
  }
}

}  // namespace

double cp_step(double p, double cp_value) {
  if (!(p > 1.0)) throw DomainError("cp_step: requires p > 1");
  return std::pow(2.0, p + 1.0) * std::pow(cp_value, 1.0 + 1.0 / p) * p / (p - 1.0);
}

CpValue cp_ladder(double p) {
  if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("cp: p must be a finite number >= 0");
  if (p == 0.0) return {1.0, "trivial"};
  CpValue best{std::pow(2.0, p * p + 6.0 * p), "blanket"};
  auto consider = [&best](double v, const char* route) {
    if (v < best.value) best = {v, route};
  };
  if (p <= 0.5) consider(std::pow(2.0, 2.0 * p), "interpolated");
  if (p >= 0.5 && p <= 1.0) consider(std::pow(2.0, 2.0 * p) * std::pow(kPi, 2.0 * p - 1.0), "direct");
  if (p > 0.5 && p < 2.0) {
    // c_{2s} <= Gamma(1-s)^2 / Gamma(2-2s) c_s^2 with s = p/2 < 1.
    const double s = 0.5 * p;
    const double half = cp_ladder(s).value;
    const double lg = 2.0 * std::lgamma(1.0 - s) - std::lgamma(2.0 - 2.0 * s);
    consider(std::exp(lg) * half * half, "doubling");
  }
  if (p > 2.0) consider(cp_step(p - 1.0, cp_ladder(p - 1.0).value), "step");
  return best;
}

BoundReport cf_log_bound(double t) {
  BoundReport r{"cf_log", 0.0, {{"t", t}}, true, "", ""};
  r.value = 32.0 * kPi * kPi / (t * t) * (std::log(t / (4.0 * kPi)) + 2.0);
  if (!(t >= 1.72)) invalidate(r, "requires t >= 1.72");
  return r;
}

double fn3_sqrt_constant_exact() { return std::sqrt(8.0 * std::numbers::ln2 / std::log(1.5)); }

DensitySupError density_sup_error(int n, double A, double p) {
  if (!(A > 0.0)) throw DomainError("density_sup_error: A must be positive");
  DensitySupError out;
  const double nd = n;

  out.fn1 = {"fn1", 0.0, {{"n", nd}, {"A", A}, {"p", p}}, true, "", ""};
  if (p > 1.0) {
    const CpValue c = cp_ladder(p);
    out.fn1.inputs["cp"] = c.value;
    out.fn1.route = c.route;
    out.fn1.value = A / (2.0 * kPi) * std::pow(2.0 * c.value / A, 2.0 / (p + 1.0)) *
                    (p + 1.0) / (p - 1.0) *
                    std::exp(kLn23 * (0.5 - 1.0 / (p + 1.0)) * nd);
  } else {
    out.fn1.value = std::numeric_limits<double>::infinity();
    invalidate(out.fn1, "requires p > 1");
  }
  if (!(nd > p + 1.0)) invalidate(out.fn1, "requires n > p + 1");

  out.fn2 = {"fn2", 2297.0 * A * std::pow(kFn2RoundedBase, nd), {{"n", nd}, {"A", A}}, true, "",
             "rounded_base"};
  out.fn2.inputs["exact_exponent_value"] = 2297.0 * A * std::exp(kLn23 * 5.0 * nd / 18.0);
  if (n < 5) invalidate(out.fn2, "requires n >= 5");

  auto fn3_value = [&](double c, double log_base) {
    return 128.0 * A / kPi * std::exp(log_base * (0.5 * nd - c * std::sqrt(std::max(nd, 0.0))));
  };
  // The four-digit base only enlarges the bound while the exponent is >= 0.
  const double fn3_exact_base = fn3_value(kFn3SqrtConstant, kLn23);
  const double fn3_rounded_base = fn3_value(kFn3SqrtConstant, std::log(kFn3RoundedBase));
  out.fn3 = {"fn3", std::max(fn3_exact_base, fn3_rounded_base), {{"n", nd}, {"A", A}}, true, "",
             fn3_rounded_base >= fn3_exact_base ? "constant_3.7_rounded_base" : "constant_3.7"};
  out.fn3.inputs["exact_base_value"] = fn3_exact_base;
  out.fn3.inputs["exact_constant_value"] = fn3_value(fn3_sqrt_constant_exact(), kLn23);
  if (n < 3) invalidate(out.fn3, "requires n >= 3");

  out.best = {"density_sup_error", std::numeric_limits<double>::infinity(), {{"n", nd}, {"A", A}, {"p", p}},
              false, "no member bound is valid", ""};
  for (const BoundReport* r : {&out.fn1, &out.fn2, &out.fn3}) {
    if (r->valid && r->value < out.best.value) {
      out.best.value = r->value;
      out.best.route = r->name;
      out.best.valid = true;
      out.best.reason.clear();
    }
  }
  if (!out.best.valid) out.best.value = std::min({out.fn1.value, out.fn2.value, out.fn3.value});
  return out;
}

double tv_constant() { return 384.0 * std::numbers::e * std::log(1.5) / kPi; }

BoundReport tv_error(int n, double A) {
  const double nd = n;
  BoundReport r{"fn1a", 0.0, {{"n", nd}, {"A", A}}, true, "", ""};
  r.value = 135.0 * A * nd * std::exp(kLn23 * (0.5 * nd - kFn3SqrtConstant * std::sqrt(std::max(nd, 0.0))));
  r.inputs["constant"] = tv_constant();
  if (n < 1) invalidate(r, "requires n >= 1");
  return r;
}

double mgf_KL(double L, bool negative_side) {
  if (!(L >= 0.0)) throw DomainError("mgf_KL: L must be >= 0");
  if (negative_side) return L <= 0.62 ? 0.5 : 1.25;
  if (L <= 0.42) return 1.0;
  if (L <= constants().L0) return 12.0;
  return 2.0 * std::exp(L) / (L * L);
}

double ymgf_upper(double lambda, bool refined) {
  if (refined) return std::exp(mgf_KL(std::abs(lambda), lambda < 0.0) * lambda * lambda);
  if (lambda <= 0.0) return std::exp(1.25 * lambda * lambda);
  if (lambda <= constants().L0) return std::exp(12.0 * lambda * lambda);
  return std::exp(2.0 * std::exp(lambda));
}

BoundReport mgf_lower(double lambda, double gamma) {
  if (!(gamma < 2.0 / std::numbers::e))
    throw PreconditionError("mgf_lower: gamma must be below 2/e, got " + fmt(gamma));
  BoundReport r{"mgf_lower", std::exp(gamma * std::exp(lambda) / lambda), {{"lambda", lambda}, {"gamma", gamma}},
                true, "asymptotic: valid for sufficiently large lambda only", ""};
  if (!(lambda > 0.0)) invalidate(r, "requires lambda > 0");
  return r;
}

double tail_threshold() { return 2.0 * std::exp(constants().L0); }

BoundReport tail_upper(double y) {
  BoundReport r{"tail", 0.0, {{"y", y}}, true, "", ""};
  const double log_value = -y * (std::log(y) - 1.0 - std::numbers::ln2);
  r.value = std::exp(log_value);
  r.inputs["log_value"] = log_value;
  if (!(y >= tail_threshold())) invalidate(r, "requires y >= 2 e^L0 = " + fmt(tail_threshold()));
  return r;
}

BoundReport mgf_conv_error(int n, double lambda, double var_z0, double K_L, double L) {
  BoundReport r{"mgf_conv", 0.0,
                {{"n", static_cast<double>(n)}, {"lambda", lambda}, {"var_z0", var_z0}, {"K_L", K_L}, {"L", L}},
                true, "", ""};
  r.value = std::numbers::sqrt2 * bound_scale(var_z0) * std::abs(lambda) *
            std::exp(2.0 * K_L * lambda * lambda) * std::exp(kLn23 * 0.5 * n);
  if (!(std::abs(lambda) <= 0.5 * L)) invalidate(r, "requires |lambda| <= L/2");
  if (n < 0) invalidate(r, "requires n >= 0");
  return r;
}

double dp_upper_rate(double p, double eps) {
  if (!(p >= 1.0)) throw DomainError("dp_upper_rate: p must be >= 1");
  const double p0 = constants().p0;
  if (p < p0) return constants().rho;
  if (p == p0) return constants().rho + eps;
  return std::pow(2.0 / (p + 1.0), 1.0 / p);
}

double rp_residual(int p, double q) {
  return 2.0 * q * (q - p) / (p * (q - 2.0)) * std::numbers::ln2 - std::log((p + 1.0) / 2.0);
}

LowerRates lower_rates(int p) {
  if (p < 1) throw DomainError("lower_rates: p must be >= 1");
  LowerRates r;
  r.dp_rate = 2.0 / (p + 1.0);
  r.d2_rate_sup = std::pow(2.0 / (p + 1.0), 0.5 * p);
  r.ks_rate_sup = 2.0 / (p + 1.0);
  if (p >= 3) {
    double hi = 2.0 * p;
    while (rp_residual(p, hi) < 0.0) hi *= 2.0;
    const double q = bisect([p](double x) { return rp_residual(p, x); }, static_cast<double>(p), hi, 0.0);
    r.q = q;
    r.rp = std::exp2(-q);
  }
  return r;
}

std::vector<BoundReport> iterate_certificate(int n, double var_z0) {
  const double A = bound_scale(var_z0);
  const DensitySupError d = density_sup_error(n, A, 3.5);
  return {d.fn1, d.fn2, d.fn3, d.best, tv_error(n, A)};
}

}  // namespace qsl
