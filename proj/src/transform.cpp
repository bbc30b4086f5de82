#include "qslimit/transform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "qslimit/constants.hpp"
#include "qslimit/errors.hpp"
#include "qslimit/interpolate.hpp"
#include "qslimit/parallel.hpp"
#include "qslimit/quadrature.hpp"
#include "qslimit/roots.hpp"
#include "qslimit/toll.hpp"

namespace qsl {

namespace {

using Complex = std::complex<double>;

// g evaluated from u and w = 1 - u separately keeps full accuracy near u = 1.
double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

double toll_split(double u, double w) { return 2.0 * xlogx(u) + 2.0 * xlogx(w) + 1.0; }

// theta(u) = g(u) + eta + (u - 1/2) on [1/2, 1] grows like g where g is steep and
// like u near 1/2 where g is flat; equal theta steps bound the phase per panel
// of e^{i t g(u)} and of phi(u t) together.
constexpr double kThetaMax = 1.0 + kEta + 0.5;

double theta(double u) { return toll(u) + kEta + (u - 0.5); }

struct ThetaTable {
  static constexpr int kSize = 8192;
  std::vector<double> u;  // u at theta = k * kThetaMax / kSize
};

const ThetaTable& theta_table() {
  static const ThetaTable table = [] {
    ThetaTable t;
    t.u.resize(ThetaTable::kSize + 1);
    t.u[0] = 0.5;
    t.u[ThetaTable::kSize] = 1.0;
    for (int k = 1; k < ThetaTable::kSize; ++k) {
      const double target = kThetaMax * k / ThetaTable::kSize;
      t.u[k] = bisect([target](double u) { return theta(u) - target; }, 0.5, 1.0, 1e-15);
    }
    return t;
  }();
  return table;
}

// Breakpoints on [1/2, 1] with at most `phase` radians of t * theta per panel.
void theta_breaks(double t, double phase, std::vector<double>& out) {
  const ThetaTable& table = theta_table();
  const int m = std::clamp(static_cast<int>(std::ceil(t * kThetaMax / phase)), 1, ThetaTable::kSize);
  out.resize(m + 1);
  for (int j = 0; j <= m; ++j) {
    const double pos = static_cast<double>(j) * ThetaTable::kSize / m;
    const int k = std::min(static_cast<int>(pos), ThetaTable::kSize - 1);
    const double fr = pos - k;
    out[j] = table.u[k] + fr * (table.u[k + 1] - table.u[k]);
  }
  out.front() = 0.5;
  out.back() = 1.0;
}

}  // namespace

// ---------------------------------------------------------------- densities

RealGrid density_of_gU(const GridSpec& spec) {
  const double g_half = -kEta;
  const double anti_half = toll_antiderivative(0.5);
  // F(x) = P(g(U) <= x) = 2 u(x) - 1 and G(x) = int F, integrated by parts in u.
  auto F = [&](double x) {
    if (x <= g_half) return 0.0;
    if (x >= 1.0) return 1.0;
    return 2.0 * toll_inverse_upper(x) - 1.0;
  };
  auto G = [&](double x) {
    if (x <= g_half) return 0.0;
    if (x >= 1.0) return 1.0 + (x - 1.0);
    const double u = toll_inverse_upper(x);
    return (2.0 * u - 1.0) * x - 2.0 * (toll_antiderivative(u) - anti_half);
  };
  return hat_projection(spec, G, F);
}

RealGrid apply_S_density(const RealGrid& f, DensityStepReport* report) {
  if (f.kind() != GridKind::density) throw ContractViolation("apply_S_density: input is not a density grid");
  const Eigen::Index n = f.size();
  const double h = f.spacing();
  const double lo = f.lo();
  // Work with the input scaled to unit mass; otherwise a quadrature deficit
  // squares at every step (both copies lose it).
  const double mass_in = f.integral();
  if (!(mass_in > 0.0)) throw ContractViolation("apply_S_density: input has no mass");
  const Eigen::ArrayXd v = f.values() / mass_in;
  const double fmax = v.maxCoeff();

  Eigen::Index a = 0;
  Eigen::Index b = n - 1;
  while (a < n && v[a] <= kSupportThreshold * fmax) ++a;
  while (b > a && v[b] <= kSupportThreshold * fmax) --b;
  const Eigen::ArrayXd tw = f.trapezoid_weights();
  double dropped = 0.0;
  for (Eigen::Index j = 0; j < n; ++j)
    if (j < a || j > b) dropped += tw[j] * v[j];

  const Eigen::ArrayXd wf = tw * v;
  // Bound on the linear-interpolation error inside cell [k, k+1].
  Eigen::ArrayXd cell_err = Eigen::ArrayXd::Zero(n);
  {
    Eigen::ArrayXd d2 = Eigen::ArrayXd::Zero(n);
    for (Eigen::Index k = 1; k + 1 < n; ++k) d2[k] = std::abs(v[k - 1] - 2.0 * v[k] + v[k + 1]);
    for (Eigen::Index k = 0; k + 1 < n; ++k) cell_err[k] = 0.125 * std::max(d2[k], d2[k + 1]);
  }

  const quad::GradedHalfRule& rule = quad::graded_half_rule();
  const std::size_t nodes = rule.u.size();
  std::vector<double> node_c(nodes);
  for (std::size_t q = 0; q < nodes; ++q) node_c[q] = toll_split(rule.u[q], rule.one_minus_u[q]);

  const double s_lo = static_cast<double>(std::max<Eigen::Index>(a - 1, 0));
  const double s_hi = static_cast<double>(std::min<Eigen::Index>(b + 1, n - 1));

  // The interpolant is affine inside a cell, so over a run of j whose
  // argument s = alpha - beta j stays in cell k the inner sum is
  // f_k M + (f_{k+1} - f_k)(alpha M - beta S - k M) with M = sum wf_j and
  // S = sum j wf_j; prefix sums make each run O(1).
  std::vector<double> pm(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> ps(static_cast<std::size_t>(n) + 1, 0.0);
  for (Eigen::Index j = 0; j < n; ++j) {
    pm[j + 1] = pm[j] + wf[j];
    ps[j + 1] = ps[j] + static_cast<double>(j) * wf[j];
  }

  Eigen::ArrayXd out(n);
  Eigen::ArrayXd err(n);
  const double* fv = v.data();
  const double* cev = cell_err.data();
  const double* wfv = wf.data();
  constexpr double kRunThreshold = 0.05;
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    const double xi = f.x(static_cast<Eigen::Index>(i));
    double acc = 0.0;
    double acc_err = 0.0;
    for (std::size_t q = 0; q < nodes; ++q) {
      const double u = rule.u[q];
      const double beta = rule.one_minus_u[q] / u;
      const double alpha = (xi - node_c[q] - lo) / (u * h);
      const double jmin = std::max(static_cast<double>(a), std::ceil((alpha - s_hi) / beta));
      const double jmax = std::min(static_cast<double>(b), std::floor((alpha - s_lo) / beta));
      if (jmin > jmax) continue;
      double inner = 0.0;
      double inner_err = 0.0;
      auto j = static_cast<Eigen::Index>(jmin);
      const auto j1 = static_cast<Eigen::Index>(jmax);
      if (beta > kRunThreshold) {
        // Runs are short here; the plain loop is cheaper.
        for (; j <= j1; ++j) {
          const double sj = alpha - beta * static_cast<double>(j);
          const Eigen::Index k = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(sj), 0, n - 2);
          inner += wfv[j] * (fv[k] + (sj - static_cast<double>(k)) * (fv[k + 1] - fv[k]));
          inner_err += wfv[j] * cev[k];
        }
      }
      Eigen::Index prev_k = n;
      while (j <= j1) {
        const double s0 = alpha - beta * static_cast<double>(j);
        Eigen::Index k = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor(s0)), 0, n - 2);
        if (k >= prev_k) k = prev_k - 1;
        prev_k = k;
        const auto j_end = std::min<Eigen::Index>(
            j1, std::max<Eigen::Index>(j, static_cast<Eigen::Index>(std::floor((alpha - static_cast<double>(k)) / beta))));
        const double m = pm[j_end + 1] - pm[j];
        const double sj = ps[j_end + 1] - ps[j];
        const double frac_mass = alpha * m - beta * sj - static_cast<double>(k) * m;
        inner += fv[k] * m + (fv[k + 1] - fv[k]) * frac_mass;
        inner_err += cev[k] * m;
        j = j_end + 1;
      }
      const double scale = rule.weights[q] / u;
      acc += scale * inner;
      acc_err += scale * inner_err;
    }
    out[i] = 2.0 * acc;
    err[i] = 2.0 * acc_err;
  });

  double clipped = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (out[i] < 0.0) {
      clipped -= tw[i] * out[i];
      out[i] = 0.0;
    }
  }
  const double mass = (tw * out).sum();
  const double deficit = 1.0 - mass;
  if (deficit > 10.0 * (f.tol_mass() + kDensityQuadratureTol))
    throw TruncationError("apply_S_density: output mass " + std::to_string(mass) +
                          " lost more than the tolerated amount; widen the x-domain (currently [" +
                          std::to_string(f.lo()) + ", " + std::to_string(f.hi()) + "])");
  const double interp = err.maxCoeff();
  const double rescale = 2.0 * std::abs(1.0 - mass_in);
  const double tol = std::abs(deficit) + clipped + dropped + rescale;
  const double slack = f.slack() + interp + (std::abs(deficit) + rescale) * out.maxCoeff();
  if (report) *report = {mass, clipped, dropped, interp};
  return RealGrid(f.lo(), f.hi(), std::move(out), GridKind::density, tol, slack);
}

// ---------------------------------------------------------------- characteristic functions

ComplexGrid cf_of(const StartLaw& law, const GridSpec& spec) {
  if (spec.lo != 0.0) throw ContractViolation("cf_of: the t-grid must start at 0");
  ComplexGrid::Values vals(spec.points);
  for (Eigen::Index i = 0; i < spec.points; ++i) vals[i] = law.cf(spec.x(i));
  vals[0] = Complex(1.0);
  return ComplexGrid(spec.lo, spec.hi, std::move(vals), GridKind::cf, 0.0, 0.0);
}

ComplexGrid apply_S_cf(const ComplexGrid& phi, double t_max) {
  if (phi.kind() != GridKind::cf) throw ContractViolation("apply_S_cf: input is not a cf grid");
  const double h = phi.spacing();
  if (!(t_max > 0.0) || t_max > phi.hi() * (1.0 + 1e-12))
    throw DomainError("apply_S_cf: t_max outside the input domain [0, " + std::to_string(phi.hi()) + "]");
  const Eigen::Index count = std::min<Eigen::Index>(
      phi.size(), static_cast<Eigen::Index>(std::floor(t_max / h + 1e-9)) + 1);
  if (count < 2) throw DomainError("apply_S_cf: t_max below one grid step");
  const double out_hi = count == phi.size() ? phi.hi() : static_cast<double>(count - 1) * h;

  const auto& vals = phi.values();
  const double eps_in = phi.tol_mass();
  const double interp_err = cubic_error_estimate(vals);
  const double quad_tol = std::max(kCfQuadratureTol, interp_err);
  Eigen::ArrayXd tail_max(vals.size());
  {
    double m = 0.0;
    for (Eigen::Index i = vals.size() - 1; i >= 0; --i) {
      m = std::max(m, std::abs(vals[i]));
      tail_max[i] = m;
    }
  }

  ComplexGrid::Values out(count);
  Eigen::ArrayXd err(count);
  out[0] = Complex(1.0);
  err[0] = 0.0;
  parallel_for(static_cast<std::size_t>(count - 1), [&](std::size_t idx) {
    const Eigen::Index i = static_cast<Eigen::Index>(idx) + 1;
    const double t = phi.x(i);
    // The stored error eps_in is already propagated through the 2 eps_in term.
    const double bound = tail_max[static_cast<Eigen::Index>(std::floor(0.5 * t / h))];
    if (bound < kCfSkipBound) {
      out[i] = Complex(0.0);
      err[i] = bound;
      return;
    }
    auto integrand = [&](double u) {
      const double w = 1.0 - u;
      const Complex a = cubic_at(vals, 0.0, h, u * t);
      const Complex b = cubic_at(vals, 0.0, h, w * t);
      const double ph = t * toll_split(u, w);
      return a * b * Complex(std::cos(ph), std::sin(ph));
    };
    thread_local std::vector<double> breaks;
    theta_breaks(t, 20.0, breaks);
    const auto est = quad::integrate_adaptive<quad::ClenshawCurtisRule>(
        integrand, std::span<const double>(breaks), 0.5 * quad_tol, 0.0, 1u << 16);
    out[i] = 2.0 * est.value;
    err[i] = 2.0 * est.error;
  });
  const double eps_out = 2.0 * eps_in + err.maxCoeff() + 2.0 * interp_err;
  return ComplexGrid(0.0, out_hi, std::move(out), GridKind::cf, eps_out, phi.slack() + eps_out - eps_in);
}

RealGrid invert_cf(const ComplexGrid& phi, const GridSpec& xgrid, double p, double cp,
                   InversionReport* report) {
  if (phi.kind() != GridKind::cf) throw ContractViolation("invert_cf: input is not a cf grid");
  if (!(p > 1.0)) throw PreconditionError("invert_cf: requires p > 1");
  if (!(cp > 0.0)) throw PreconditionError("invert_cf: requires cp > 0");
  const auto& vals = phi.values();
  const double eps = phi.tol_mass();
  for (Eigen::Index k = 1; k < vals.size(); ++k) {
    const double t = phi.x(k);
    if (std::abs(vals[k]) > cp * std::pow(t, -p) + eps)
      throw PreconditionError("invert_cf: |phi(t)| <= cp t^-p fails at t = " + std::to_string(t) +
                              " (|phi| = " + std::to_string(std::abs(vals[k])) + ")");
  }
  const double T = phi.hi();
  const double h = phi.spacing();
  const Eigen::Index nt = vals.size();

  Eigen::ArrayXd out(xgrid.points);
  parallel_for(static_cast<std::size_t>(xgrid.points), [&](std::size_t i) {
    const double x = xgrid.x(static_cast<Eigen::Index>(i));
    const Complex step = std::polar(1.0, -h * x);
    Complex rot(1.0);
    double sum = 0.5 * vals[0].real();
    for (Eigen::Index k = 1; k < nt; ++k) {
      if ((k & 255) == 0) {
        rot = std::polar(1.0, -static_cast<double>(k) * h * x);
      } else {
        rot *= step;
      }
      const double term = rot.real() * vals[k].real() - rot.imag() * vals[k].imag();
      sum += (k + 1 == nt) ? 0.5 * term : term;
    }
    out[i] = sum * h / std::numbers::pi;
  });

  Eigen::ArrayXd tw = Eigen::ArrayXd::Constant(xgrid.points, xgrid.spacing());
  tw[0] *= 0.5;
  tw[xgrid.points - 1] *= 0.5;
  double clipped = 0.0;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (out[i] < 0.0) {
      clipped -= tw[i] * out[i];
      out[i] = 0.0;
    }
  }
  const double remainder = cp * std::pow(T, 1.0 - p) / (std::numbers::pi * (p - 1.0));
  const double cf_part = eps * T / std::numbers::pi;
  const double mass = (tw * out).sum();
  if (report) *report = {remainder, cf_part, clipped};
  return RealGrid(xgrid.lo, xgrid.hi, std::move(out), GridKind::density, std::abs(1.0 - mass) + clipped,
                  remainder + cf_part);
}

// ---------------------------------------------------------------- moment generating functions

RealGrid mgf_of(const StartLaw& law, const GridSpec& spec) {
  Eigen::ArrayXd vals(spec.points);
  for (Eigen::Index i = 0; i < spec.points; ++i) vals[i] = law.mgf(spec.x(i));
  return RealGrid(spec.lo, spec.hi, std::move(vals), GridKind::generic, 0.0, 0.0);
}

RealGrid apply_S_mgf(const RealGrid& psi, double L) {
  if (!(L > 0.0)) throw DomainError("apply_S_mgf: L must be positive");
  const double h = psi.spacing();
  const double slop = 1e-12 * L;
  if (psi.lo() > -L + slop || psi.hi() < L - slop) throw DomainError("apply_S_mgf: the lambda-grid must cover [-L, L]");
  const auto& vals = psi.values();
  if (!vals.isFinite().all() || !(vals > 0.0).all())
    throw DomainError("apply_S_mgf: psi must be positive and finite on the grid");
  Eigen::Index first = 0;
  while (psi.x(first) < -L - slop) ++first;
  Eigen::Index end = psi.size();
  while (psi.x(end - 1) > L + slop) --end;
  const Eigen::Index count = end - first;
  if (count < 2) throw DomainError("apply_S_mgf: fewer than two grid points in [-L, L]");

  // psi spans many orders of magnitude; interpolating log psi keeps it positive
  // and turns the interpolation error into a relative one.
  const Eigen::ArrayXd logs = vals.log();
  const double interp_rel = std::expm1(2.0 * cubic_error_estimate(logs));
  Eigen::ArrayXd out(count);
  Eigen::ArrayXd err(count);
  const double lo = psi.lo();
  parallel_for(static_cast<std::size_t>(count), [&](std::size_t idx) {
    const double lambda = psi.x(first + static_cast<Eigen::Index>(idx));
    if (lambda == 0.0) {
      out[idx] = 1.0;
      err[idx] = 0.0;
      return;
    }
    auto integrand = [&](double u) {
      const double w = 1.0 - u;
      return std::exp(cubic_at(logs, lo, h, u * lambda) + cubic_at(logs, lo, h, w * lambda) +
                      lambda * toll_split(u, w));
    };
    const auto est = quad::gauss_kronrod(integrand, 0.5, 1.0, 0.0, kMgfRelTol, 2000);
    out[idx] = 2.0 * est.value;
    err[idx] = 2.0 * est.error;
  });
  const double rel_err = (err / out).maxCoeff() + interp_rel;
  return RealGrid(psi.x(first), psi.x(end - 1), std::move(out), GridKind::generic, 0.0,
                  psi.slack() + rel_err);
}

// ---------------------------------------------------------------- driver

std::string to_string(Representation r) {
  switch (r) {
    case Representation::density: return "density";
    case Representation::cf: return "cf";
    case Representation::mgf: return "mgf";
    case Representation::moments: return "moments";
  }
  return "density";
}

Representation representation_from_string(std::string_view name) {
  if (name == "density") return Representation::density;
  if (name == "cf") return Representation::cf;
  if (name == "mgf") return Representation::mgf;
  if (name == "moments") return Representation::moments;
  throw ContractViolation("unknown representation '" + std::string(name) +
                          "' (expected density, cf, mgf or moments)");
}

IterationState iterate(const StartLaw& start, int n, const std::set<Representation>& reprs,
                       const IterationOptions& options, const StepObserver& observer) {
  if (n < 0) throw DomainError("iterate: n must be nonnegative");
  const bool want_density = reprs.count(Representation::density) > 0;
  if (want_density && start.is_point_mass() && n == 0)
    throw UnsupportedRepresentation(
        "the point mass at 0 has no density; the density pipeline starts at n = 1");

  IterationState state{0, start, std::nullopt, std::nullopt, std::nullopt, std::nullopt};
  if (want_density && start.has_density()) state.density = start.density_on(options.density_grid);
  if (reprs.count(Representation::cf)) state.cf = cf_of(start, options.cf_grid);
  if (reprs.count(Representation::mgf)) state.mgf = mgf_of(start, options.mgf_grid);
  if (reprs.count(Representation::moments)) state.moments = moments_of(start, options.moment_order);
  if (observer) observer(state);

  const double L = std::min(-options.mgf_grid.lo, options.mgf_grid.hi);
  for (int k = 1; k <= n; ++k) {
    if (want_density) {
      if (state.density) {
        state.density = apply_S_density(*state.density);
      } else {
        state.density = density_of_gU(options.density_grid);
      }
    }
    if (state.cf) state.cf = apply_S_cf(*state.cf);
    if (state.mgf) state.mgf = apply_S_mgf(*state.mgf, L);
    if (state.moments) state.moments = apply_S_moments(*state.moments);
    state.n = k;
    if (observer) observer(state);
  }
  return state;
}

}  // namespace qsl
