#include "qslimit/start_law.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

#include "qslimit/errors.hpp"

namespace qsl {

namespace {

double parse_number(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ContractViolation("start law: cannot parse " + std::string(what) + " from '" +
                            std::string(s) + "'");
  return v;
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
double std_normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

StartLaw StartLaw::point_mass_zero() { return StartLaw(PointMassZero{}); }

StartLaw StartLaw::normal(double variance) {
  if (!(variance > 0.0) || !std::isfinite(variance))
    throw DomainError("normal start law: variance must be positive and finite");
  return StartLaw(NormalLaw{variance});
}

StartLaw StartLaw::uniform(double lo, double hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw DomainError("uniform start law: need finite lo < hi");
  return StartLaw(UniformLaw{lo, hi});
}

StartLaw StartLaw::grid(RealGrid density) {
  if (density.kind() != GridKind::density)
    throw ContractViolation("grid start law: expected a density grid");
  return StartLaw(GridLaw{std::move(density)});
}

StartLaw StartLaw::parse(std::string_view text) {
  if (text == "delta0" || text == "0") return point_mass_zero();
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const std::string_view rest = colon == std::string_view::npos ? "" : text.substr(colon + 1);
  if (head == "normal") {
    if (rest.empty()) throw ContractViolation("start law: normal needs a variance, e.g. normal:2");
    return normal(parse_number(rest, "variance"));
  }
  if (head == "uniform") {
    const auto c2 = rest.find(':');
    if (c2 == std::string_view::npos)
      throw ContractViolation("start law: uniform needs bounds, e.g. uniform:-1:1");
    return uniform(parse_number(rest.substr(0, c2), "lower bound"),
                   parse_number(rest.substr(c2 + 1), "upper bound"));
  }
  throw ContractViolation("start law: unknown descriptor '" + std::string(text) +
                          "' (expected delta0, normal:<var>, uniform:<lo>:<hi>)");
}

std::string StartLaw::describe() const {
  return std::visit(overloaded{
                        [](const PointMassZero&) -> std::string { return "delta0"; },
                        [](const NormalLaw& n) { return "normal:" + format_number(n.variance); },
                        [](const UniformLaw& u) {
                          return "uniform:" + format_number(u.lo) + ":" + format_number(u.hi);
                        },
                        [](const GridLaw&) -> std::string { return "grid"; },
                    },
                    law_);
}

double StartLaw::mean() const {
  return std::visit(overloaded{
                        [](const PointMassZero&) { return 0.0; },
                        [](const NormalLaw&) { return 0.0; },
                        [](const UniformLaw& u) { return 0.5 * (u.lo + u.hi); },
                        [](const GridLaw& g) { return grid_mean(g.density); },
                    },
                    law_);
}

double StartLaw::variance() const {
  return std::visit(overloaded{
                        [](const PointMassZero&) { return 0.0; },
                        [](const NormalLaw& n) { return n.variance; },
                        [](const UniformLaw& u) { return (u.hi - u.lo) * (u.hi - u.lo) / 12.0; },
                        [](const GridLaw& g) { return grid_variance(g.density); },
                    },
                    law_);
}

std::vector<double> StartLaw::moments(int max_order) const {
  if (max_order < 0) throw DomainError("moments: order must be nonnegative");
  std::vector<double> m(max_order + 1, 0.0);
  m[0] = 1.0;
  std::visit(overloaded{
                 [](const PointMassZero&) {},
                 [&](const NormalLaw& n) {
                   for (int j = 2; j <= max_order; j += 2) m[j] = m[j - 2] * (j - 1) * n.variance;
                 },
                 [&](const UniformLaw& u) {
                   // (b^{j+1} - a^{j+1}) / ((j+1)(b-a)) = mean of a^i b^{j-i}.
                   for (int j = 1; j <= max_order; ++j) {
                     double s = 0.0;
                     for (int i = 0; i <= j; ++i) s += std::pow(u.lo, i) * std::pow(u.hi, j - i);
                     m[j] = s / (j + 1);
                   }
                 },
                 [&](const GridLaw& g) {
                   const double mass = g.density.integral();
                   for (int j = 1; j <= max_order; ++j) m[j] = grid_moment(g.density, j) / mass;
                 },
             },
             law_);
  return m;
}

std::complex<double> StartLaw::cf(double t) const {
  using C = std::complex<double>;
  return std::visit(overloaded{
                        [](const PointMassZero&) { return C(1.0); },
                        [t](const NormalLaw& n) { return C(std::exp(-0.5 * n.variance * t * t)); },
                        [t](const UniformLaw& u) {
                          const double half = 0.5 * (u.hi - u.lo);
                          const double mid = 0.5 * (u.hi + u.lo);
                          const double a = t * half;
                          const double sinc = std::abs(a) < 1e-8 ? 1.0 - a * a / 6.0 : std::sin(a) / a;
                          return std::polar(sinc, t * mid);
                        },
                        [t](const GridLaw& g) {
                          const Eigen::ArrayXd xs = g.density.abscissae();
                          const Eigen::ArrayXd w = g.density.trapezoid_weights() * g.density.values();
                          return C((w * (t * xs).cos()).sum(), (w * (t * xs).sin()).sum());
                        },
                    },
                    law_);
}

double StartLaw::mgf(double lambda) const {
  return std::visit(overloaded{
                        [](const PointMassZero&) { return 1.0; },
                        [lambda](const NormalLaw& n) { return std::exp(0.5 * n.variance * lambda * lambda); },
                        [lambda](const UniformLaw& u) {
                          const double a = lambda * (u.hi - u.lo);
                          const double ratio = std::abs(a) < 1e-10 ? 1.0 + 0.5 * a : std::expm1(a) / a;
                          return std::exp(lambda * u.lo) * ratio;
                        },
                        [lambda](const GridLaw& g) {
                          const Eigen::ArrayXd xs = g.density.abscissae();
                          return (g.density.trapezoid_weights() * g.density.values() * (lambda * xs).exp()).sum();
                        },
                    },
                    law_);
}

double StartLaw::cdf(double x) const {
  return std::visit(overloaded{
                        [x](const PointMassZero&) { return x >= 0.0 ? 1.0 : 0.0; },
                        [x](const NormalLaw& n) { return std_normal_cdf(x / std::sqrt(n.variance)); },
                        [x](const UniformLaw& u) {
                          return std::clamp((x - u.lo) / (u.hi - u.lo), 0.0, 1.0);
                        },
                        [x](const GridLaw& g) {
                          const RealGrid& f = g.density;
                          if (x <= f.lo()) return 0.0;
                          const double h = f.spacing();
                          double acc = 0.0;
                          for (Eigen::Index i = 1; i < f.size(); ++i) {
                            if (f.x(i) <= x) {
                              acc += 0.5 * h * (f[i - 1] + f[i]);
                            } else {
                              const double d = x - f.x(i - 1);
                              const double fx = f.linear_at(x);
                              acc += 0.5 * d * (f[i - 1] + fx);
                              break;
                            }
                          }
                          return std::clamp(acc, 0.0, 1.0);
                        },
                    },
                    law_);
}

RealGrid StartLaw::density_on(const GridSpec& spec) const {
  if (spec.points < 3 || !(spec.lo < spec.hi)) throw ContractViolation("density_on: bad grid spec");
  return std::visit(
      overloaded{
          [](const PointMassZero&) -> RealGrid {
            throw UnsupportedRepresentation(
                "the point mass at 0 has no density; start the density pipeline at n = 1");
          },
          [&](const NormalLaw& n) {
            const double s = std::sqrt(n.variance);
            return hat_projection(
                spec,
                [s](double x) { return x * std_normal_cdf(x / s) + s * std_normal_pdf(x / s); },
                [s](double x) { return std_normal_cdf(x / s); });
          },
          [&](const UniformLaw& u) {
            const double w = u.hi - u.lo;
            return hat_projection(
                spec,
                [&](double x) {
                  if (x <= u.lo) return 0.0;
                  if (x >= u.hi) return 0.5 * w + (x - u.hi);
                  return (x - u.lo) * (x - u.lo) / (2.0 * w);
                },
                [&](double x) { return std::clamp((x - u.lo) / w, 0.0, 1.0); });
          },
          [&](const GridLaw& g) {
            const RealGrid& f = g.density;
            if (f.lo() == spec.lo && f.hi() == spec.hi && f.size() == spec.points) return f;
            Eigen::ArrayXd v(spec.points);
            for (Eigen::Index i = 0; i < spec.points; ++i) v[i] = f.linear_at(spec.x(i));
            Eigen::ArrayXd w = Eigen::ArrayXd::Constant(spec.points, spec.spacing());
            w[0] *= 0.5;
            w[spec.points - 1] *= 0.5;
            const double tol = f.tol_mass() + std::abs(1.0 - (w * v).sum());
            return RealGrid(spec.lo, spec.hi, std::move(v), GridKind::density, tol, f.slack());
          },
      },
      law_);
}

}  // namespace qsl
