#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "oracles.hpp"
#include "qslimit/constants.hpp"
#include "qslimit/errors.hpp"
#include "qslimit/transform.hpp"

using namespace qsl;

namespace {

using Complex = std::complex<double>;

// E[phi(Ut) phi((1-U)t) e^{i t g(U)}] for a centered normal start law.
Complex normal_cf_step_oracle(double v, double t) {
  auto phi = [v](double s) { return std::exp(-0.5 * v * s * s); };
  auto re = [&](double u) { return phi(u * t) * phi((1.0 - u) * t) * std::cos(t * oracle::g(u)); };
  auto im = [&](double u) { return phi(u * t) * phi((1.0 - u) * t) * std::sin(t * oracle::g(u)); };
  return {oracle::tanh_sinh(re, 0.0, 0.5, 1e-13) + oracle::tanh_sinh(re, 0.5, 1.0, 1e-13),
          oracle::tanh_sinh(im, 0.0, 0.5, 1e-13) + oracle::tanh_sinh(im, 0.5, 1.0, 1e-13)};
}

double normal_mgf_step_oracle(double v, double lambda) {
  auto psi = [v](double s) { return std::exp(0.5 * v * s * s); };
  auto f = [&](double u) { return psi(u * lambda) * psi((1.0 - u) * lambda) * std::exp(lambda * oracle::g(u)); };
  return oracle::tanh_sinh(f, 0.0, 0.5, 1e-14) + oracle::tanh_sinh(f, 0.5, 1.0, 1e-14);
}

}  // namespace

TEST_SUITE("transform") {
  TEST_CASE("density of g(U)") {
    const GridSpec spec{-1.0, 2.0, 1025};
    const RealGrid f = density_of_gU(spec);
    CHECK(f.kind() == GridKind::density);
    CHECK(std::abs(f.integral() - 1.0) <= f.tol_mass() + 1e-12);
    CHECK(std::abs(grid_mean(f)) < 1e-6);
    // The hat projection adds h^2/6 to the variance of a spread-out law.
    const double h = spec.spacing();
    CHECK(std::abs(grid_variance(f) - kSigma2 / 3.0 - h * h / 6.0) < 1e-6);
    // support is [1 - 2 ln 2, 1]
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      const double x = f.x(i);
      if (x < 1.0 - 2.0 * std::numbers::ln2 - h || x > 1.0 + h) CHECK(f[i] == 0.0);
    }
  }

  TEST_CASE("density step maps variance v to sigma^2 + (2/3)(v - sigma^2)") {
    const GridSpec spec{-7.0, 9.0, 1024};
    const double v = 0.5;
    const RealGrid f0 = StartLaw::normal(v).density_on(spec);
    DensityStepReport report;
    const RealGrid f1 = apply_S_density(f0, &report);
    CHECK(std::abs(f1.integral() - 1.0) <= f1.tol_mass() + 1e-12);
    CHECK(report.mass == doctest::Approx(f1.integral()).epsilon(1e-14));
    CHECK(std::abs(grid_mean(f1)) < 1e-4);
    CHECK(grid_variance(f1) == doctest::Approx(oracle::iterate_variance(1, v)).epsilon(1e-3));
    CHECK(f1.slack() >= f0.slack());
  }

  TEST_CASE("density step on a narrow domain is a truncation error") {
    const RealGrid f0 = StartLaw::normal(0.01).density_on({-0.5, 0.5, 257});
    CHECK(f0.tol_mass() < 1e-6);
    CHECK_THROWS_AS(apply_S_density(f0), TruncationError);
  }

  TEST_CASE("density step rejects non-density input") {
    const RealGrid g(0.0, 1.0, Eigen::ArrayXd::Ones(5), GridKind::generic);
    CHECK_THROWS_AS(apply_S_density(g), ContractViolation);
  }

  TEST_CASE("cf of closed-form laws") {
    const ComplexGrid phi = cf_of(StartLaw::normal(2.0), {0.0, 10.0, 101});
    for (Eigen::Index i = 0; i < phi.size(); ++i) {
      const double t = phi.x(i);
      CHECK(std::abs(phi[i] - Complex(std::exp(-t * t))) < 1e-15);
    }
    const ComplexGrid delta = cf_of(StartLaw::point_mass_zero(), {0.0, 10.0, 11});
    CHECK((delta.values() == Complex(1.0)).all());
    CHECK_THROWS_AS(cf_of(StartLaw::normal(1.0), {1.0, 10.0, 11}), ContractViolation);
  }

  TEST_CASE("cf step against direct quadrature") {
    const double v = 1.0;
    const ComplexGrid phi0 = cf_of(StartLaw::normal(v), {0.0, 50.0, 2049});
    const ComplexGrid phi1 = apply_S_cf(phi0);
    CHECK(phi1.hi() == 50.0);
    CHECK(phi1[0] == Complex(1.0));
    for (double t : {0.5, 1.0, 3.0, 7.5, 12.5, 25.0, 50.0}) {
      const Eigen::Index i = static_cast<Eigen::Index>(std::lround(t / phi0.spacing()));
      CAPTURE(t);
      CHECK(std::abs(phi1[i] - normal_cf_step_oracle(v, phi1.x(i))) <= phi1.tol_mass() + 1e-12);
    }
    CHECK(phi1.tol_mass() < 1e-6);
  }

  TEST_CASE("cf step domain checks") {
    const ComplexGrid phi0 = cf_of(StartLaw::normal(1.0), {0.0, 10.0, 101});
    CHECK_THROWS_AS(apply_S_cf(phi0, 11.0), DomainError);
    CHECK_THROWS_AS(apply_S_cf(phi0, 0.05), DomainError);
    const ComplexGrid half = apply_S_cf(phi0, 5.0);
    CHECK(half.size() == 51);
    CHECK(half.hi() == doctest::Approx(5.0));
  }

  TEST_CASE("inverting a normal cf") {
    const double v = 1.0;
    const ComplexGrid phi = cf_of(StartLaw::normal(v), {0.0, 40.0, 4097});
    const GridSpec xs{-6.0, 6.0, 241};
    InversionReport report;
    const double cp2 = 2.0 / (std::numbers::e * v);
    const RealGrid f = invert_cf(phi, xs, 2.0, cp2, &report);
    CHECK(report.truncation_remainder == doctest::Approx(cp2 / (40.0 * std::numbers::pi)));
    double worst = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      const double x = f.x(i);
      worst = std::max(worst, std::abs(f[i] - std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi)));
    }
    CHECK(worst <= f.slack());
    CHECK(worst < 1e-12);
  }

  TEST_CASE("inversion preconditions") {
    const ComplexGrid phi = cf_of(StartLaw::normal(1.0), {0.0, 20.0, 201});
    const GridSpec xs{-1.0, 1.0, 11};
    CHECK_THROWS_AS(invert_cf(phi, xs, 1.0, 1.0), PreconditionError);
    CHECK_THROWS_AS(invert_cf(phi, xs, 2.0, 0.0), PreconditionError);
    // the decay bound fails near t = sqrt(2) when cp is too small
    CHECK_THROWS_AS(invert_cf(phi, xs, 2.0, 0.5), PreconditionError);
  }

  TEST_CASE("mgf step against direct quadrature") {
    const double v = 0.5;
    const RealGrid psi0 = mgf_of(StartLaw::normal(v), {-1.0, 1.0, 81});
    const RealGrid psi1 = apply_S_mgf(psi0, 1.0);
    CHECK(psi1.size() == 81);
    for (Eigen::Index i = 0; i < psi1.size(); i += 5) {
      const double lambda = psi1.x(i);
      CAPTURE(lambda);
      const double exact = normal_mgf_step_oracle(v, lambda);
      CHECK(std::abs(psi1[i] / exact - 1.0) <= psi1.slack() + 1e-13);
    }
    CHECK(psi1.slack() < 1e-6);
    const RealGrid inner = apply_S_mgf(psi0, 0.5);
    CHECK(inner.lo() == doctest::Approx(-0.5));
    CHECK(inner.hi() == doctest::Approx(0.5));
    CHECK_THROWS_AS(apply_S_mgf(psi0, 2.0), DomainError);
    CHECK_THROWS_AS(apply_S_mgf(psi0, 0.0), DomainError);
  }

  TEST_CASE("iterate drives every representation and reports each step") {
    IterationOptions opts;
    opts.density_grid = {-3.0, 5.0, 257};
    opts.cf_grid = {0.0, 20.0, 401};
    opts.mgf_grid = {-1.0, 1.0, 41};
    opts.moment_order = 4;
    std::vector<int> seen;
    const IterationState s =
        iterate(StartLaw::point_mass_zero(), 2,
                {Representation::density, Representation::cf, Representation::mgf, Representation::moments}, opts,
                [&](const IterationState& st) {
                  seen.push_back(st.n);
                  if (st.n == 0) CHECK(!st.density);
                });
    CHECK(seen == std::vector<int>{0, 1, 2});
    REQUIRE(s.density);
    REQUIRE(s.cf);
    REQUIRE(s.mgf);
    REQUIRE(s.moments);
    CHECK(s.moments->iteration == 2);
    CHECK(s.moments->values[2] == doctest::Approx(oracle::iterate_variance(2, 0.0)).epsilon(1e-12));
    // E Z_2^2 = -psi''(0) from the cf; compare via a centered difference
    const double h = s.cf->spacing();
    const double second = -(2.0 * (*s.cf)[1].real() - 2.0) / (h * h);
    CHECK(second == doctest::Approx(s.moments->values[2]).epsilon(1e-3));
  }

  TEST_CASE("one density step from the point mass is the law of g(U)") {
    IterationOptions opts;
    opts.density_grid = {-1.0, 2.0, 513};
    const IterationState s = iterate(StartLaw::point_mass_zero(), 1, {Representation::density}, opts);
    const RealGrid direct = density_of_gU(opts.density_grid);
    CHECK((s.density->values() == direct.values()).all());
  }

  TEST_CASE("iterate rejects a density of the point mass at n = 0") {
    CHECK_THROWS_AS(iterate(StartLaw::point_mass_zero(), 0, {Representation::density}), UnsupportedRepresentation);
    CHECK_THROWS_AS(iterate(StartLaw::normal(1.0), -1, {Representation::moments}), DomainError);
  }

  TEST_CASE("representation names") {
    for (auto r : {Representation::density, Representation::cf, Representation::mgf, Representation::moments})
      CHECK(representation_from_string(to_string(r)) == r);
    CHECK_THROWS_AS(representation_from_string("fourier"), ContractViolation);
  }
}
