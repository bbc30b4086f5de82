#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qslimit/bounds.hpp"
#include "qslimit/constants.hpp"
#include "qslimit/errors.hpp"

using namespace qsl;

namespace {

bool rounds_to(double value, double printed, int digits) {
  const double scale = std::pow(10.0, digits - 1 - std::floor(std::log10(std::abs(printed))));
  return std::round(value * scale) == std::round(printed * scale);
}

}  // namespace

TEST_SUITE("bounds") {
  TEST_CASE("cp ladder stays under the published constants") {
    CHECK(cp(0.0) == 1.0);
    CHECK(cp(0.5) <= 2.0);
    CHECK(cp(1.0) <= 4.0 * std::numbers::pi + 1e-12);
    CHECK(cp(1.5) < 187.0);
    CHECK(cp(1.5) < 186.4);
    CHECK(cp(2.5) < 103215.0);
    CHECK(cp(3.5) < 197102280.0);
    // 8 pi^{1/2} Gamma(1/4)^2
    CHECK(cp(1.5) == doctest::Approx(8.0 * std::sqrt(std::numbers::pi) * std::pow(std::tgamma(0.25), 2)));
    CHECK(cp_ladder(3.5).route == "step");
    CHECK_THROWS_AS(cp(-1.0), DomainError);
    CHECK_THROWS_AS(cp_step(1.0, 2.0), DomainError);
  }

  TEST_CASE("cp step formula") {
    const double p = 1.5;
    CHECK(cp_step(p, 10.0) == doctest::Approx(std::pow(2.0, p + 1) * std::pow(10.0, 1 + 1 / p) * p / (p - 1)));
    CHECK(cp(2.5) == doctest::Approx(cp_step(1.5, cp(1.5))));
  }

  TEST_CASE("density sup-error reproduction values") {
    const double A = constants().sigma();
    CHECK(A == doctest::Approx(0.648).epsilon(1e-3));
    CHECK(rounds_to(density_sup_error(100, A).fn2.value, 0.0192, 3));
    CHECK(rounds_to(density_sup_error(177, A).fn3.value, 3.21e-6, 3));
    CHECK(rounds_to(density_sup_error(180, A).fn3.value, 2.07e-6, 3));
    CHECK(rounds_to(density_sup_error(200, A).fn3.value, 1.07e-7, 3));
    // fn3 overtakes fn2 from n = 177 on
    CHECK(density_sup_error(176, A).fn2.value < density_sup_error(176, A).fn3.value);
    CHECK(density_sup_error(177, A).fn3.value < density_sup_error(177, A).fn2.value);
    CHECK(density_sup_error(177, A).best.route == "fn3");
  }

  TEST_CASE("fn3 constant and base") {
    CHECK(fn3_sqrt_constant_exact() < 3.69812);
    CHECK(fn3_sqrt_constant_exact() < kFn3SqrtConstant);
    const auto d = density_sup_error(200, 1.0);
    CHECK(d.fn3.value >= d.fn3.inputs.at("exact_base_value"));
    CHECK(d.fn3.inputs.at("exact_constant_value") <= d.fn3.inputs.at("exact_base_value"));
  }

  TEST_CASE("validity rules") {
    const double A = 1.0;
    CHECK_FALSE(density_sup_error(4, A).fn1.valid);
    CHECK(density_sup_error(5, A).fn1.valid);
    CHECK_FALSE(density_sup_error(4, A).fn2.valid);
    CHECK(density_sup_error(5, A).fn2.valid);
    CHECK_FALSE(density_sup_error(2, A).fn3.valid);
    CHECK(density_sup_error(3, A).fn3.valid);
    CHECK_FALSE(density_sup_error(2, A).best.valid);
    CHECK_FALSE(density_sup_error(10, A, 1.0).fn1.valid);
    CHECK_THROWS_AS(density_sup_error(10, 0.0), DomainError);
    CHECK_FALSE(cf_log_bound(1.7).valid);
    CHECK(cf_log_bound(1.72).valid);
    CHECK_FALSE(tv_error(0, A).valid);
    CHECK_FALSE(mgf_conv_error(3, 0.6, 0.0, 1.0, 1.0).valid);
    CHECK(mgf_conv_error(3, 0.5, 0.0, 1.0, 1.0).valid);
  }

  TEST_CASE("best bound is the smallest valid member") {
    for (int n : {5, 20, 60, 120, 177, 250, 400}) {
      const auto d = density_sup_error(n, 0.7);
      double m = INFINITY;
      for (const auto* r : {&d.fn1, &d.fn2, &d.fn3})
        if (r->valid) m = std::min(m, r->value);
      CHECK(d.best.value == m);
    }
  }

  TEST_CASE("total variation constant") {
    CHECK(tv_constant() < 135.0);
    CHECK(tv_constant() == doctest::Approx(384.0 * std::numbers::e * std::log(1.5) / std::numbers::pi));
    const auto r = tv_error(100, 1.0);
    CHECK(r.value == doctest::Approx(135.0 * 100.0 * std::pow(2.0 / 3.0, 50.0 - 37.0)));
  }

  TEST_CASE("tail bound and its threshold") {
    const double L0 = constants().L0;
    CHECK(tail_threshold() == doctest::Approx(12.0 * L0 * L0).epsilon(1e-12));
    CHECK(tail_threshold() == doctest::Approx(302.1).epsilon(1e-3));
    CHECK_FALSE(tail_upper(302.1).valid);
    const auto r = tail_upper(400.0);
    CHECK(r.valid);
    CHECK(r.inputs.at("log_value") == doctest::Approx(-400.0 * (std::log(400.0) - 1.0 - std::numbers::ln2)));
    // Chernoff estimate exp(2 e^lambda - y lambda) at lambda = ln(y/2)
    const double lam = std::log(200.0);
    CHECK(r.inputs.at("log_value") == doctest::Approx(2.0 * std::exp(lam) - 400.0 * lam).epsilon(1e-12));
  }

  TEST_CASE("mgf bounds") {
    CHECK_THROWS_AS(mgf_lower(3.0, 2.0 / std::numbers::e), PreconditionError);
    CHECK_FALSE(mgf_lower(-1.0, 0.5).valid);
    CHECK(mgf_lower(5.0, 0.5).value == doctest::Approx(std::exp(0.5 * std::exp(5.0) / 5.0)));
    CHECK(mgf_KL(0.4, false) == 1.0);
    CHECK(mgf_KL(1.0, false) == 12.0);
    CHECK(mgf_KL(0.6, true) == 0.5);
    CHECK(mgf_KL(1.0, true) == 1.25);
    const double L0 = constants().L0;
    CHECK(ymgf_upper(L0 + 0.5) == doctest::Approx(std::exp(2.0 * std::exp(L0 + 0.5))));
    // the two pieces agree at L0
    CHECK(12.0 * L0 * L0 == doctest::Approx(2.0 * std::exp(L0)).epsilon(1e-10));
    CHECK(ymgf_upper(-1.0) == doctest::Approx(std::exp(1.25)));
  }

  TEST_CASE("mgf convergence bound") {
    const auto r = mgf_conv_error(10, 0.3, 0.0, 1.0, 1.0);
    const double expected = std::sqrt(2.0) * constants().sigma() * 0.3 * std::exp(2.0 * 0.09) * std::pow(2.0 / 3.0, 5.0);
    CHECK(r.value == doctest::Approx(expected).epsilon(1e-12));
  }

  TEST_CASE("upper and lower rates") {
    const auto& c = constants();
    CHECK(dp_upper_rate(2.0, 0.0) == doctest::Approx(std::sqrt(2.0 / 3.0)));
    CHECK(dp_upper_rate(10.0, 0.0) == doctest::Approx(std::pow(2.0 / 11.0, 0.1)));
    // continuity at p0
    CHECK(std::pow(2.0 / (c.p0 + 1.0), 1.0 / c.p0) == doctest::Approx(c.rho).epsilon(1e-9));
    const auto r2 = lower_rates(2);
    CHECK(r2.dp_rate == doctest::Approx(2.0 / 3.0));
    CHECK_FALSE(r2.rp);
    const auto r4 = lower_rates(4);
    REQUIRE(r4.q);
    CHECK(std::abs(rp_residual(4, *r4.q)) < 1e-10);
    CHECK(*r4.rp == doctest::Approx(std::exp2(-*r4.q)));
    CHECK(*r4.q > 4.0);
  }

  TEST_CASE("bounds are deterministic") {
    CHECK(density_sup_error(77, 0.9).fn1 == density_sup_error(77, 0.9).fn1);
    CHECK(iterate_certificate(40, 0.0) == iterate_certificate(40, 0.0));
    const auto cert = iterate_certificate(40, 0.0);
    REQUIRE(cert.size() == 5);
    CHECK(cert[3].name == "density_sup_error");
    CHECK(cert[4].name == "fn1a");
  }
}
