#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "deltakit/error.hpp"
#include "deltakit/fit.hpp"
#include "deltakit/integrals.hpp"
#include "deltakit/quadrature.hpp"
#include "oracles.hpp"

using namespace deltakit;

TEST_CASE("closed form at z = 1 and z = 2") {
  for (const double X : {0.5, 3.0, 100.0, 1e4}) {
    const double L = std::log1p(X);
    CHECK(I_t1_closed(1, X) == doctest::Approx(X * (1 + X) * (1 + L)).epsilon(1e-12));
    const double two = (1 + X) * (1 + X) * (X + 2 * X * L + X * X * X / (1 + X));
    CHECK(I_t1_closed(2, X) == doctest::Approx(two).epsilon(1e-12));
  }
}

TEST_CASE("closed form against Gauss-Kronrod") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> uz(0.1, 3.0);
  std::uniform_real_distribution<double> ulx(-1.0, 4.0);
  for (int i = 0; i < 60; ++i) {
    const double z = uz(gen);
    const double X = std::pow(10.0, ulx(gen));
    CHECK(I_t1_closed(z, X) == doctest::Approx(oracle::I_t1(z, X)).epsilon(1e-9));
  }
  // Integer z - 1 exponents take the logarithmic branch.
  CHECK(I_t1_closed(1.0, 50) == doctest::Approx(oracle::I_t1(1.0, 50)).epsilon(1e-11));
  CHECK(I_t1_closed(3.0, 50) == doctest::Approx(oracle::I_t1(3.0, 50)).epsilon(1e-11));
  CHECK(std::isfinite(I_t1_closed(0.3, 1e8)));
}

TEST_CASE("integrand structure") {
  const std::vector<double> one = {2.0};
  // w = 0 and w = +-e_1.
  CHECK(integrand(1, 1, 10, one) == doctest::Approx(11 * (1 + 10.0 / 3)));
  const std::vector<double> two = {1.0, 3.0};
  // Per normalized form: weight 2^{-|w|} counted for w and -w.
  double ref2 = 11.0;
  ref2 *= std::pow(1 + 10 / (1 + 1.0), 2 * 0.5);
  ref2 *= std::pow(1 + 10 / (1 + 3.0), 2 * 0.5);
  ref2 *= std::pow(1 + 10 / (1 + 4.0), 2 * 0.25);
  ref2 *= std::pow(1 + 10 / (1 + 2.0), 2 * 0.25);
  CHECK(integrand(2, 1, 10, two) == doctest::Approx(ref2));
  const std::vector<double> outside = {11.0};
  CHECK_THROWS_AS(integrand(1, 1, 10, outside), DomainError);
  CHECK_THROWS_AS(integrand(2, 1, 10, one), DomainError);
}

TEST_CASE("adaptive and closed routes agree") {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> uz(0.2, 2.5);
  std::uniform_real_distribution<double> ulx(0.0, 4.0);
  for (int i = 0; i < 30; ++i) {
    const double z = uz(gen);
    const double X = std::pow(10.0, ulx(gen));
    const auto a = I_tz(1, z, X, IntegralMethod::kAdaptive);
    const auto c = I_tz(1, z, X, IntegralMethod::kClosed);
    CHECK(a.value == doctest::Approx(c.value).epsilon(1e-8));
  }
}

TEST_CASE("two dimensional integral against nested Gauss-Kronrod") {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  for (const double X : {3.0, 20.0}) {
    const double z = 1.0;
    auto inner = [X, z](double a) {
      auto g = [X, z, a](double b) {
        const std::vector<double> th = {a, b};
        return integrand(2, z, X, th);
      };
      return GK::integrate(g, 0.0, a, 8, 1e-10) + GK::integrate(g, a, X, 8, 1e-10);
    };
    const double ref = GK::integrate(inner, 0.0, X, 8, 1e-9);
    const auto r = I_tz(2, z, X, IntegralMethod::kAdaptive);
    CHECK(r.value == doctest::Approx(ref).epsilon(2e-3));
    CHECK(r.error_estimate <= 1e-3);
  }
}

TEST_CASE("monte carlo agrees with deterministic routes") {
  IntegralOptions o;
  o.rel_tol_mc = 0.01;
  const auto mc1 = I_tz(1, 1.5, 100, IntegralMethod::kMonteCarlo, o);
  CHECK(mc1.value == doctest::Approx(I_t1_closed(1.5, 100)).epsilon(0.03));
  const auto mc2 = I_tz(2, 1.0, 50, IntegralMethod::kMonteCarlo, o);
  const auto ad2 = I_tz(2, 1.0, 50, IntegralMethod::kAdaptive);
  CHECK(mc2.value == doctest::Approx(ad2.value).epsilon(0.03));
  const auto mc3 = I_tz(3, 1.0, 10);
  CHECK(mc3.method == IntegralMethod::kMonteCarlo);
  CHECK(mc3.error_estimate <= 0.05);
  CHECK(mc3.value > 0);
}

TEST_CASE("cone restriction is a positive part of the t = 2 integral") {
  const auto cone = cone_integral_t2(1.0, 100);
  const auto full = I_tz(2, 1.0, 100);
  CHECK(cone.value > 0);
  CHECK(cone.value < full.value);
}

TEST_CASE("growth fit recovers synthetic exponents") {
  const std::vector<double> X = {1e2, 1e3, 1e4, 1e5};
  std::vector<double> v;
  for (const double x : X) v.push_back(std::exp(0.3) * std::pow(x, 2.0) * std::log(x));
  const GrowthFit f = growth_fit(1, 1.0, X, v);
  CHECK(f.a == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(f.b == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(f.c == doctest::Approx(0.3).epsilon(1e-7));
  CHECK(f.a_target == 2.0);
  CHECK(f.delta == 1);
  const std::vector<double> two = {1e2, 1e3};
  CHECK_THROWS_AS(growth_fit(1, 1.0, two, std::vector<double>{1, 2}), DomainError);
}

TEST_CASE("least squares") {
  const std::vector<std::vector<double>> cols = {{1, 1, 1, 1}, {0, 1, 2, 3}};
  const std::vector<double> y = {1, 3, 5, 7};
  const LinearFit f = least_squares(cols, y);
  CHECK(f.coefficients[0] == doctest::Approx(1));
  CHECK(f.coefficients[1] == doctest::Approx(2));
  CHECK(f.rss == doctest::Approx(0).epsilon(1e-20));
  const std::vector<std::vector<double>> dup = {{1, 1, 1}, {2, 2, 2}};
  CHECK_THROWS_AS(least_squares(dup, std::vector<double>{1, 2, 3}), NumericalError);
}

TEST_CASE("gauss kronrod driver") {
  const auto r = integrate_gk15([](double x) { return std::exp(x); }, 0, 1);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(std::exp(1.0) - 1).epsilon(1e-13));
  const std::vector<double> breaks = {0.5};
  const auto kink = integrate_gk15([](double x) { return std::fabs(x - 0.5); }, 0, 1, {}, breaks);
  CHECK(kink.value == doctest::Approx(0.25).epsilon(1e-13));
  QuadratureOptions tight;
  tight.max_intervals = 2;
  const auto miss = integrate_gk15([](double x) { return 1 / std::sqrt(x + 1e-12); }, 0, 1, tight);
  CHECK_FALSE(miss.converged);
}

TEST_CASE("method names") {
  CHECK(parse_integral_method("closed") == IntegralMethod::kClosed);
  CHECK(parse_integral_method("mc") == IntegralMethod::kMonteCarlo);
  CHECK(to_string(IntegralMethod::kAdaptive) == "adaptive");
  CHECK_THROWS_AS(parse_integral_method("simpson"), DomainError);
  CHECK_THROWS_AS(I_tz(2, 1, 10, IntegralMethod::kClosed), DomainError);
  CHECK_THROWS_AS(I_tz(3, 1, 10, IntegralMethod::kAdaptive), DomainError);
}
