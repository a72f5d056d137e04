#include <doctest.h>

#include <cmath>
#include <numbers>

#include "deltakit/error.hpp"
#include "deltakit/factor.hpp"
#include "deltakit/weights.hpp"
#include "oracles.hpp"

using namespace deltakit;

TEST_CASE("exponent system") {
  const ExponentSet e1 = exponents(1, 1);
  CHECK(e1.beta == 1);
  CHECK(e1.z_t == 1);
  CHECK(e1.delta == 1);
  CHECK(e1.z_t_plus == doctest::Approx(1 / (2 - std::sqrt(2.0))));
  const ExponentSet e2 = exponents(2, 1);
  CHECK(e2.beta == 2);
  CHECK(e2.z_t == doctest::Approx(2.0 / 3.0));
  CHECK(e2.z_t_plus == doctest::Approx(1.0));
  CHECK(e2.delta == 0);
  CHECK(exponents(2, 2.0 / 3.0).delta == 1);
  CHECK(exponents(3, 3.0 / 7.0).delta == 1);
  CHECK(exponents(2.5, 1).frak_z_t == doctest::Approx(3 * std::sqrt(2.0) / 7));
  CHECK_THROWS_AS(exponents(0, 1), DomainError);
  CHECK_THROWS_AS(exponents(1, 0), DomainError);
}

TEST_CASE("frak b and f_T") {
  TruncationParams p;
  p.T = 16;
  CHECK(p.frak_b() == doctest::Approx(1 / (2 * std::numbers::ln2 - 1)));
  p.z = 0.5;
  CHECK_THROWS_AS(p.frak_b(), DomainError);
  p.z = 1;
  p.t = 2;
  p.reading = FrakBReading::kPower;
  CHECK(p.frak_b() == doctest::Approx(1 / (4 * std::numbers::ln2 - 1)));
  p.reading = FrakBReading::kProduct;
  for (const double y : {1.0, 10.0, 1e3, 1e6}) {
    const double l3y = std::log(3 * y);
    const double gap = std::log(l3y) - p.frak_b() * std::log(p.T);
    const double ref = p.frak_c * std::min(std::log(p.T * l3y), gap * gap / std::log(p.T));
    CHECK(f_T(y, p) == doctest::Approx(ref));
    CHECK(f_T(y, p) >= 0);
  }
  CHECK_THROWS_AS(f_T(0.5, p), DomainError);
}

TEST_CASE("E_T membership") {
  TruncationParams p;
  p.T = 1;
  CHECK(mem_E_T(std::vector<std::uint64_t>{}, EVariant::kPlain, p));
  // 2^1 > 1 * log 6.
  CHECK_FALSE(mem_E_T(std::vector<std::uint64_t>{2}, EVariant::kPlain, p));
  p.T = 2;
  CHECK(mem_E_T(std::vector<std::uint64_t>{2, 3}, EVariant::kPlain, p));
  // i = 3 at p = 5: 8 > 2 log 15.
  CHECK_FALSE(mem_E_T(std::vector<std::uint64_t>{2, 3, 5}, EVariant::kPlain, p));
  CHECK(mem_E_T(std::vector<std::uint64_t>{2, 3, 1000003}, EVariant::kPlain, p));
  const auto table = SpfTable::build(100);
  CHECK_FALSE(mem_E_T(factorize(12, table), EVariant::kPlain, p));
  p.T = 4;
  // The tz variant is never larger.
  for (std::uint64_t n = 1; n <= 100; ++n) {
    const auto f = factorize(n, table);
    if (mem_E_T(f, EVariant::kTz, p)) CHECK(mem_E_T(f, EVariant::kPlain, p));
  }
}

TEST_CASE("theta sequences") {
  const ThetaSequence a(10, 1, 10, ThetaVariant::kA);
  const ThetaSequence b(10, 0, 10, ThetaVariant::kB);
  CHECK(a.value(0) == 1);
  CHECK(a.value(1) == 1);
  for (int q = 2; q <= 40; ++q) {
    CHECK(a.log_value(q) == doctest::Approx(double(oracle::log_theta(q, 10, 1, 10, true))).epsilon(1e-12));
    CHECK(b.log_value(q) == doctest::Approx(double(oracle::log_theta(q, 10, 0, 10, false))).epsilon(1e-12));
  }
}

TEST_CASE("recursion report matches a direct evaluation") {
  for (const double T : {10.0, 100.0}) {
    for (const int delta : {0, 1}) {
      for (const auto variant : {ThetaVariant::kA, ThetaVariant::kB}) {
        const bool va = variant == ThetaVariant::kA;
        const auto report = check_recursion(200, T, delta, 10, variant);
        REQUIRE(report.rows.size() == 198);
        std::optional<int> first;
        for (const auto& row : report.rows) {
          const long double lhs = oracle::log_recursion_lhs(row.q, T, delta, 10, va);
          const long double rhs = oracle::log_theta(row.q, T, delta, 10, va) - std::log(10.0L) -
                                  std::log((long double)T) -
                                  0.5L * delta * std::log(std::log((long double)T));
          CHECK(row.log_lhs == doctest::Approx(double(lhs)).epsilon(1e-10));
          CHECK(row.log_rhs == doctest::Approx(double(rhs)).epsilon(1e-10));
          if (!(lhs <= rhs) && !first) first = row.q;
        }
        CHECK(report.first_fail_sum == first);
        if (!va) CHECK(report.all_pass());
      }
    }
  }
  // Variant A with delta = 0 has a finite first failure.
  CHECK(check_recursion(200, 10, 0, 10, ThetaVariant::kA).first_fail_sum.has_value());
}

TEST_CASE("H-set membership") {
  const auto table = SpfTable::build(1000);
  TruncationParams p;
  p.T = 10;
  const ThetaSequence seq(10, 0, 10, ThetaVariant::kB);
  const auto f = factorize(30, table);
  const auto logs = divisor_logs(f);
  CHECK(mem_H(f, logs, 4, seq, EVariant::kPlain, p) == mem_E_T(f, EVariant::kPlain, p));
  const ThetaSequence tiny(10, 0, 1e-12, ThetaVariant::kB);
  CHECK_FALSE(mem_H(f, logs, 2, tiny, EVariant::kPlain, p));
  // j = 1 only: no moment constraint applies.
  CHECK(mem_H(f, logs, 1, tiny, EVariant::kPlain, p) == mem_E_T(f, EVariant::kPlain, p));
  TruncationParams other = p;
  other.T = 11;
  CHECK_THROWS_AS(mem_H(f, logs, 2, seq, EVariant::kPlain, other), DomainError);
}

TEST_CASE("prime sum checks") {
  const WeightFamily w(1.0);
  const auto c = chebyshev_check(1e6, w);
  CHECK(c.rel_err < 0.01);
  const auto m = mertens_product(1e6, w);
  // prod (1 + 1/p) ~ (6/pi^2) e^gamma log x.
  CHECK(m.ratio == doctest::Approx(6 / (std::numbers::pi * std::numbers::pi) *
                                   std::exp(std::numbers::egamma)).epsilon(0.01));
  const WeightFamily half(0.5);
  CHECK(chebyshev_check(1e5, half).lhs == doctest::Approx(0.5 * chebyshev_check(1e5, w).lhs));
  const auto cs = cos_sum(1e6, 0.0, w);
  CHECK(cs.lhs == doctest::Approx(std::log(std::log(1e6)) + 0.2615).epsilon(0.01));
}

TEST_CASE("weight family") {
  const auto table = SpfTable::build(100);
  const WeightFamily w(2.0);
  CHECK(w.is_standard());
  CHECK(w.at(factorize(60, table)) == 8.0);
  const WeightFamily custom(1.0, [](std::uint64_t p) { return p == 2 ? 0.5 : 1.0; });
  CHECK_FALSE(custom.is_standard());
  CHECK(custom.at(factorize(12, table)) == 0.5);
  CHECK_THROWS_AS(WeightFamily(0.0), DomainError);
  CHECK(parse_theta_variant("A") == ThetaVariant::kA);
  CHECK_THROWS(parse_theta_variant("C"));
}
