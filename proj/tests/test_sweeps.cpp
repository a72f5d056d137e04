#include <doctest.h>

#include <cmath>

#include "deltakit/error.hpp"
#include "deltakit/sweeps.hpp"
#include "oracles.hpp"

using namespace deltakit;

TEST_CASE("delta rows agree with brute force") {
  SweepOptions o;
  o.block_size = 777;
  const auto rows = delta_table(5000, o);
  REQUIRE(rows.size() == 5000);
  for (const auto& r : rows) {
    const auto divs = oracle::divisors(r.n);
    const auto logs = oracle::logs_of(divs);
    const auto fac = oracle::trial_factor(r.n);
    CHECK(r.tau == divs.size());
    CHECK(r.omega == fac.size());
    bool sf = true;
    for (const auto& [p, e] : fac) sf = sf && e == 1;
    CHECK(r.mu_squared == (sf ? 1u : 0u));
    CHECK(r.delta == oracle::delta_anchored(logs));
    CHECK(r.m2 == doctest::Approx(oracle::m_q(logs, 2)).epsilon(1e-10));
  }
}

TEST_CASE("rows do not depend on block size, threads or starting point") {
  SweepOptions a;
  a.block_size = 1 << 16;
  SweepOptions b;
  b.block_size = 1000;
  b.threads = 3;
  const auto ra = delta_table(60000, a);
  const auto rb = delta_table(60000, b);
  CHECK(ra == rb);
  std::vector<DeltaRow> tail;
  delta_table(60000, b, [&](std::span<const DeltaRow> blk) { tail.insert(tail.end(), blk.begin(), blk.end()); },
              50001);
  REQUIRE(tail.size() == 10000);
  CHECK(tail.front() == ra[50000]);
  CHECK(tail.back() == ra.back());
  const auto table = SpfTable::build(100);
  CHECK(delta_row(60, table) == ra[59]);
}

TEST_CASE("weighted moments against a direct sum") {
  const auto rows = delta_table(20000);
  for (const double t : {1.0, 2.0, 1.5}) {
    for (const double z : {0.5, 1.0, 2.0}) {
      double S = 0;
      for (const auto& r : rows) S += std::pow(z, double(r.omega)) * std::pow(double(r.delta), t);
      const auto rec = s_moment(20000, t, z);
      CHECK(rec.S == doctest::Approx(S).epsilon(1e-12));
      CHECK(rec.normalized == doctest::Approx(S / sweep_normalizer(20000, t, z)).epsilon(1e-12));
    }
  }
  CHECK(std::isnan(sweep_normalizer(1, 1, 1)));
  CHECK(sweep_normalizer(100, 2, 1) == doctest::Approx(100 * std::log(100.0)));
}

TEST_CASE("one pass over several checkpoints") {
  const std::vector<MomentSpec> specs = {{1, 1}, {2, 0.5}};
  const std::vector<std::uint64_t> grid = {1000, 10, 5000};
  const auto recs = s_moments(specs, grid);
  REQUIRE(recs.size() == 6);
  for (const auto& r : recs) {
    const auto single = s_moment(std::uint64_t(r.x), r.t, r.z);
    CHECK(r.S == doctest::Approx(single.S).epsilon(1e-13));
  }
  MomentAccumulator acc({{1, 1}}, {5});
  const std::vector<DeltaRow> skip = {DeltaRow{2, 2, 1, 1, 2, 2}};
  CHECK_THROWS(acc.consume(skip));
  CHECK_THROWS_AS(s_moment(10, 0.5, 1), DomainError);
}

TEST_CASE("log log slope fit") {
  std::vector<double> x = {1e4, 1e5, 1e6, 1e7};
  std::vector<double> S;
  for (const double v : x) S.push_back(v * std::pow(std::log(v), 1.25) * 3.0);
  const auto f = fit_loglog_slope(x, S, 2, 1);
  CHECK(f.slope == doctest::Approx(1.25).epsilon(1e-9));
  CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-9));
  CHECK(f.target == 1.0);
  REQUIRE(f.residual_trend.has_value());
  CHECK(std::fabs(*f.residual_trend) < 1e-8);
  const std::vector<double> few = {1e4, 1e5};
  CHECK_THROWS(fit_loglog_slope(few, std::vector<double>{1, 2}, 1, 1));
}

TEST_CASE("sweep over the sampler expectation") {
  const auto r = moment_ratio(10000, 1, WeightFamily(1.0), 20000, 1);
  CHECK(r.S == doctest::Approx(s_moment(10000, 1, 1).S));
  CHECK(r.ratio == doctest::Approx(r.S / (1e4 * r.expectation.mean)));
  CHECK(r.std_error > 0);
  CHECK_THROWS_AS(moment_ratio(100, 1, WeightFamily(1.0, [](std::uint64_t) { return 1.0; }), 10, 1),
                  DomainError);
}

TEST_CASE("sweep cap") {
  SweepOptions o;
  o.cap = 1000;
  CHECK_THROWS_AS(delta_table(1001, o), ResourceError);
}

TEST_CASE("random subsample of a large table against brute force") {
  const std::uint64_t x = 400000;
  SweepOptions o;
  o.compute_m2 = false;
  const auto rows = delta_table(x, o);
  SplitMix64 rng(77);
  double prev = 0;
  for (int i = 0; i < 10000; ++i) {
    const std::uint64_t n = 1 + rng.next() % x;
    const auto& r = rows[n - 1];
    REQUIRE(r.n == n);
    CHECK(r.delta == oracle::delta_anchored(oracle::divisor_logs(n)));
    CHECK(double(r.delta) >= std::max(1.0, double(r.tau) / (1 + std::log(double(n)))));
  }
  for (const std::uint64_t cp : {1000u, 10000u, 100000u, 400000u}) {
    const double S = s_moment(cp, 2, 1).S;
    CHECK(S > prev);
    prev = S;
  }
}
