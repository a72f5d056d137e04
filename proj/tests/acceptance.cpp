// Acceptance gate: one PASS/FAIL line per criterion.
//
// A criterion listed in known_failures() still runs in full and still prints
// FAIL when it fails; the process exit status ignores it. Any other failure
// makes the run fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "deltakit/factor.hpp"
#include "deltakit/integrals.hpp"
#include "deltakit/parallel.hpp"
#include "deltakit/sampler.hpp"
#include "deltakit/sweeps.hpp"
#include "deltakit/verify.hpp"
#include "deltakit/weights.hpp"
#include "deltakit/wforms.hpp"
#include "oracles.hpp"

using namespace deltakit;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Failures whose analysis is recorded; the reason is printed next to the FAIL.
std::map<int, std::string> known_failures() {
  std::map<int, std::string> m;
  m[5] =
      "the final link 2M_q + 2W_q <= 2^q M_q (and its /tau form) is false as stated, e.g. "
      "n=3 p=2 q=2 gives 8.83 > 8; W_q <= 2^{q-1} M_q also fails for even q >= 4 (n=225 v=2 q=4), "
      "rarely enough that a given seed may miss it; M_q(np) <= 2^q M_q itself holds";
  if (std::thread::hardware_concurrency() < 8) {
    m[16] = "scaling to 8 workers cannot be observed on " +
            std::to_string(std::thread::hardware_concurrency()) + " hardware thread(s)";
  }
  return m;
}

unsigned workers() { return resolve_threads(0); }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

constexpr double kNoBudget = std::numeric_limits<double>::infinity();

Outcome from_check(const CheckResult& r, double secs, double budget) {
  Outcome o;
  o.pass = r.passed() && secs < budget;
  o.detail = std::to_string(r.violations) + " violations in " + std::to_string(r.checked) +
             " checks, " + fmt(secs) + "s";
  if (std::isfinite(budget)) o.detail += " (budget " + fmt(budget) + "s)";
  if (!r.counterexample.empty()) o.detail += ", first: " + r.counterexample;
  return o;
}

Outcome c1() {
  VerifyOptions v;
  v.threads = workers();
  const auto t0 = Clock::now();
  const auto r = check_m1_tau(100000, v);
  return from_check(r, seconds_since(t0), 30);
}

Outcome c2() {
  VerifyOptions v;
  v.threads = workers();
  const auto t0 = Clock::now();
  const auto r = check_m2_oracle(20000, v);
  return from_check(r, seconds_since(t0), kNoBudget);
}

// Library delta_max against anchored windows over logs of integer divisors
// from a divisor-list sieve.
Outcome c3() {
  const std::uint64_t x = 1'000'000;
  const std::uint64_t block = 1 << 16;
  const auto t0 = Clock::now();
  SweepOptions so;
  so.threads = workers();
  so.compute_m2 = false;
  std::vector<std::uint64_t> lib(x + 1);
  delta_table(x, so, [&](std::span<const DeltaRow> rows) {
    for (const auto& r : rows) lib[r.n] = r.delta;
  });
  const std::uint64_t blocks = (x + block - 1) / block;
  std::vector<std::uint64_t> mismatches(blocks, 0);
  std::vector<std::uint64_t> first_bad(blocks, 0);
  parallel_for(blocks, workers(), [&](std::size_t b) {
    const std::uint64_t lo = b * block + 1;
    const std::uint64_t hi = std::min(x, lo + block - 1);
    const auto divs = oracle::divisor_sieve(lo, hi);
    std::vector<double> logs;
    for (std::uint64_t n = lo; n <= hi; ++n) {
      logs.clear();
      for (const auto d : divs[n - lo]) logs.push_back(std::log(static_cast<double>(d)));
      const std::uint64_t best = oracle::delta_anchored(logs);
      if (best != lib[n]) {
        if (mismatches[b]++ == 0) first_bad[b] = n;
      }
    }
  });
  std::uint64_t bad = 0;
  std::uint64_t first = 0;
  for (std::size_t b = 0; b < blocks; ++b) {
    bad += mismatches[b];
    if (!first && first_bad[b]) first = first_bad[b];
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = bad == 0 && secs < 300;
  o.detail = std::to_string(bad) + " mismatches over n <= 1e6, " + fmt(secs) + "s (budget 300s)";
  if (bad) o.detail += ", first n=" + std::to_string(first);
  return o;
}

Outcome c4() {
  VerifyOptions v;
  v.threads = workers();
  const auto t0 = Clock::now();
  const auto r = check_delta_lower_bound(1'000'000, v);
  return from_check(r, seconds_since(t0), kNoBudget);
}

Outcome c5() {
  VerifyOptions v;
  v.threads = workers();
  v.slack = 1e-9;
  const auto res = check_prime_extension(10000, 100000, 1000, 2, 4, v);
  Outcome o;
  o.pass = true;
  std::string failed;
  for (const auto& r : res) {
    if (r.informational) continue;
    if (!r.passed()) {
      o.pass = false;
      failed += " " + r.name + "(" + std::to_string(r.violations) + ", " + r.counterexample + ")";
    }
  }
  o.detail = std::to_string(res.size()) + " links x 10000 triples";
  if (!failed.empty()) o.detail += "; failing:" + failed;
  return o;
}

Outcome c6() {
  VerifyOptions v;
  v.threads = workers();
  const auto t0 = Clock::now();
  const auto r = check_coprime_splits(30000, v);
  return from_check(r, seconds_since(t0), kNoBudget);
}

Outcome c7() {
  VerifyOptions v;
  v.threads = workers();
  const auto t0 = Clock::now();
  const auto r = check_delta_moment_bound(100000, 2, 8, v);
  return from_check(r, seconds_since(t0), kNoBudget);
}

Outcome c8() {
  Outcome o{true, ""};
  for (int t = 1; t <= 8; ++t) {
    const Rational m = mass_identity(t);
    if (!(m == Rational{std::int64_t{1} << t, 1})) {
      o.pass = false;
      o.detail += " t=" + std::to_string(t) + " gives " + m.to_string();
    }
  }
  if (o.pass) o.detail = "sum 2^{-|w|} = 2^t exactly for t = 1..8";
  return o;
}

Outcome c9() {
  const auto t0 = Clock::now();
  MassBoundOptions opts;
  opts.threads = workers();
  opts.keep_rows = false;
  opts.grid = 50;
  opts.n_samples = 100000;
  std::ostringstream detail;
  bool pass = true;
  auto tally = [&](const char* label, const MassBoundReport& r) {
    pass = pass && r.realizable.violations == 0 && r.realizable.full_mass_fail == 0 &&
           r.realizable.monotone_fail == 0 && r.canonical.equality_fail == 0;
    detail << label << ": " << r.realizable.bases << " realizable bases, "
           << r.realizable.violations << " violations, abstract " << r.abstract.bases << "/"
           << r.abstract.violations << "; ";
  };
  tally("t=3 grid", verify_mass_bound(3, MassBoundMode::kExhaustive, opts));
  tally("t=3 random", verify_mass_bound(3, MassBoundMode::kSampled, opts));
  tally("t=4 random", verify_mass_bound(4, MassBoundMode::kSampled, opts));
  tally("t=5 random", verify_mass_bound(5, MassBoundMode::kSampled, opts));
  const double secs = seconds_since(t0);
  detail << fmt(secs) << "s (budget 600s)";
  return {pass && secs < 600, detail.str()};
}

Outcome c10() {
  IntegralOptions io;
  io.threads = workers();
  const std::vector<double> X = {1e2, 1e3, 1e4};
  std::ostringstream d;
  bool pass = true;
  for (const double z : {1.0, 2.0}) {
    const GrowthFit f = growth_fit(1, z, X, io);
    const bool ok = std::fabs(f.a - 2 * z) <= 0.15 && (z != 1.0 || f.b > 0);
    pass = pass && ok;
    d << "z=" << z << ": a=" << fmt(f.a) << " b=" << fmt(f.b) << "; ";
  }
  // Dual route at random points.
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> uz(0.25, 3.0);
  std::uniform_real_distribution<double> ulx(0.0, 4.0);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const double z = uz(gen);
    const double x = std::pow(10.0, ulx(gen));
    const double a = I_tz(1, z, x, IntegralMethod::kAdaptive, io).value;
    const double c = I_tz(1, z, x, IntegralMethod::kClosed, io).value;
    worst = std::max(worst, std::fabs(a - c) / std::fabs(c));
  }
  pass = pass && worst <= 1e-6;
  d << "adaptive vs closed worst rel diff " << fmt(worst) << " over 100 points";
  return {pass, d.str()};
}

Outcome c11() {
  const WeightFamily w(1.0);
  const ExhaustiveTable table(10, w);
  const SampleModel model(10, w);
  const auto counts = sample_atom_counts(table, model, 100000, 1);
  std::vector<double> probs;
  for (const auto& a : table.atoms()) probs.push_back(a.probability);
  const auto chi = chi_square_test(counts, probs);
  std::ostringstream d;
  bool pass = chi.p_value > 0.001;
  d << "chi2=" << fmt(chi.statistic) << " dof=" << chi.dof << " p=" << fmt(chi.p_value);
  SamplerOptions so;
  so.threads = workers();
  for (const double x : {1e3, 1e4}) {
    double exact = 0;
    for (std::uint64_t p = 2; double(p) < x; ++p) {
      if (oracle::is_prime(p)) exact += 1.0 / (double(p) + 1.0);
    }
    const auto e = expect(stat_omega(), x, w, 100000, 1, so);
    const double zscore = (e.mean - exact) / e.std_error;
    pass = pass && std::fabs(zscore) <= 3;
    d << "; x=" << x << " E(omega)=" << fmt(e.mean) << " exact=" << fmt(exact)
      << " z=" << fmt(zscore);
  }
  return {pass, d.str()};
}

Outcome c12() {
  TruncationParams base;
  base.t = 1;
  base.z = 1;
  SamplerOptions so;
  so.threads = workers();
  const std::vector<double> Ts = {4, 8, 16, 32};
  const auto est =
      tail_prob_T_sweep(Ts, EVariant::kPlain, base, 1e6, WeightFamily(1.0), 200000, 1, so);
  bool monotone = true;
  for (std::size_t i = 1; i < est.size(); ++i) monotone = monotone && est[i].mean <= est[i - 1].mean;
  // Upper 3-sigma of P(32) against half the lower 3-sigma of P(4).
  const double hi32 = est[3].mean + 3 * est[3].std_error;
  const double lo4 = est[0].mean - 3 * est[0].std_error;
  const bool halved = hi32 <= 0.5 * lo4;
  std::ostringstream d;
  d << "P =";
  for (const auto& e : est) d << " " << fmt(e.mean) << "(" << fmt(e.std_error) << ")";
  d << "; non-increasing=" << (monotone ? "yes" : "no") << ", P32+3s=" << fmt(hi32)
    << " vs 0.5(P4-3s)=" << fmt(0.5 * lo4);
  return {monotone && halved, d.str()};
}

Outcome c13() {
  SamplerOptions so;
  so.threads = workers();
  SweepOptions sw;
  sw.threads = workers();
  sw.compute_m2 = false;
  const std::vector<std::uint64_t> xs = {10000, 100000, 1000000};
  const std::vector<MomentSpec> specs = {{1, 1}, {2, 1}};
  const auto sweep = s_moments(specs, xs, sw);
  bool pass = true;
  std::ostringstream d;
  for (const auto& spec : specs) {
    std::vector<double> ratios;
    for (const auto x : xs) {
      double S = 0;
      for (const auto& r : sweep) {
        if (r.x == double(x) && r.t == spec.t) S = r.S;
      }
      ratios.push_back(moment_ratio(x, spec.t, WeightFamily(spec.z), 200000, 1, so, sw, S).ratio);
    }
    const double spread = *std::max_element(ratios.begin(), ratios.end()) /
                          *std::min_element(ratios.begin(), ratios.end());
    pass = pass && spread <= 4;
    d << "(t,z)=(" << spec.t << "," << spec.z << ") ratios";
    for (const double r : ratios) d << " " << fmt(r);
    d << " spread " << fmt(spread) << "; ";
  }
  return {pass, d.str()};
}

Outcome c14() {
  bool pass = true;
  std::ostringstream d;
  for (const double T : {10.0, 100.0}) {
    for (const int delta : {0, 1}) {
      const auto b = check_recursion(200, T, delta, 10, ThetaVariant::kB);
      pass = pass && b.all_pass();
      // Second route: direct log-factorial evaluation.
      for (const auto& row : b.rows) {
        const double lhs = double(oracle::log_recursion_lhs(row.q, T, delta, 10, false));
        if (std::fabs(lhs - row.log_lhs) > 1e-9 * std::max(1.0, std::fabs(lhs))) pass = false;
      }
    }
    const auto a = check_recursion(200, T, 0, 10, ThetaVariant::kA);
    std::optional<int> first;
    for (const auto& row : a.rows) {
      const long double lhs = oracle::log_recursion_lhs(row.q, T, 0, 10, true);
      const long double rhs = oracle::log_theta(row.q, T, 0, 10, true) - std::log(10.0L) -
                              std::log((long double)T);
      if (!(lhs <= rhs) && !first) first = row.q;
    }
    pass = pass && a.first_fail_sum.has_value() && a.first_fail_sum == first;
    d << "T=" << T << ": B passes all q<=200, A(delta=0) first fails at q="
      << (a.first_fail_sum ? std::to_string(*a.first_fail_sum) : "none") << "; ";
  }
  return {pass, d.str()};
}

Outcome c15() {
  const auto t0 = Clock::now();
  SweepOptions sw;
  sw.threads = workers();
  sw.compute_m2 = false;
  const std::vector<std::uint64_t> xs = {100000, 1000000, 10000000};
  const std::vector<MomentSpec> specs = {{2, 1}, {1, 1}};
  const auto recs = s_moments(specs, xs, sw);
  std::vector<SweepRecord> s21;
  std::vector<SweepRecord> s11;
  for (const auto& r : recs) (r.t == 2 ? s21 : s11).push_back(r);
  const auto f21 = exponent_fit(s21);
  const auto f11 = exponent_fit(s11);
  const double secs = seconds_since(t0);
  const bool pass = f21.slope >= 0.8 && f21.slope <= 1.6 && f11.slope >= -0.3 &&
                    f11.slope <= 0.6 && secs < 900;
  return {pass, "S_{2,1} slope " + fmt(f21.slope) + " in [0.8,1.6], S_{1,1} slope " +
                    fmt(f11.slope) + " in [-0.3,0.6], " + fmt(secs) + "s (budget 900s)"};
}

double time_table(std::uint64_t x, unsigned threads) {
  SweepOptions so;
  so.threads = threads;
  std::uint64_t sink = 0;
  const auto t0 = Clock::now();
  delta_table(x, so, [&](std::span<const DeltaRow> rows) { sink += rows.back().delta; });
  const double secs = seconds_since(t0);
  if (sink == 0) std::fprintf(stderr, "unexpected empty table\n");
  return secs;
}

Outcome c16() {
  const double t8 = time_table(10'000'000, 8);
  const double t1 = time_table(10'000'000, 1);
  const double speedup = t1 / t8;
  // Linear within 30%: speedup at least 0.7 * 8.
  const bool fast = t8 < 60;
  const bool scales = speedup >= 0.7 * 8;
  std::ostringstream d;
  d << "x=1e7: " << fmt(t8) << "s on 8 workers (budget 60s, " << (fast ? "met" : "missed")
    << "), " << fmt(t1) << "s on 1, speedup " << fmt(speedup) << " (need >= 5.6); hardware threads "
    << std::thread::hardware_concurrency();
  return {fast && scales, d.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, c1},   {2, c2},   {3, c3},   {4, c4},   {5, c5},   {6, c6},   {7, c7},   {8, c8},
      {9, c9},   {10, c10}, {11, c11}, {12, c12}, {13, c13}, {14, c14}, {15, c15}, {16, c16},
  };
  const auto known = known_failures();
  int unexpected = 0;
  for (const auto& [id, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const auto k = known.find(id);
    std::string tag = o.pass ? "PASS" : "FAIL";
    std::string note;
    if (!o.pass && k != known.end()) {
      note = " [expected: " + k->second + "]";
    } else if (!o.pass) {
      ++unexpected;
    } else if (k != known.end()) {
      note = " [listed as an expected failure but passed]";
    }
    std::printf("%s criterion %2d: %s%s\n", tag.c_str(), id, o.detail.c_str(), note.c_str());
    std::fflush(stdout);
  }
  std::printf("%d unexpected failure(s)\n", unexpected);
  return unexpected == 0 ? 0 : 1;
}
