#include "deltakit/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "deltakit/deltafn.hpp"
#include "deltakit/error.hpp"
#include "deltakit/factor.hpp"
#include "deltakit/parallel.hpp"
#include "deltakit/sampler.hpp"
#include "deltakit/weights.hpp"

namespace deltakit {

namespace {

constexpr std::uint64_t kScanBlock = 4096;

void record(CheckResult& r, double excess, const std::string& where) {
  ++r.checked;
  r.worst_excess = std::max(r.worst_excess, excess);
  if (excess > 0) {
    ++r.violations;
    if (r.counterexample.empty()) r.counterexample = where;
  }
}

void merge_into(CheckResult& total, const CheckResult& part) {
  total.checked += part.checked;
  total.violations += part.violations;
  total.worst_excess = std::max(total.worst_excess, part.worst_excess);
  if (total.counterexample.empty()) total.counterexample = part.counterexample;
}

struct Scratch {
  Factorization f;
  std::vector<double> logs;
};

// Runs body(n, scratch, result) for 1 <= n <= x_max in parallel blocks and
// merges block results in n order.
template <class Body>
CheckResult scan(std::string name, std::string statement, std::uint64_t x_max,
                 const VerifyOptions& options, Body body) {
  CheckResult total;
  total.name = std::move(name);
  total.statement = std::move(statement);
  if (x_max == 0) return total;
  const SpfTable table = SpfTable::build(std::max<std::uint64_t>(x_max, 2));
  const std::uint64_t blocks = (x_max + kScanBlock - 1) / kScanBlock;
  std::vector<CheckResult> parts(blocks);
  parallel_for(blocks, resolve_threads(options.threads), [&](std::size_t b) {
    Scratch s;
    const std::uint64_t lo = b * kScanBlock + 1;
    const std::uint64_t hi = std::min(x_max, lo + kScanBlock - 1);
    for (std::uint64_t n = lo; n <= hi; ++n) {
      factorize_into(n, table, s.f);
      divisor_logs_into(s.f, s.logs);
      body(n, s, parts[b]);
    }
  });
  for (const auto& p : parts) merge_into(total, p);
  return total;
}

std::string at_n(std::uint64_t n) { return "n=" + std::to_string(n); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

CheckResult check_m1_tau(std::uint64_t x_max, const VerifyOptions& options) {
  return scan("m1_equals_tau", "|M_1(n) - tau(n)| <= 1e-8 tau(n)", x_max, options,
              [](std::uint64_t n, Scratch& s, CheckResult& r) {
                const double tau = static_cast<double>(s.logs.size());
                const double err = std::fabs(m_q(s.logs, 1.0) - tau);
                record(r, err - 1e-8 * tau, at_n(n));
              });
}

CheckResult check_m2_oracle(std::uint64_t x_max, const VerifyOptions& options) {
  return scan("m2_pair_oracle", "|M_2(n) - pair overlap sum| <= 1e-9 relative", x_max, options,
              [](std::uint64_t n, Scratch& s, CheckResult& r) {
                const double oracle = m2_pair_oracle(s.logs);
                const double err = std::fabs(m_q(s.logs, 2.0) - oracle);
                record(r, err - 1e-9 * oracle, at_n(n));
              });
}

CheckResult check_delta_lower_bound(std::uint64_t x_max, const VerifyOptions& options) {
  return scan("delta_lower_bound", "Delta(n) >= max(1, tau(n)/(1 + log n))", x_max, options,
              [](std::uint64_t n, Scratch& s, CheckResult& r) {
                const double d = static_cast<double>(delta_max(s.logs));
                const double bound = std::max(
                    1.0, static_cast<double>(s.logs.size()) / (1.0 + std::log(static_cast<double>(n))));
                record(r, bound - d, at_n(n));
              });
}

CheckResult check_delta_moment_bound(std::uint64_t x_max, int q_lo, int q_hi,
                                     const VerifyOptions& options) {
  if (q_lo < 1 || q_hi < q_lo) throw DomainError("check_delta_moment_bound: bad q range");
  const double slack = options.slack;
  return scan("delta_moment_bound",
              "Delta(n) <= 2 M_q(n)^{1/q}, q in [" + std::to_string(q_lo) + ", " +
                  std::to_string(q_hi) + "]",
              x_max, options, [=](std::uint64_t n, Scratch& s, CheckResult& r) {
                const double d = static_cast<double>(delta_max(s.logs));
                for (int q = q_lo; q <= q_hi; ++q) {
                  const double rhs = 2.0 * std::pow(m_q(s.logs, q), 1.0 / q);
                  record(r, d - rhs - slack, at_n(n) + " q=" + std::to_string(q));
                }
              });
}

CheckResult check_coprime_splits(std::uint64_t x_max, const VerifyOptions& options) {
  const double slack = options.slack;
  return scan("coprime_split", "Delta(n)^2 <= 4 M_2(a) M_2(b) for ab = n, n squarefree", x_max,
              options, [=](std::uint64_t n, Scratch& s, CheckResult& r) {
                if (!s.f.squarefree()) return;
                const double d = static_cast<double>(delta_max(s.logs));
                std::vector<std::uint64_t> primes;
                for (const auto& pp : s.f.pairs) primes.push_back(pp.prime);
                const std::size_t w = primes.size();
                // M_2 of every sub-product, indexed by prime subset.
                std::vector<double> m2(std::size_t{1} << w);
                std::vector<std::uint64_t> subset;
                std::vector<double> logs;
                for (std::size_t mask = 0; mask < m2.size(); ++mask) {
                  subset.clear();
                  for (std::size_t i = 0; i < w; ++i) {
                    if (mask >> i & 1U) subset.push_back(primes[i]);
                  }
                  divisor_logs_squarefree(subset, logs);
                  m2[mask] = m_q(logs, 2.0);
                }
                const std::size_t full = m2.size() - 1;
                for (std::size_t mask = 0; mask < m2.size(); ++mask) {
                  const double rhs = 4.0 * m2[mask] * m2[full ^ mask];
                  record(r, d * d - rhs - slack, at_n(n) + " split mask=" + std::to_string(mask));
                }
              });
}

std::vector<CheckResult> check_prime_extension(std::uint64_t triples, std::uint64_t n_max,
                                               std::uint64_t p_max, int q_lo, int q_hi,
                                               const VerifyOptions& options) {
  if (n_max < 1 || p_max < 2 || q_lo < 2 || q_hi < q_lo) {
    throw DomainError("check_prime_extension: bad parameters");
  }
  const SpfTable table = SpfTable::build(std::max<std::uint64_t>(n_max, 2));
  const auto primes = primes_up_to(p_max);

  // Each link is lhs <= rhs; the identity rows compare |lhs - rhs| against a
  // relative tolerance instead.
  struct Link {
    const char* name;
    const char* statement;
  };
  static constexpr Link kLinks[] = {
      {"W_q_bound", "W_q(n,p) <= 2^{q-1} M_q(n)"},
      {"np_lower", "2 M_q(n) <= M_q(np)"},
      {"np_middle", "M_q(np) <= 2 M_q(n) + 2 W_q(n,p)"},
      {"np_upper_literal", "2 M_q(n) + 2 W_q(n,p) <= 2^q M_q(n)"},
      {"np_outer", "M_q(np) <= 2^q M_q(n)"},
      {"ratio_lower", "M_q(n)/tau(n) <= M_q(np)/tau(np)"},
      {"ratio_middle", "M_q(np)/tau(np) <= M_q(n)/tau(n) + W_q(n,p)/tau(n)"},
      {"ratio_upper_literal", "M_q(n)/tau(n) + W_q(n,p)/tau(n) <= 2^{q-1} M_q(n)/tau(n)"},
      {"ratio_outer", "M_q(np)/tau(np) <= 2^{q-1} M_q(n)/tau(n)"},
      {"W_q_product_bound",
       "W_q(n,v) <= 2^{q-1} int Delta(u) Delta(u - log v) {Delta(u - log v)^{q-2} + Delta(u)^{q-2}}"},
      {"subadditive_Mq_over_tau", "f(np) <= f(n) + W_q(n,p)/tau(n) for f = M_q/tau"},
      {"np_expansion", "M_q(np) = 2 M_q(n) + sum_{1<=j<q} binom(q,j) N_{j,q}(n,p)  (1e-9 rel)"},
      {"N_reflection", "N_{j,q}(n,p) = N_{q-j,q}(n,p)  (1e-9 rel)"},
  };
  constexpr std::size_t kCount = std::size(kLinks);

  // Triples are drawn up front so the data is independent of scheduling.
  struct Triple {
    std::uint64_t n;
    std::uint64_t p;
    int q;
  };
  std::vector<Triple> work(triples);
  for (std::uint64_t i = 0; i < triples; ++i) {
    SplitMix64 rng = SplitMix64::for_sample(options.seed, i);
    Triple tr{};
    do {
      tr.n = 1 + rng.next() % n_max;
      tr.p = primes[rng.next() % primes.size()];
    } while (tr.n % tr.p == 0);
    tr.q = q_lo + static_cast<int>(rng.next() % static_cast<std::uint64_t>(q_hi - q_lo + 1));
    work[i] = tr;
  }

  const std::uint64_t chunk = 256;
  const std::uint64_t chunks = (triples + chunk - 1) / chunk;
  std::vector<std::vector<CheckResult>> parts(chunks, std::vector<CheckResult>(kCount));
  const double slack = options.slack;
  parallel_for(chunks, resolve_threads(options.threads), [&](std::size_t c) {
    Factorization f;
    std::vector<double> logs;
    auto& res = parts[c];
    for (std::uint64_t i = c * chunk; i < std::min(triples, (c + 1) * chunk); ++i) {
      const auto [n, p, q] = work[i];
      factorize_into(n, table, f);
      divisor_logs_into(f, logs);
      const auto logs_np = logs_times_prime(logs, p);
      const double v = static_cast<double>(p);
      const double tau = static_cast<double>(logs.size());
      const double tau_np = 2.0 * tau;
      const double M = m_q(logs, q);
      const double Mnp = m_q(logs_np, q);
      const double W = w_q(logs, q, v);
      const double P = w_q_product_bound(logs, q, v);
      const double two_q = std::ldexp(1.0, q);
      const double half = std::ldexp(1.0, q - 1);
      std::vector<double> N(static_cast<std::size_t>(q));
      for (int j = 1; j < q; ++j) N[static_cast<std::size_t>(j)] = n_jq(logs, j, q, v);
      double expansion = 2.0 * M;
      double binom = 1.0;
      for (int j = 1; j < q; ++j) {
        binom = binom * (q - j + 1) / j;
        expansion += binom * N[static_cast<std::size_t>(j)];
      }
      const std::string where =
          "n=" + std::to_string(n) + " p=" + std::to_string(p) + " q=" + std::to_string(q);
      record(res[0], W - half * M - slack, where);
      record(res[1], 2.0 * M - Mnp - slack, where);
      record(res[2], Mnp - (2.0 * M + 2.0 * W) - slack, where);
      record(res[3], 2.0 * M + 2.0 * W - two_q * M - slack,
             where + " lhs=" + fmt(2.0 * M + 2.0 * W) + " rhs=" + fmt(two_q * M));
      record(res[4], Mnp - two_q * M - slack, where);
      record(res[5], M / tau - Mnp / tau_np - slack, where);
      record(res[6], Mnp / tau_np - (M / tau + W / tau) - slack, where);
      record(res[7], M / tau + W / tau - half * M / tau - slack,
             where + " lhs=" + fmt(M / tau + W / tau) + " rhs=" + fmt(half * M / tau));
      record(res[8], Mnp / tau_np - half * M / tau - slack, where);
      record(res[9], W - P - slack, where);
      record(res[10], Mnp / tau_np - M / tau - W / tau - slack, where);
      record(res[11], std::fabs(Mnp - expansion) - 1e-9 * Mnp, where);
      double worst = -1.0;
      for (int j = 1; j < q; ++j) {
        const double a = N[static_cast<std::size_t>(j)];
        const double b = N[static_cast<std::size_t>(q - j)];
        worst = std::max(worst, std::fabs(a - b) - 1e-9 * std::max({a, b, 1.0}));
      }
      record(res[12], worst, where);
    }
  });

  std::vector<CheckResult> out(kCount);
  for (std::size_t k = 0; k < kCount; ++k) {
    out[k].name = kLinks[k].name;
    out[k].statement = kLinks[k].statement;
    for (const auto& part : parts) merge_into(out[k], part[k]);
  }
  return out;
}

ParsevalBand parseval_band(std::uint64_t x_max, const VerifyOptions& options) {
  if (x_max < 1) throw DomainError("parseval_band: x_max must be >= 1");
  const SpfTable table = SpfTable::build(std::max<std::uint64_t>(x_max, 2));
  const std::uint64_t blocks = (x_max + kScanBlock - 1) / kScanBlock;
  std::vector<ParsevalBand> parts(blocks);
  parallel_for(blocks, resolve_threads(options.threads), [&](std::size_t b) {
    Factorization f;
    std::vector<double> logs;
    ParsevalBand& band = parts[b];
    band.min_ratio = 1e300;
    band.max_ratio = -1e300;
    const std::uint64_t lo = b * kScanBlock + 1;
    const std::uint64_t hi = std::min(x_max, lo + kScanBlock - 1);
    for (std::uint64_t n = lo; n <= hi; ++n) {
      factorize_into(n, table, f);
      divisor_logs_into(f, logs);
      const double r = parseval_ratio(logs);
      if (r < band.min_ratio) {
        band.min_ratio = r;
        band.argmin = n;
      }
      if (r > band.max_ratio) {
        band.max_ratio = r;
        band.argmax = n;
      }
    }
  });
  ParsevalBand total{x_max, 1e300, -1e300, 0, 0};
  for (const auto& p : parts) {
    if (p.min_ratio < total.min_ratio) {
      total.min_ratio = p.min_ratio;
      total.argmin = p.argmin;
    }
    if (p.max_ratio > total.max_ratio) {
      total.max_ratio = p.max_ratio;
      total.argmax = p.argmax;
    }
  }
  return total;
}

std::vector<CheckResult> run_suite(const std::string& suite, std::uint64_t x_max,
                                   const VerifyOptions& options) {
  const bool all = suite == "all";
  if (!all && suite != "ineq" && suite != "identities" && suite != "weights") {
    throw DomainError("unknown verify suite '" + suite + "' (ineq, identities, weights, all)");
  }
  std::vector<CheckResult> out;
  if (all || suite == "ineq") {
    out.push_back(check_delta_lower_bound(x_max, options));
    out.push_back(check_delta_moment_bound(x_max, 2, 8, options));
    out.push_back(check_coprime_splits(std::min<std::uint64_t>(x_max, 30'000), options));
    for (auto& r : check_prime_extension(10'000, x_max, 1000, 2, 4, options)) {
      out.push_back(std::move(r));
    }
  }
  if (all || suite == "identities") {
    out.push_back(check_m1_tau(x_max, options));
    out.push_back(check_m2_oracle(std::min<std::uint64_t>(x_max, 20'000), options));
    const ParsevalBand band = parseval_band(std::min<std::uint64_t>(x_max, 20'000), options);
    CheckResult r;
    r.name = "parseval_band";
    r.statement = "range of int_0^1 |tau(n,theta)|^2 / M_2(n) (reported, not gating)";
    r.informational = true;
    r.checked = band.x_max;
    r.worst_excess = band.max_ratio;
    r.counterexample = "min=" + fmt(band.min_ratio) + " at n=" + std::to_string(band.argmin) +
                       ", max=" + fmt(band.max_ratio) + " at n=" + std::to_string(band.argmax);
    out.push_back(std::move(r));
  }
  if (all || suite == "weights") {
    const WeightFamily w(1.0);
    for (const double y : {1e4, 1e5, 1e6}) {
      const auto c = chebyshev_check(y, w);
      CheckResult r;
      r.name = "chebyshev_y=" + fmt(y);
      r.statement = "sum_{p<=y} rho(p) log p ~ z y (relative error reported)";
      r.informational = true;
      r.checked = 1;
      r.worst_excess = c.rel_err;
      out.push_back(std::move(r));
      const auto m = mertens_product(y, w);
      CheckResult s;
      s.name = "mertens_x=" + fmt(y);
      s.statement = "prod_{p<x} (1 + rho(p)/p) / (log x)^z (ratio reported)";
      s.informational = true;
      s.checked = 1;
      s.worst_excess = m.ratio;
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace deltakit
