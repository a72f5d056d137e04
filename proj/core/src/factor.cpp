#include "deltakit/factor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "deltakit/error.hpp"

namespace deltakit {

SpfTable SpfTable::build(std::uint64_t limit, std::uint64_t cap) {
  if (limit < 2) throw DomainError("build_spf: limit must be at least 2");
  if (limit > cap) {
    throw ResourceError("build_spf: limit " + std::to_string(limit) + " exceeds cap " +
                        std::to_string(cap));
  }
  if (limit > 0xFFFFFFFFull) throw ResourceError("build_spf: limit exceeds 32-bit table range");

  SpfTable table;
  table.limit_ = limit;
  table.spf_.assign(limit + 1, 0);
  auto& spf = table.spf_;
  auto& primes = table.primes_;
  primes.reserve(limit < 100 ? 32 : static_cast<std::size_t>(1.1 * limit / std::log(limit)));

  // Linear sieve: every composite is struck exactly once, by its smallest prime.
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (spf[i] == 0) {
      spf[i] = static_cast<std::uint32_t>(i);
      primes.push_back(static_cast<std::uint32_t>(i));
    }
    const std::uint32_t si = spf[i];
    for (const std::uint32_t p : primes) {
      if (p > si) break;
      const std::uint64_t m = i * p;
      if (m > limit) break;
      spf[m] = p;
    }
  }
  return table;
}

std::vector<std::uint64_t> primes_up_to(std::uint64_t limit, std::uint64_t cap) {
  if (limit > cap) throw ResourceError("primes_up_to: limit exceeds cap");
  std::vector<std::uint64_t> primes;
  if (limit < 2) return primes;
  std::vector<bool> composite(limit + 1, false);
  for (std::uint64_t i = 2; i * i <= limit; ++i) {
    if (composite[i]) continue;
    for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
  }
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (!composite[i]) primes.push_back(i);
  }
  return primes;
}

bool Factorization::squarefree() const noexcept {
  return std::all_of(pairs.begin(), pairs.end(),
                     [](const PrimePower& pp) { return pp.exponent == 1; });
}

std::uint64_t Factorization::tau() const noexcept {
  std::uint64_t t = 1;
  for (const auto& pp : pairs) t *= pp.exponent + 1;
  return t;
}

std::uint64_t Factorization::reconstruct() const noexcept {
  std::uint64_t m = 1;
  for (const auto& pp : pairs) {
    for (std::uint32_t k = 0; k < pp.exponent; ++k) m *= pp.prime;
  }
  return m;
}

void factorize_into(std::uint64_t n, const SpfTable& table, Factorization& out) {
  if (n == 0) throw DomainError("factorize: n must be positive");
  if (n > table.limit() && n != 1) {
    throw RangeError("factorize: n = " + std::to_string(n) + " exceeds table limit " +
                     std::to_string(table.limit()));
  }
  out.n = n;
  out.pairs.clear();
  std::uint64_t m = n;
  while (m > 1) {
    const std::uint64_t p = table.spf(m);
    std::uint32_t e = 0;
    do {
      m /= p;
      ++e;
    } while (m % p == 0);
    out.pairs.push_back({p, e});
  }
}

Factorization factorize(std::uint64_t n, const SpfTable& table) {
  Factorization f;
  factorize_into(n, table, f);
  return f;
}

namespace {

void check_tau(std::uint64_t tau, std::size_t cap) {
  if (tau > cap) {
    throw ResourceError("divisor_logs: tau(n) = " + std::to_string(tau) + " exceeds cap " +
                        std::to_string(cap));
  }
}

// Appends x + k*lp for k = 1..e to the sorted run `out` and keeps it sorted.
void extend_sorted(std::vector<double>& out, double lp, std::uint32_t e) {
  // Merging reorders the prefix, so shifts are taken from a copy of the base run.
  const std::vector<double> base(out);
  for (std::uint32_t k = 1; k <= e; ++k) {
    const double shift = static_cast<double>(k) * lp;
    const std::size_t old = out.size();
    for (const double l : base) out.push_back(l + shift);
    std::inplace_merge(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(old), out.end());
  }
}

}  // namespace

void divisor_logs_into(const Factorization& f, std::vector<double>& out, std::size_t tau_cap) {
  // Overflow-safe tau check before allocating.
  std::uint64_t tau = 1;
  for (const auto& pp : f.pairs) {
    tau *= pp.exponent + 1;
    check_tau(tau, tau_cap);
  }
  out.clear();
  out.reserve(tau);
  out.push_back(0.0);
  for (const auto& pp : f.pairs) {
    extend_sorted(out, std::log(static_cast<double>(pp.prime)), pp.exponent);
  }
}

DivLogs divisor_logs(const Factorization& f, std::size_t tau_cap) {
  DivLogs d;
  divisor_logs_into(f, d.logs, tau_cap);
  return d;
}

void divisor_logs_squarefree(std::span<const std::uint64_t> primes, std::vector<double>& out,
                             std::size_t tau_cap) {
  if (primes.size() >= 63) check_tau(~std::uint64_t{0}, tau_cap);
  check_tau(std::uint64_t{1} << primes.size(), tau_cap);
  out.clear();
  out.reserve(std::size_t{1} << primes.size());
  out.push_back(0.0);
  for (const std::uint64_t p : primes) extend_sorted(out, std::log(static_cast<double>(p)), 1);
}

ArithStats arith_stats(const Factorization& f) noexcept {
  ArithStats s;
  s.omega = f.pairs.size();
  for (const auto& pp : f.pairs) {
    s.tau *= pp.exponent + 1;
    s.big_omega += pp.exponent;
    if (pp.exponent > 1) s.mu_squared = 0;
  }
  return s;
}

}  // namespace deltakit
