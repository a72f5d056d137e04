#pragma once

// Prime sieving, factorization tables and divisor-log generation.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace deltakit {

inline constexpr std::uint64_t kDefaultSieveCap = 200'000'000;
inline constexpr std::size_t kDefaultTauCap = std::size_t{1} << 20;

// Smallest-prime-factor table for 2 <= n <= limit, built by a linear sieve.
// Immutable after construction; safe to share across threads.
class SpfTable {
 public:
  // Throws ResourceError if limit exceeds `cap`, DomainError if limit < 2.
  static SpfTable build(std::uint64_t limit, std::uint64_t cap = kDefaultSieveCap);

  std::uint64_t limit() const noexcept { return limit_; }
  // Entries below 2 are 0.
  std::uint32_t spf(std::uint64_t n) const { return spf_[n]; }
  bool is_prime(std::uint64_t n) const { return n >= 2 && n <= limit_ && spf_[n] == n; }
  // All primes <= limit in increasing order.
  const std::vector<std::uint32_t>& primes() const noexcept { return primes_; }

 private:
  std::uint64_t limit_ = 0;
  std::vector<std::uint32_t> spf_;
  std::vector<std::uint32_t> primes_;
};

// Plain Eratosthenes sieve; used for prime sums where no factorization is needed.
std::vector<std::uint64_t> primes_up_to(std::uint64_t limit,
                                        std::uint64_t cap = kDefaultSieveCap);

struct PrimePower {
  std::uint64_t prime = 0;
  std::uint32_t exponent = 0;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

struct Factorization {
  std::uint64_t n = 1;
  std::vector<PrimePower> pairs;  // primes strictly increasing

  std::size_t omega() const noexcept { return pairs.size(); }
  bool squarefree() const noexcept;
  std::uint64_t tau() const noexcept;
  // Largest / smallest prime factor, with P+(1) = 1 and P-(1) = 0 (stands for infinity).
  std::uint64_t largest_prime() const noexcept { return pairs.empty() ? 1 : pairs.back().prime; }
  std::uint64_t smallest_prime() const noexcept { return pairs.empty() ? 0 : pairs.front().prime; }
  // Product of p^e; used to check reconstruction.
  std::uint64_t reconstruct() const noexcept;

  friend bool operator==(const Factorization&, const Factorization&) = default;
};

// n = 0 -> DomainError, n > table.limit() -> RangeError; n = 1 gives no pairs.
Factorization factorize(std::uint64_t n, const SpfTable& table);
// Same as factorize but reuses the storage of `out`.
void factorize_into(std::uint64_t n, const SpfTable& table, Factorization& out);

// The sorted multiset {log d : d | n}. Each value is the sum of e_i * log p_i over
// the exponents of d, never log(d) of the assembled divisor.
struct DivLogs {
  std::vector<double> logs;

  std::size_t size() const noexcept { return logs.size(); }
  std::span<const double> view() const noexcept { return logs; }
  operator std::span<const double>() const noexcept { return logs; }
};

// Throws ResourceError if tau(n) exceeds `tau_cap`.
DivLogs divisor_logs(const Factorization& f, std::size_t tau_cap = kDefaultTauCap);
void divisor_logs_into(const Factorization& f, std::vector<double>& out,
                       std::size_t tau_cap = kDefaultTauCap);
// Divisor logs of a squarefree integer given only by its sorted prime list.
void divisor_logs_squarefree(std::span<const std::uint64_t> primes, std::vector<double>& out,
                             std::size_t tau_cap = kDefaultTauCap);

struct ArithStats {
  std::uint64_t tau = 1;
  std::uint64_t omega = 0;
  int mu_squared = 1;
  std::uint64_t big_omega = 0;

  friend bool operator==(const ArithStats&, const ArithStats&) = default;
};

ArithStats arith_stats(const Factorization& f) noexcept;

}  // namespace deltakit
