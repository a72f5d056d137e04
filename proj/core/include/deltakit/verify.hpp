#pragma once

// Machine checks of the identities and inequalities satisfied by Delta and
// M_q. Each check scans a range or a random sample and reports the number
// of violations, the worst excess lhs - rhs, and the first counterexample.

#include <cstdint>
#include <string>
#include <vector>

namespace deltakit {

struct CheckResult {
  std::string name;
  std::string statement;
  std::uint64_t checked = 0;
  std::uint64_t violations = 0;
  double worst_excess = -1e300;  // max of lhs - rhs (or error - tolerance)
  std::string counterexample;    // first violation, empty if none
  bool informational = false;    // reported but never gating

  bool passed() const noexcept { return violations == 0; }
};

struct VerifyOptions {
  unsigned threads = 1;
  std::uint64_t seed = 1;
  double slack = 1e-9;  // additive slack for inequalities
};

// |M_1(n) - tau(n)| <= 1e-8 tau(n) for n <= x_max.
CheckResult check_m1_tau(std::uint64_t x_max, const VerifyOptions& options = {});
// Step-function M_2 against the pair-overlap oracle, 1e-9 relative.
CheckResult check_m2_oracle(std::uint64_t x_max, const VerifyOptions& options = {});
// Delta(n) >= max(1, tau(n) / (1 + log n)).
CheckResult check_delta_lower_bound(std::uint64_t x_max, const VerifyOptions& options = {});
// Delta(n) <= 2 M_q(n)^{1/q} for q_lo <= q <= q_hi.
CheckResult check_delta_moment_bound(std::uint64_t x_max, int q_lo, int q_hi,
                                     const VerifyOptions& options = {});
// Delta(n)^2 <= 4 M_2(a) M_2(b) over every coprime split ab = n, n squarefree.
CheckResult check_coprime_splits(std::uint64_t x_max, const VerifyOptions& options = {});

// The n -> np links for random triples (n <= n_max, prime p <= p_max, p not
// dividing n, q in {q_lo..q_hi}). One result per link, in a fixed order.
std::vector<CheckResult> check_prime_extension(std::uint64_t triples, std::uint64_t n_max,
                                               std::uint64_t p_max, int q_lo, int q_hi,
                                               const VerifyOptions& options = {});

struct ParsevalBand {
  std::uint64_t x_max = 0;
  double min_ratio = 0;
  double max_ratio = 0;
  std::uint64_t argmin = 0;
  std::uint64_t argmax = 0;
};
// Empirical range of (int_0^1 |tau(n,theta)|^2) / M_2(n) over 1 <= n <= x_max.
ParsevalBand parseval_band(std::uint64_t x_max, const VerifyOptions& options = {});

// Named suites for the command line: "ineq", "identities", "weights", "all".
std::vector<CheckResult> run_suite(const std::string& suite, std::uint64_t x_max,
                                   const VerifyOptions& options = {});

}  // namespace deltakit
