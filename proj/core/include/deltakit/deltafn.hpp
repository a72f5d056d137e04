#pragma once

// Exact evaluation of the window count Delta(n,u), its maximum Delta(n), the
// moments M_q(n) = int Delta(n,u)^q du, the shifted products N_{j,q}, W_q, and
// the twisted divisor sum tau(n, theta).
//
// Every function takes the sorted divisor-log list of n (see factor.hpp).
// Convention: divisor d is counted at u iff u < log d <= u + 1, i.e. on the
// half-open interval [log d - 1, log d). No epsilon is used anywhere: distinct
// divisors cannot sit exactly one unit apart in log scale.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace deltakit {

using LogSpan = std::span<const double>;

inline constexpr std::size_t kPairOracleCap = 10'000;

// #{i : logs[i] - 1 <= u < logs[i]}, by binary search.
std::uint64_t delta_at(LogSpan logs, double u);

// max_u Delta(n,u) via a two-pointer sweep; the maximum is attained with the
// window's closed right end at some log d.
std::uint64_t delta_max(LogSpan logs);

// Piecewise-constant u -> Delta(n,u). levels[k] holds on
// [breakpoints[k], breakpoints[k+1]); the function is 0 outside.
struct StepFn {
  std::vector<double> breakpoints;
  std::vector<std::uint32_t> levels;  // size = breakpoints.size() - 1 (or 0)

  std::uint32_t max_level() const noexcept;
  // Sum of level^q * length.
  double integral(double q = 1.0) const;
  // Level at u (0 outside the support).
  std::uint32_t at(double u) const;
};

StepFn build_step(LogSpan logs);

// M_q(n) for real q >= 1 (DomainError otherwise). Streams the event sweep
// without materialising the step function.
double m_q(LogSpan logs, double q);

// Sum over ordered divisor pairs of max(0, 1 - |log d - log d'|); equals M_2(n).
// ResourceError when tau(n) > cap.
double m2_pair_oracle(LogSpan logs, std::size_t cap = kPairOracleCap);

// N_{j,q}(n,v) = int Delta(n,u)^j Delta(n,u - log v)^(q-j) du, 1 <= j <= q, v >= 1.
double n_jq(LogSpan logs, int j, int q, double v);

// W_q(n,v) = sum_{1<=j<=q/2} binom(q,j) N_{j,q}(n,v), q >= 2.
double w_q(LogSpan logs, int q, double v);

// Right-hand side of the W_q bound:
// 2^{q-1} int Delta(u) Delta(u - log v) {Delta(u - log v)^{q-2} + Delta(u)^{q-2}} du.
double w_q_product_bound(LogSpan logs, int q, double v);

// Moments of the merged divisor set of n*p (p prime, p not dividing n) built
// from the logs of n: log(np) divisors = logs ∪ (logs + log p).
std::vector<double> logs_times_prime(LogSpan logs, std::uint64_t p);

// tau(n, theta) = sum_{d|n} d^{i theta}.
std::complex<double> tau_theta(LogSpan logs, double theta);

// (int_0^1 |tau(n,theta)|^2 dtheta) / M_2(n), numerator in closed form
// sum_{d,d'} sinc(log d - log d') with sinc(0) = 1. ResourceError past cap.
double parseval_ratio(LogSpan logs, std::size_t cap = kPairOracleCap);

// The closed-form numerator on its own.
double parseval_numerator(LogSpan logs, std::size_t cap = kPairOracleCap);

}  // namespace deltakit
