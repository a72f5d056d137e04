#pragma once

// Weight families rho in M_z, the exponent system (beta, z_t, z_t^+, frak z_t,
// delta), the truncation machinery (frak b, f_T, E_T, E_T^{t,z}, H-sets), the
// theta_{q,T} sequences with their recursion constraints, and numeric checks of
// the prime-sum estimates.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "deltakit/deltafn.hpp"
#include "deltakit/factor.hpp"

namespace deltakit {

// A multiplicative weight, given by its values on primes. The standard instance
// is rho(p) = z, i.e. rho(n) = z^omega(n).
class WeightFamily {
 public:
  explicit WeightFamily(double z);
  WeightFamily(double z, std::function<double(std::uint64_t)> prime_rule);

  double z() const noexcept { return z_; }
  double at_prime(std::uint64_t p) const { return rule_ ? rule_(p) : z_; }
  // Product of rho(p) over the distinct primes of n; prime powers get rho(p).
  double at(const Factorization& f) const;
  bool is_standard() const noexcept { return !rule_; }

 private:
  double z_;
  std::function<double(std::uint64_t)> rule_;
};

struct ExponentSet {
  double t = 1;
  double z = 1;
  double beta = 0;       // 2^t z - t
  double z_t = 0;        // t / (2^t - 1)
  double z_t_plus = 0;   // t / (2^t - 2^{t/2})
  double frak_z_t = 0;   // 2^{ceil t - t} ceil(t) / (2^{ceil t} - 1)
  int delta = 0;         // 1 iff z == z_t
};

// t > 0, z > 0 (DomainError otherwise). For integral t the comparison z == z_t
// is exact against the correctly rounded ratio t / (2^t - 1); otherwise it uses
// a 1e-12 relative tolerance.
ExponentSet exponents(double t, double z);

// How to read the denominator of frak b: 2^t * z * log 2 - 1 (default) or the
// alternative typographic reading 2^{t z} log 2 - 1.
enum class FrakBReading { kProduct, kPower };

struct TruncationParams {
  double T = 3;
  double t = 1;
  double z = 1;
  double frak_c = 0.01;
  FrakBReading reading = FrakBReading::kProduct;

  // 1 / (2^t z log 2 - 1); DomainError if the denominator is not positive.
  double frak_b() const;
};

// c * min(log(T log 3y), (log log 3y - b log T)^2 / log T); y >= 1, T >= 2.
double f_T(double y, const TruncationParams& params);

enum class EVariant { kPlain, kTz };

// Membership of a squarefree integer, given by its increasing prime list, in
// E_T (plain) or E_T^{t,z} (tz). Checks 2^i <= e^{-f_T(p_i)} T log(3 p_i) at
// every prime factor p_i (the closure of each constancy interval (p_i, p_{i+1}]).
bool mem_E_T(std::span<const std::uint64_t> primes, EVariant variant,
             const TruncationParams& params);
// False for non-squarefree n.
bool mem_E_T(const Factorization& f, EVariant variant, const TruncationParams& params);

enum class ThetaVariant { kA, kB };

// theta_{q,T}: theta_0 = theta_1 = 1 and, for q >= 2,
//   A: (q!/2)   K^{q-1},  B: (q!/q^2) K^{q-1},
// with K = (2/3) pi^2 C_0 T (log T)^delta.
class ThetaSequence {
 public:
  ThetaSequence(double T, int delta, double c0, ThetaVariant variant);

  double T() const noexcept { return T_; }
  int delta() const noexcept { return delta_; }
  double c0() const noexcept { return c0_; }
  ThetaVariant variant() const noexcept { return variant_; }

  double log_value(int q) const;
  // exp(log_value(q)); may be +inf for large q.
  double value(int q) const;

 private:
  double T_;
  int delta_;
  double c0_;
  ThetaVariant variant_;
};

// Membership in the H-set of level q: E_T membership (plain for the q-moment
// set, tz for the weighted set) and M_j(n) <= tau(n) theta_{j,T} for
// 1 <= j <= q. The log power of the sequence plays the role of gamma.
// params.T must equal seq.T() (DomainError otherwise).
bool mem_H(std::span<const std::uint64_t> primes, LogSpan logs, int q, const ThetaSequence& seq,
           EVariant variant, const TruncationParams& params);
bool mem_H(const Factorization& f, LogSpan logs, int q, const ThetaSequence& seq,
           EVariant variant, const TruncationParams& params);

struct RecursionRow {
  int q = 0;
  // sum_{1<=j<=q/2} binom(q,j) theta_j theta_{q-j}, in log space
  double log_lhs = 0;
  // theta_q / (C_0 T (log T)^{delta/2}), in log space
  double log_rhs = 0;
  bool pass_sum = false;   // log_lhs <= log_rhs
  // theta_q >= (q!/q^2) C_0^{q-1} T^{q-1} (log T)^{delta (q-1)}
  double log_floor = 0;
  bool pass_floor = false;
};

struct RecursionReport {
  double T = 0;
  int delta = 0;
  double c0 = 0;
  ThetaVariant variant = ThetaVariant::kA;
  std::vector<RecursionRow> rows;  // q = 3..q_max
  std::optional<int> first_fail_sum;
  std::optional<int> first_fail_floor;
  bool all_pass() const noexcept { return !first_fail_sum && !first_fail_floor; }
};

// Evaluates both sequence constraints for 3 <= q <= q_max in log space. A
// reporter only: it states where each constraint holds.
RecursionReport check_recursion(int q_max, double T, int delta, double c0, ThetaVariant variant);

struct ChebyshevCheck {
  double lhs = 0;  // sum_{p<=y} rho(p) log p
  double rhs = 0;  // z y
  double rel_err = 0;
};
ChebyshevCheck chebyshev_check(double y, const WeightFamily& w);

struct MertensCheck {
  double product = 1;  // prod_{p<x} (1 + rho(p)/p)
  double ratio = 1;    // product / (log x)^z
};
MertensCheck mertens_product(double x, const WeightFamily& w);

struct CosSumCheck {
  double lhs = 0;    // sum_{p<=y} rho(p) cos(psi log p) / p
  double model = 0;  // z log(log y / (1 + psi log y))
  double abs_diff = 0;
};
CosSumCheck cos_sum(double y, double psi, const WeightFamily& w);

std::string to_string(EVariant v);
std::string to_string(ThetaVariant v);
ThetaVariant parse_theta_variant(const std::string& s);

}  // namespace deltakit
