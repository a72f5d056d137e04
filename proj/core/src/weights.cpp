#include "deltakit/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "deltakit/error.hpp"
#include "deltakit/summation.hpp"

namespace deltakit {

namespace {

double log_sum_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double log_factorial(int q) { return std::lgamma(static_cast<double>(q) + 1.0); }

double log_binom(int q, int j) { return log_factorial(q) - log_factorial(j) - log_factorial(q - j); }

std::vector<std::uint64_t> primes_at_most(double y) {
  return primes_up_to(static_cast<std::uint64_t>(std::floor(y)));
}

}  // namespace

WeightFamily::WeightFamily(double z) : z_(z) {
  if (!(z > 0)) throw DomainError("WeightFamily: z must be positive");
}

WeightFamily::WeightFamily(double z, std::function<double(std::uint64_t)> prime_rule)
    : z_(z), rule_(std::move(prime_rule)) {
  if (!(z > 0)) throw DomainError("WeightFamily: z must be positive");
}

double WeightFamily::at(const Factorization& f) const {
  double r = 1.0;
  for (const auto& pp : f.pairs) r *= at_prime(pp.prime);
  return r;
}

ExponentSet exponents(double t, double z) {
  if (!(z > 0)) throw DomainError("exponents: z must be positive");
  if (!(t > 0)) throw DomainError("exponents: t must be positive");
  ExponentSet e;
  e.t = t;
  e.z = z;
  const double two_t = std::exp2(t);
  e.beta = two_t * z - t;
  e.z_t = t / (two_t - 1.0);
  e.z_t_plus = t / (two_t - std::exp2(t / 2.0));
  const double k = std::ceil(t);
  e.frak_z_t = std::exp2(k - t) * k / (std::exp2(k) - 1.0);
  if (t == std::floor(t)) {
    e.delta = (z == e.z_t) ? 1 : 0;
  } else {
    e.delta = std::fabs(z - e.z_t) <= 1e-12 * e.z_t ? 1 : 0;
  }
  return e;
}

double TruncationParams::frak_b() const {
  const double base = reading == FrakBReading::kProduct ? std::exp2(t) * z : std::exp2(t * z);
  const double denom = base * std::numbers::ln2 - 1.0;
  if (!(denom > 0)) {
    throw DomainError("frak_b: requires 2^t z log 2 > 1 for the chosen reading");
  }
  return 1.0 / denom;
}

double f_T(double y, const TruncationParams& params) {
  if (!(y >= 1.0)) throw DomainError("f_T: y must be >= 1");
  if (!(params.T >= 2.0)) throw DomainError("f_T: T must be >= 2");
  if (!(params.frak_c > 0)) throw DomainError("f_T: frak_c must be positive");
  const double log_T = std::log(params.T);
  const double l3y = std::log(3.0 * y);
  const double first = std::log(params.T * l3y);
  const double gap = std::log(l3y) - params.frak_b() * log_T;
  const double second = gap * gap / log_T;
  return params.frak_c * std::min(first, second);
}

bool mem_E_T(std::span<const std::uint64_t> primes, EVariant variant,
             const TruncationParams& params) {
  for (std::size_t i = 1; i <= primes.size(); ++i) {
    const double y = static_cast<double>(primes[i - 1]);
    double bound = params.T * std::log(3.0 * y);
    if (variant == EVariant::kTz) bound *= std::exp(-f_T(y, params));
    if (std::ldexp(1.0, static_cast<int>(i)) > bound) return false;
  }
  return true;
}

bool mem_E_T(const Factorization& f, EVariant variant, const TruncationParams& params) {
  if (!f.squarefree()) return false;
  std::vector<std::uint64_t> primes;
  primes.reserve(f.pairs.size());
  for (const auto& pp : f.pairs) primes.push_back(pp.prime);
  return mem_E_T(primes, variant, params);
}

ThetaSequence::ThetaSequence(double T, int delta, double c0, ThetaVariant variant)
    : T_(T), delta_(delta), c0_(c0), variant_(variant) {
  if (!(T > 1.0)) throw DomainError("ThetaSequence: T must exceed 1");
  if (!(c0 > 0)) throw DomainError("ThetaSequence: C_0 must be positive");
  if (delta != 0 && delta != 1) throw DomainError("ThetaSequence: delta must be 0 or 1");
}

double ThetaSequence::log_value(int q) const {
  if (q < 0) throw DomainError("ThetaSequence: q must be non-negative");
  if (q <= 1) return 0.0;
  const double log_T = std::log(T_);
  const double log_K = std::log(2.0 / 3.0 * std::numbers::pi * std::numbers::pi * c0_) + log_T +
                       delta_ * std::log(log_T);
  const double prefactor = variant_ == ThetaVariant::kA
                               ? log_factorial(q) - std::numbers::ln2
                               : log_factorial(q) - 2.0 * std::log(static_cast<double>(q));
  return prefactor + (q - 1) * log_K;
}

double ThetaSequence::value(int q) const { return std::exp(log_value(q)); }

bool mem_H(std::span<const std::uint64_t> primes, LogSpan logs, int q, const ThetaSequence& seq,
           EVariant variant, const TruncationParams& params) {
  if (q < 0) throw DomainError("mem_H: q must be non-negative");
  if (params.T != seq.T()) throw DomainError("mem_H: truncation T and sequence T differ");
  if (!mem_E_T(primes, variant, params)) return false;
  const double tau = static_cast<double>(logs.size());
  // j = 1 is vacuous (M_1 = tau, theta_1 = 1) and skipped.
  for (int j = 2; j <= q; ++j) {
    if (m_q(logs, j) > tau * seq.value(j)) return false;
  }
  return true;
}

bool mem_H(const Factorization& f, LogSpan logs, int q, const ThetaSequence& seq,
           EVariant variant, const TruncationParams& params) {
  if (!f.squarefree()) return false;
  std::vector<std::uint64_t> primes;
  for (const auto& pp : f.pairs) primes.push_back(pp.prime);
  return mem_H(primes, logs, q, seq, variant, params);
}

RecursionReport check_recursion(int q_max, double T, int delta, double c0,
                                ThetaVariant variant) {
  if (q_max < 3) throw DomainError("check_recursion: q_max must be >= 3");
  if (!(T >= 3.0)) throw DomainError("check_recursion: T must be >= 3");
  const ThetaSequence seq(T, delta, c0, variant);
  RecursionReport report;
  report.T = T;
  report.delta = delta;
  report.c0 = c0;
  report.variant = variant;

  const double log_T = std::log(T);
  const double log_log_T = std::log(log_T);
  const double log_floor_step = std::log(c0) + log_T + delta * log_log_T;

  for (int q = 3; q <= q_max; ++q) {
    RecursionRow row;
    row.q = q;
    row.log_lhs = -std::numeric_limits<double>::infinity();
    for (int j = 1; j <= q / 2; ++j) {
      row.log_lhs = log_sum_exp(row.log_lhs, log_binom(q, j) + seq.log_value(j) +
                                                 seq.log_value(q - j));
    }
    row.log_rhs = seq.log_value(q) - std::log(c0) - log_T - 0.5 * delta * log_log_T;
    row.pass_sum = row.log_lhs <= row.log_rhs;
    row.log_floor = log_factorial(q) - 2.0 * std::log(static_cast<double>(q)) +
                    (q - 1) * log_floor_step;
    row.pass_floor = seq.log_value(q) >= row.log_floor;
    if (!row.pass_sum && !report.first_fail_sum) report.first_fail_sum = q;
    if (!row.pass_floor && !report.first_fail_floor) report.first_fail_floor = q;
    report.rows.push_back(row);
  }
  // The floor constraint starts at j = 2.
  const double floor2 = log_factorial(2) - 2.0 * std::log(2.0) + log_floor_step;
  if (seq.log_value(2) < floor2) report.first_fail_floor = 2;
  return report;
}

ChebyshevCheck chebyshev_check(double y, const WeightFamily& w) {
  if (!(y >= 2.0)) throw DomainError("chebyshev_check: y must be >= 2");
  CompensatedSum sum;
  for (const std::uint64_t p : primes_at_most(y)) {
    sum.add(w.at_prime(p) * std::log(static_cast<double>(p)));
  }
  ChebyshevCheck c;
  c.lhs = sum.value();
  c.rhs = w.z() * y;
  c.rel_err = std::fabs(c.lhs - c.rhs) / c.rhs;
  return c;
}

MertensCheck mertens_product(double x, const WeightFamily& w) {
  if (!(x >= 2.0)) throw DomainError("mertens_product: x must be >= 2");
  // Accumulate the log of the product.
  CompensatedSum log_product;
  for (const std::uint64_t p : primes_at_most(std::ceil(x) - 1.0)) {
    if (static_cast<double>(p) >= x) break;
    log_product.add(std::log1p(w.at_prime(p) / static_cast<double>(p)));
  }
  MertensCheck m;
  m.product = std::exp(log_product.value());
  m.ratio = m.product / std::pow(std::log(x), w.z());
  return m;
}

CosSumCheck cos_sum(double y, double psi, const WeightFamily& w) {
  if (!(y >= 2.0)) throw DomainError("cos_sum: y must be >= 2");
  if (!(psi >= 0.0 && psi <= 1.0)) throw DomainError("cos_sum: psi must lie in [0, 1]");
  CompensatedSum sum;
  for (const std::uint64_t p : primes_at_most(y)) {
    const double pd = static_cast<double>(p);
    sum.add(w.at_prime(p) * std::cos(psi * std::log(pd)) / pd);
  }
  CosSumCheck c;
  c.lhs = sum.value();
  const double log_y = std::log(y);
  c.model = w.z() * std::log(log_y / (1.0 + psi * log_y));
  c.abs_diff = std::fabs(c.lhs - c.model);
  return c;
}

std::string to_string(EVariant v) { return v == EVariant::kPlain ? "plain" : "tz"; }

std::string to_string(ThetaVariant v) { return v == ThetaVariant::kA ? "A" : "B"; }

ThetaVariant parse_theta_variant(const std::string& s) {
  if (s == "A" || s == "a") return ThetaVariant::kA;
  if (s == "B" || s == "b") return ThetaVariant::kB;
  throw DomainError("unknown theta variant '" + s + "' (expected A or B)");
}

}  // namespace deltakit
