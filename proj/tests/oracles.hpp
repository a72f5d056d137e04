#pragma once

// Independent reference implementations. Nothing here calls into the library:
// divisors come from trial division or a divisor-list sieve, logs from
// std::log of the assembled integer, and window counts from direct scans.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace oracle {

inline std::vector<std::uint64_t> divisors(std::uint64_t n) {
  std::vector<std::uint64_t> small;
  std::vector<std::uint64_t> large;
  for (std::uint64_t d = 1; d * d <= n; ++d) {
    if (n % d != 0) continue;
    small.push_back(d);
    if (d != n / d) large.push_back(n / d);
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}

inline std::vector<std::pair<std::uint64_t, std::uint32_t>> trial_factor(std::uint64_t n) {
  std::vector<std::pair<std::uint64_t, std::uint32_t>> out;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    std::uint32_t e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

inline std::vector<double> logs_of(const std::vector<std::uint64_t>& divs) {
  std::vector<double> out;
  out.reserve(divs.size());
  for (const auto d : divs) out.push_back(std::log(static_cast<double>(d)));
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<double> divisor_logs(std::uint64_t n) { return logs_of(divisors(n)); }

// Divisor lists for lo <= n <= hi, by marking multiples.
inline std::vector<std::vector<std::uint32_t>> divisor_sieve(std::uint64_t lo, std::uint64_t hi) {
  std::vector<std::vector<std::uint32_t>> out(hi - lo + 1);
  for (std::uint64_t d = 1; d <= hi; ++d) {
    std::uint64_t m = ((lo + d - 1) / d) * d;
    for (; m <= hi; m += d) out[m - lo].push_back(static_cast<std::uint32_t>(d));
  }
  return out;
}

// Max over anchors d of #{d' : d/e < d' <= d}: the window (u, u+1] with its
// closed right end at log d.
inline std::uint64_t delta_anchored(const std::vector<double>& logs) {
  std::uint64_t best = 0;
  for (const double a : logs) {
    std::uint64_t count = 0;
    for (const double b : logs) {
      if (b <= a && b > a - 1.0) ++count;
    }
    best = std::max(best, count);
  }
  return best;
}

inline std::uint64_t delta_at(const std::vector<double>& logs, double u) {
  std::uint64_t c = 0;
  for (const double l : logs) {
    if (u < l && l <= u + 1.0) ++c;
  }
  return c;
}

// int F(Delta(u), Delta(u - shift)) du by midpoint evaluation between all
// breakpoints; exact because both factors are piecewise constant.
inline double pair_integral(const std::vector<double>& logs, double shift,
                            const std::function<double(double, double)>& F) {
  std::vector<double> pts;
  for (const double l : logs) {
    pts.push_back(l - 1.0);
    pts.push_back(l);
    pts.push_back(l - 1.0 + shift);
    pts.push_back(l + shift);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  long double total = 0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double mid = 0.5 * (pts[i] + pts[i + 1]);
    const double f = static_cast<double>(delta_at(logs, mid));
    const double g = static_cast<double>(delta_at(logs, mid - shift));
    total += static_cast<long double>(F(f, g)) * (pts[i + 1] - pts[i]);
  }
  return static_cast<double>(total);
}

inline double m_q(const std::vector<double>& logs, double q) {
  return pair_integral(logs, 0.0, [q](double f, double) { return std::pow(f, q); });
}

inline double n_jq(const std::vector<double>& logs, int j, int q, double v) {
  return pair_integral(logs, std::log(v),
                       [j, q](double f, double g) { return std::pow(f, j) * std::pow(g, q - j); });
}

inline double binom(int n, int k) {
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

inline double w_q(const std::vector<double>& logs, int q, double v) {
  double s = 0;
  for (int j = 1; j <= q / 2; ++j) s += binom(q, j) * n_jq(logs, j, q, v);
  return s;
}

// I_{1,z}(X) by boost Gauss-Kronrod directly on the product of the three
// factors w = 0 and w = +-e_1.
inline double I_t1(double z, double X) {
  auto f = [z, X](double s) {
    return std::pow(1.0 + X, z) * std::pow(1.0 + X / (1.0 + s), z);
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, X, 15, 1e-13);
}

// log theta_q for the two sequence variants, straight from factorials.
inline long double log_theta(int q, double T, int delta, double c0, bool variant_a) {
  if (q <= 1) return 0.0L;
  const long double pi = 3.141592653589793238462643383279502884L;
  const long double K = (2.0L / 3.0L) * pi * pi * c0 * T * std::pow(std::log((long double)T), delta);
  long double log_fact = std::lgamma(static_cast<long double>(q) + 1.0L);
  const long double norm = variant_a ? std::log(2.0L) : 2.0L * std::log((long double)q);
  return log_fact - norm + (q - 1) * std::log(K);
}

// log of sum_{1<=j<=q/2} binom(q,j) theta_j theta_{q-j}, via log-sum-exp.
inline long double log_recursion_lhs(int q, double T, int delta, double c0, bool variant_a) {
  std::vector<long double> terms;
  for (int j = 1; 2 * j <= q; ++j) {
    const long double lb = std::lgamma((long double)q + 1) - std::lgamma((long double)j + 1) -
                           std::lgamma((long double)(q - j) + 1);
    terms.push_back(lb + log_theta(j, T, delta, c0, variant_a) +
                    log_theta(q - j, T, delta, c0, variant_a));
  }
  const long double m = *std::max_element(terms.begin(), terms.end());
  long double s = 0;
  for (const auto t : terms) s += std::exp(t - m);
  return m + std::log(s);
}

}  // namespace oracle
