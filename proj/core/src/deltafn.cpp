#include "deltakit/deltafn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "deltakit/error.hpp"
#include "deltakit/summation.hpp"

namespace deltakit {

namespace {

bool is_small_integer(double q) { return q == std::floor(q) && q >= 0 && q <= 64; }

double level_pow(double level, double q, bool integral_q) {
  if (!integral_q) return std::pow(level, q);
  double r = 1.0;
  for (int k = static_cast<int>(q); k > 0; --k) r *= level;
  return r;
}

void check_pair_cap(std::size_t size, std::size_t cap, const char* who) {
  if (size > cap) {
    throw ResourceError(std::string(who) + ": tau(n) = " + std::to_string(size) +
                        " exceeds pair cap " + std::to_string(cap));
  }
}

// A sorted stream of positions logs[i] + offset, each contributing
// (df, dg) to two counters when passed.
struct EventStream {
  LogSpan logs;
  double offset;
  int df;
  int dg;
  std::size_t index = 0;

  bool done() const noexcept { return index >= logs.size(); }
  double position() const noexcept { return logs[index] + offset; }
};

// Integrates F(f(u), g(u)) du where f = Delta(n,u) and g = Delta(n,u - shift).
template <class F>
double sweep_pair(LogSpan logs, double shift, F&& integrand) {
  std::array<EventStream, 4> streams{{
      {logs, -1.0, +1, 0},
      {logs, 0.0, -1, 0},
      {logs, shift - 1.0, 0, +1},
      {logs, shift, 0, -1},
  }};
  CompensatedSum total;
  long f = 0;
  long g = 0;
  double prev = -std::numeric_limits<double>::infinity();
  for (;;) {
    double next = std::numeric_limits<double>::infinity();
    for (const auto& s : streams) {
      if (!s.done()) next = std::min(next, s.position());
    }
    if (next == std::numeric_limits<double>::infinity()) break;
    if (f > 0 || g > 0) total.add(integrand(static_cast<double>(f), static_cast<double>(g)) * (next - prev));
    for (auto& s : streams) {
      while (!s.done() && s.position() == next) {
        f += s.df;
        g += s.dg;
        ++s.index;
      }
    }
    prev = next;
  }
  return total.value();
}

}  // namespace

std::uint64_t delta_at(LogSpan logs, double u) {
  // Count of logs[i] > u minus count of logs[i] - 1 > u, using the same
  // floating expressions as the step-function sweep.
  const auto above_u = std::upper_bound(logs.begin(), logs.end(), u);
  const auto start_above =
      std::partition_point(logs.begin(), logs.end(), [u](double l) { return l - 1.0 <= u; });
  return static_cast<std::uint64_t>(start_above - above_u);
}

std::uint64_t delta_max(LogSpan logs) {
  std::uint64_t best = 0;
  std::size_t i = 0;
  for (std::size_t j = 0; j < logs.size(); ++j) {
    const double left = logs[j] - 1.0;
    while (logs[i] <= left) ++i;
    best = std::max<std::uint64_t>(best, j - i + 1);
  }
  return best;
}

std::uint32_t StepFn::max_level() const noexcept {
  return levels.empty() ? 0 : *std::max_element(levels.begin(), levels.end());
}

double StepFn::integral(double q) const {
  const bool integral_q = is_small_integer(q);
  CompensatedSum total;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    if (levels[k] == 0) continue;
    total.add(level_pow(levels[k], q, integral_q) * (breakpoints[k + 1] - breakpoints[k]));
  }
  return total.value();
}

std::uint32_t StepFn::at(double u) const {
  if (breakpoints.empty() || u < breakpoints.front() || u >= breakpoints.back()) return 0;
  const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), u);
  return levels[static_cast<std::size_t>(it - breakpoints.begin()) - 1];
}

StepFn build_step(LogSpan logs) {
  StepFn step;
  if (logs.empty()) return step;
  step.breakpoints.reserve(2 * logs.size());
  step.levels.reserve(2 * logs.size());
  std::size_t i = 0;  // next start event logs[i] - 1
  std::size_t j = 0;  // next end event logs[j]
  std::int64_t level = 0;
  while (j < logs.size()) {
    const double s = i < logs.size() ? logs[i] - 1.0 : std::numeric_limits<double>::infinity();
    const double e = logs[j];
    const double pos = std::min(s, e);
    while (i < logs.size() && logs[i] - 1.0 == pos) {
      ++level;
      ++i;
    }
    while (j < logs.size() && logs[j] == pos) {
      --level;
      ++j;
    }
    step.breakpoints.push_back(pos);
    step.levels.push_back(static_cast<std::uint32_t>(level));
  }
  // The level after the last breakpoint is 0 and is not stored.
  step.levels.pop_back();
  return step;
}

double m_q(LogSpan logs, double q) {
  if (!(q >= 1.0)) throw DomainError("m_q: q must be >= 1");
  const bool integral_q = is_small_integer(q);
  CompensatedSum total;
  std::size_t i = 0;
  std::size_t j = 0;
  std::int64_t level = 0;
  double prev = 0.0;
  while (j < logs.size()) {
    const double s = i < logs.size() ? logs[i] - 1.0 : std::numeric_limits<double>::infinity();
    const double pos = std::min(s, logs[j]);
    if (level > 0) total.add(level_pow(static_cast<double>(level), q, integral_q) * (pos - prev));
    while (i < logs.size() && logs[i] - 1.0 == pos) {
      ++level;
      ++i;
    }
    while (j < logs.size() && logs[j] == pos) {
      --level;
      ++j;
    }
    prev = pos;
  }
  return total.value();
}

double m2_pair_oracle(LogSpan logs, std::size_t cap) {
  check_pair_cap(logs.size(), cap, "m2_pair_oracle");
  CompensatedSum total;
  for (std::size_t a = 0; a < logs.size(); ++a) {
    total.add(1.0);
    for (std::size_t b = a + 1; b < logs.size(); ++b) {
      const double gap = logs[b] - logs[a];
      if (gap >= 1.0) break;  // sorted: later gaps are larger
      total.add(2.0 * (1.0 - gap));
    }
  }
  return total.value();
}

double n_jq(LogSpan logs, int j, int q, double v) {
  if (q < 1 || j < 1 || j > q) throw DomainError("n_jq: need 1 <= j <= q");
  if (!(v >= 1.0)) throw DomainError("n_jq: v must be >= 1");
  const int k = q - j;
  return sweep_pair(logs, std::log(v), [j, k](double f, double g) {
    return level_pow(f, j, true) * level_pow(g, k, true);
  });
}

double w_q(LogSpan logs, int q, double v) {
  if (q < 2) throw DomainError("w_q: q must be >= 2");
  CompensatedSum total;
  double binom = 1.0;
  for (int j = 1; j <= q / 2; ++j) {
    binom = binom * (q - j + 1) / j;
    total.add(binom * n_jq(logs, j, q, v));
  }
  return total.value();
}

double w_q_product_bound(LogSpan logs, int q, double v) {
  if (q < 2) throw DomainError("w_q_product_bound: q must be >= 2");
  if (!(v >= 1.0)) throw DomainError("w_q_product_bound: v must be >= 1");
  const double scale = std::ldexp(1.0, q - 1);
  return scale * sweep_pair(logs, std::log(v), [q](double f, double g) {
           return f * g * (level_pow(g, q - 2, true) + level_pow(f, q - 2, true));
         });
}

std::vector<double> logs_times_prime(LogSpan logs, std::uint64_t p) {
  const double lp = std::log(static_cast<double>(p));
  std::vector<double> out(logs.begin(), logs.end());
  out.reserve(2 * logs.size());
  for (const double l : logs) out.push_back(l + lp);
  std::inplace_merge(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(logs.size()),
                     out.end());
  return out;
}

std::complex<double> tau_theta(LogSpan logs, double theta) {
  CompensatedSum re;
  CompensatedSum im;
  for (const double l : logs) {
    re.add(std::cos(theta * l));
    im.add(std::sin(theta * l));
  }
  return {re.value(), im.value()};
}

double parseval_numerator(LogSpan logs, std::size_t cap) {
  check_pair_cap(logs.size(), cap, "parseval_ratio");
  CompensatedSum total;
  for (std::size_t a = 0; a < logs.size(); ++a) {
    total.add(1.0);
    for (std::size_t b = a + 1; b < logs.size(); ++b) {
      const double gap = logs[b] - logs[a];
      total.add(2.0 * std::sin(gap) / gap);
    }
  }
  return total.value();
}

double parseval_ratio(LogSpan logs, std::size_t cap) {
  const double numerator = parseval_numerator(logs, cap);
  return numerator / m_q(logs, 2.0);
}

}  // namespace deltakit
