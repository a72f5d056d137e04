#include "deltakit/integrals.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "deltakit/error.hpp"
#include "deltakit/fit.hpp"
#include "deltakit/parallel.hpp"
#include "deltakit/quadrature.hpp"
#include "deltakit/sampler.hpp"
#include "deltakit/summation.hpp"
#include "deltakit/weights.hpp"
#include "deltakit/wforms.hpp"

namespace deltakit {

namespace {

constexpr int kMaxIntegralDim = 3;

struct FormTable {
  std::vector<std::array<int, kMaxIntegralDim>> coeffs;
  std::vector<double> weight;  // 2^{-|w|}
};

// The non-zero forms of W_t, folded in +-pairs (both members share |w(theta)|).
const FormTable& form_table(int t) {
  static const std::array<FormTable, kMaxIntegralDim + 1> tables = [] {
    std::array<FormTable, kMaxIntegralDim + 1> out;
    for (int d = 1; d <= kMaxIntegralDim; ++d) {
      for (const Form& w : enumerate_forms(d)) {
        if (w.is_zero() || !w.sign_normalized()) continue;
        std::array<int, kMaxIntegralDim> c{};
        for (int i = 0; i < d; ++i) c[static_cast<std::size_t>(i)] = w.coeffs[static_cast<std::size_t>(i)];
        out[static_cast<std::size_t>(d)].coeffs.push_back(c);
        out[static_cast<std::size_t>(d)].weight.push_back(2.0 * std::ldexp(1.0, -w.length()));
      }
    }
    return out;
  }();
  return tables[static_cast<std::size_t>(t)];
}

void check_args(int t, double z, double X) {
  if (t < 1 || t > kMaxIntegralDim) throw DomainError("I_tz: t must lie in [1, 3]");
  if (!(z > 0)) throw DomainError("I_tz: z must be positive");
  if (!(X > 0)) throw DomainError("I_tz: X must be positive");
}

// Unchecked integrand on raw coordinates.
double eval(int t, double z, double X, const double* theta) {
  const FormTable& table = form_table(t);
  double log_value = std::log1p(X);  // w = 0
  for (std::size_t k = 0; k < table.coeffs.size(); ++k) {
    double w = 0.0;
    for (int i = 0; i < t; ++i) w += table.coeffs[k][static_cast<std::size_t>(i)] * theta[i];
    log_value += table.weight[k] * std::log1p(X / (1.0 + std::fabs(w)));
  }
  return std::exp(z * log_value);
}

// Decade points inside (lo, hi).
std::vector<double> decade_breaks(double lo, double hi) {
  std::vector<double> out;
  for (double p = 1.0; p < hi; p *= 10.0) {
    if (p > lo) out.push_back(p);
  }
  return out;
}

[[noreturn]] void accuracy_failure(const char* who, double value, double rel) {
  throw AccuracyError(std::string(who) + ": error target missed (relative error " +
                          std::to_string(rel) + ")",
                      value, rel);
}

IntegralResult adaptive_1d(double z, double X, const IntegralOptions& options) {
  QuadratureOptions q;
  q.rel_tol = options.rel_tol_1d;
  q.max_intervals = 20000;
  const auto breaks = decade_breaks(0.0, X);
  const auto r = integrate_gk15([z, X](double th) { return eval(1, z, X, &th); }, 0.0, X, q, breaks);
  IntegralResult out{1, z, X, r.value, r.abs_error / std::fabs(r.value), IntegralMethod::kAdaptive,
                     r.evaluations};
  if (!r.converged) accuracy_failure("I_tz(t=1, adaptive)", out.value, out.error_estimate);
  return out;
}

// Integrates over theta_2 in [lo(theta_1), hi(theta_1)] and then theta_1 in
// [0, X]; the inner integrand is f(theta_1, theta_2).
template <class Bounds>
IntegralResult nested_2d(double z, double X, Bounds bounds, double scale,
                         const IntegralOptions& options, const char* who) {
  QuadratureOptions inner;
  inner.rel_tol = options.rel_tol_2d / 10.0;
  inner.max_intervals = 2000;
  QuadratureOptions outer;
  outer.rel_tol = options.rel_tol_2d / 2.0;
  outer.max_intervals = 4000;
  std::uint64_t evaluations = 0;
  double worst_inner = 0.0;
  bool inner_ok = true;
  auto slice = [&](double a) {
    const auto [lo, hi] = bounds(a);
    if (!(hi > lo)) return 0.0;
    // Ridges sit at the ends (theta_2 -> 0 and theta_2 -> theta_1) and the
    // integrand varies on a log scale away from them.
    std::vector<double> breaks;
    for (double p = 1.0; p < 0.5 * (hi - lo); p *= 10.0) {
      breaks.push_back(lo + p);
      breaks.push_back(hi - p);
    }
    breaks.push_back(0.5 * (lo + hi));
    std::sort(breaks.begin(), breaks.end());
    const auto r = integrate_gk15(
        [&](double b) {
          const std::array<double, 2> th{a, b};
          return eval(2, z, X, th.data());
        },
        lo, hi, inner, breaks);
    evaluations += r.evaluations;
    if (!r.converged) inner_ok = false;
    if (r.value != 0) worst_inner = std::max(worst_inner, r.abs_error / std::fabs(r.value));
    return r.value;
  };
  const auto breaks = decade_breaks(0.0, X);
  const auto r = integrate_gk15(slice, 0.0, X, outer, breaks);
  IntegralResult out{2,
                     z,
                     X,
                     scale * r.value,
                     r.abs_error / std::fabs(r.value) + worst_inner,
                     IntegralMethod::kAdaptive,
                     evaluations};
  if (!r.converged || !inner_ok || out.error_estimate > options.rel_tol_2d) {
    accuracy_failure(who, out.value, out.error_estimate);
  }
  return out;
}

IntegralResult adaptive_2d(double z, double X, const IntegralOptions& options) {
  // The integrand is symmetric under theta_1 <-> theta_2: integrate the
  // triangle theta_2 <= theta_1 and double.
  return nested_2d(
      z, X, [](double a) { return std::pair{0.0, a}; }, 2.0, options, "I_tz(t=2, adaptive)");
}

// Stratified Monte Carlo in u-coordinates theta_i = (1+X)^{u_i} - 1, which
// puts most samples at small |theta| where the integrand is largest. A pilot
// pass estimates per-stratum spread and the main pass allocates samples in
// proportion to it (Neyman), so ridge strata draw extra mass.
IntegralResult monte_carlo(int t, double z, double X, const IntegralOptions& options) {
  const int per_dim = t == 1 ? 64 : t == 2 ? 24 : 10;
  std::size_t cells = 1;
  for (int i = 0; i < t; ++i) cells *= static_cast<std::size_t>(per_dim);
  const double cell_volume = 1.0 / static_cast<double>(cells);
  const double log1pX = std::log1p(X);
  const std::uint64_t pilot = 32;

  auto sample_cell = [&](std::size_t cell, std::uint64_t stream, std::uint64_t n,
                         RunningStats& stats) {
    std::array<int, kMaxIntegralDim> idx{};
    std::size_t c = cell;
    for (int i = 0; i < t; ++i) {
      idx[static_cast<std::size_t>(i)] = static_cast<int>(c % static_cast<std::size_t>(per_dim));
      c /= static_cast<std::size_t>(per_dim);
    }
    SplitMix64 rng = SplitMix64::for_sample(options.mc_seed ^ (stream * 0x9e3779b97f4a7c15ULL), cell);
    std::array<double, kMaxIntegralDim> theta{};
    for (std::uint64_t s = 0; s < n; ++s) {
      double jac = 1.0;
      for (int i = 0; i < t; ++i) {
        const double u = (idx[static_cast<std::size_t>(i)] + (1.0 - rng.uniform())) / per_dim;
        theta[static_cast<std::size_t>(i)] = std::expm1(u * log1pX);
        jac *= log1pX * (1.0 + theta[static_cast<std::size_t>(i)]);
      }
      stats.add(eval(t, z, X, theta.data()) * jac);
    }
  };

  std::vector<RunningStats> stats(cells);
  const unsigned threads = resolve_threads(options.threads);
  parallel_for(cells, threads, [&](std::size_t c) { sample_cell(c, 0, pilot, stats[c]); });

  auto summarize = [&](double& value, double& rel) {
    CompensatedSum v;
    CompensatedSum var;
    for (const auto& s : stats) {
      v.add(cell_volume * s.mean());
      var.add(cell_volume * cell_volume * s.variance() / static_cast<double>(s.count()));
    }
    value = v.value();
    rel = std::sqrt(std::max(0.0, var.value())) / std::fabs(value);
  };
  double value = 0;
  double rel = 0;
  summarize(value, rel);
  std::uint64_t used = pilot * cells;

  // Samples per stratum for a relative standard error of half the target.
  CompensatedSum spread;
  for (const auto& s : stats) spread.add(cell_volume * std::sqrt(s.variance()));
  const double goal = 0.5 * options.rel_tol_mc * std::fabs(value);
  const double wanted = std::ceil(spread.value() * spread.value() / (goal * goal));
  const std::uint64_t budget = options.mc_max_samples > used ? options.mc_max_samples - used : 0;
  const double total = std::min(wanted, static_cast<double>(budget));
  if (rel > 0.5 * options.rel_tol_mc && total > 0) {
    std::vector<std::uint64_t> extra(cells);
    for (std::size_t c = 0; c < cells; ++c) {
      const double share = spread.value() > 0
                               ? cell_volume * std::sqrt(stats[c].variance()) / spread.value()
                               : cell_volume;
      extra[c] = static_cast<std::uint64_t>(std::ceil(total * share));
      used += extra[c];
    }
    parallel_for(cells, threads, [&](std::size_t c) {
      RunningStats more;
      sample_cell(c, 1, extra[c], more);
      stats[c].merge(more);
    });
    summarize(value, rel);
  }
  IntegralResult out{t, z, X, value, rel, IntegralMethod::kMonteCarlo, used};
  if (rel > options.rel_tol_mc) accuracy_failure("I_tz(monte-carlo)", value, rel);
  return out;
}

}  // namespace

double integrand(int t, double z, double X, std::span<const double> theta) {
  check_args(t, z, X);
  if (static_cast<int>(theta.size()) != t) throw DomainError("integrand: theta must have length t");
  for (const double x : theta) {
    if (!(x >= 0.0 && x <= X)) throw DomainError("integrand: theta must lie in [0, X]^t");
  }
  return eval(t, z, X, theta.data());
}

double I_t1_closed(double z, double X) {
  check_args(1, z, X);
  const double v_lo = 1.0 / (1.0 + X);
  const double v_hi = (1.0 + X) / (1.0 + 2.0 * X);
  const double log_lo = std::log(v_lo);
  const double log_hi = std::log(v_hi);
  // Every term (k+1)(v_hi^e - v_lo^e)/e is positive, so the sum has no cancellation.
  CompensatedSum sum;
  for (long k = 0; k < 100'000'000; ++k) {
    const double e = static_cast<double>(k + 1) - z;
    double term;
    if (e == 0.0) {
      term = static_cast<double>(k + 1) * (log_hi - log_lo);
    } else if (e > 0) {
      // v_hi^e (1 - (v_lo/v_hi)^e), scaled by the larger power so nothing underflows.
      term = static_cast<double>(k + 1) * std::exp(e * log_hi) *
             -std::expm1(-e * (log_hi - log_lo)) / e;
    } else {
      term = static_cast<double>(k + 1) * std::exp(e * log_lo) *
             std::expm1(e * (log_hi - log_lo)) / e;
    }
    sum.add(term);
    if (e > 0 && term <= 1e-18 * sum.value()) break;
  }
  return std::pow(1.0 + X, z) * X * sum.value();
}

IntegralResult I_tz(int t, double z, double X, IntegralMethod method,
                    const IntegralOptions& options) {
  check_args(t, z, X);
  switch (method) {
    case IntegralMethod::kClosed:
      if (t != 1) throw DomainError("I_tz: the closed reduction exists for t = 1 only");
      return {1, z, X, I_t1_closed(z, X), 1e-14, IntegralMethod::kClosed, 0};
    case IntegralMethod::kAdaptive:
      if (t == 1) return adaptive_1d(z, X, options);
      if (t == 2) return adaptive_2d(z, X, options);
      throw DomainError("I_tz: adaptive quadrature covers t <= 2; use monte-carlo for t = 3");
    case IntegralMethod::kMonteCarlo:
      return monte_carlo(t, z, X, options);
  }
  throw DomainError("I_tz: unknown method");
}

IntegralResult I_tz(int t, double z, double X, const IntegralOptions& options) {
  return I_tz(t, z, X, t <= 2 ? IntegralMethod::kAdaptive : IntegralMethod::kMonteCarlo, options);
}

IntegralResult cone_integral_t2(double z, double X, const IntegralOptions& options) {
  check_args(2, z, X);
  // Coordinates swapped relative to the cone statement: the outer variable
  // is theta_2 and the inner runs over [theta_2/8, theta_2/4].
  return nested_2d(
      z, X, [](double a) { return std::pair{a / 8.0, a / 4.0}; }, 1.0, options,
      "cone_integral_t2");
}

GrowthFit growth_fit(int t, double z, std::span<const double> X, std::span<const double> values) {
  if (X.size() != values.size()) throw DomainError("growth_fit: X and values differ in length");
  if (X.size() < 3) throw DomainError("growth_fit: need at least three points");
  std::vector<std::vector<double>> columns(3);
  std::vector<double> y;
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (!(X[i] > std::exp(1.0))) throw DomainError("growth_fit: X must exceed e");
    if (!(values[i] > 0)) throw DomainError("growth_fit: values must be positive");
    columns[0].push_back(std::log(X[i]));
    columns[1].push_back(std::log(std::log(X[i])));
    columns[2].push_back(1.0);
    y.push_back(std::log(values[i]));
  }
  const LinearFit lf = least_squares(columns, y);
  GrowthFit fit;
  fit.t = t;
  fit.z = z;
  fit.a = lf.coefficients[0];
  fit.b = lf.coefficients[1];
  fit.c = lf.coefficients[2];
  fit.a_target = std::ldexp(z, t);
  fit.delta = exponents(t, z).delta;
  return fit;
}

GrowthFit growth_fit(int t, double z, std::span<const double> X_list,
                     const IntegralOptions& options) {
  std::vector<double> values;
  values.reserve(X_list.size());
  for (const double x : X_list) values.push_back(I_tz(t, z, x, options).value);
  return growth_fit(t, z, X_list, values);
}

std::string to_string(IntegralMethod m) {
  switch (m) {
    case IntegralMethod::kClosed: return "closed-reduction";
    case IntegralMethod::kAdaptive: return "adaptive";
    case IntegralMethod::kMonteCarlo: return "monte-carlo";
  }
  return "unknown";
}

IntegralMethod parse_integral_method(const std::string& s) {
  if (s == "closed-reduction" || s == "closed") return IntegralMethod::kClosed;
  if (s == "adaptive") return IntegralMethod::kAdaptive;
  if (s == "monte-carlo" || s == "mc") return IntegralMethod::kMonteCarlo;
  throw DomainError("unknown integral method '" + s + "'");
}

}  // namespace deltakit
