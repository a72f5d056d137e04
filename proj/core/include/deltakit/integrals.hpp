#pragma once

// The integral I_{t,z}(X) = int_{[0,X]^t} prod_{w in W_t} (1 + X/(1+|w(theta)|))^{z/2^|w|}
// for t <= 3, its growth fit, and the t = 2 lower-bound cone.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace deltakit {

enum class IntegralMethod { kClosed, kAdaptive, kMonteCarlo };

struct IntegralResult {
  int t = 1;
  double z = 1;
  double X = 1;
  double value = 0;
  double error_estimate = 0;  // relative
  IntegralMethod method = IntegralMethod::kAdaptive;
  std::uint64_t evaluations = 0;
};

struct IntegralOptions {
  // Relative error targets; defaults follow the per-dimension budgets.
  double rel_tol_1d = 1e-10;
  double rel_tol_2d = 1e-3;
  double rel_tol_mc = 0.05;
  std::uint64_t mc_seed = 1;
  std::uint64_t mc_max_samples = 20'000'000;
  unsigned threads = 1;
};

// Including the w = 0 factor (1 + X)^z. Requires 1 <= t <= 3 and theta in [0, X]^t.
double integrand(int t, double z, double X, std::span<const double> theta);

// t = 1 in closed form: with v = s/(s+X) the integral becomes
// (1+X)^z X sum_k (k+1) int v^{k-z} dv over [1/(1+X), (1+X)/(1+2X)].
double I_t1_closed(double z, double X);

// Default method by dimension: adaptive for t <= 2, Monte Carlo for t = 3.
// AccuracyError (carrying the best estimate) when the target is missed.
IntegralResult I_tz(int t, double z, double X, IntegralMethod method,
                    const IntegralOptions& options = {});
IntegralResult I_tz(int t, double z, double X, const IntegralOptions& options = {});

// t = 2 integral restricted to the cone theta_2 / 8 <= theta_1 <= theta_2 / 4.
IntegralResult cone_integral_t2(double z, double X, const IntegralOptions& options = {});

struct GrowthFit {
  int t = 1;
  double z = 1;
  double a = 0;        // exponent of X
  double b = 0;        // exponent of log X
  double c = 0;        // constant
  double a_target = 0; // 2^t z
  int delta = 0;       // b_target
  double a_gap() const noexcept { return a - a_target; }
  double b_gap() const noexcept { return b - delta; }
};

// Least squares for log I = a log X + b log log X + c. Needs at least three
// points with X > e; NumericalError when the design is rank deficient.
GrowthFit growth_fit(int t, double z, std::span<const double> X, std::span<const double> values);
// Evaluates I_tz on X_list and fits.
GrowthFit growth_fit(int t, double z, std::span<const double> X_list,
                     const IntegralOptions& options = {});

std::string to_string(IntegralMethod m);
IntegralMethod parse_integral_method(const std::string& s);

}  // namespace deltakit
