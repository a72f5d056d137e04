#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace deltakit {

struct QuadratureResult {
  double value = 0;
  double abs_error = 0;
  std::size_t evaluations = 0;
  bool converged = false;
};

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0;
  std::size_t max_intervals = 4000;
};

// Globally adaptive 7/15-point Gauss-Kronrod on [a, b]. The interval with the
// largest error estimate is bisected until the total estimate meets
// max(abs_tol, rel_tol |value|) or the interval budget is spent. `breaks`
// (sorted, inside (a, b)) seed the initial partition.
QuadratureResult integrate_gk15(const std::function<double(double)>& f, double a, double b,
                                const QuadratureOptions& options = {},
                                std::span<const double> breaks = {});

}  // namespace deltakit
