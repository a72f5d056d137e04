#include "deltakit/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include "deltakit/error.hpp"
#include "deltakit/summation.hpp"

namespace deltakit {

namespace {

// Kronrod abscissae on [0, 1]; odd indices are the Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Interval& o) const { return error < o.error; }
};

Interval rule(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[static_cast<std::size_t>(j)];
    const double s = f(c - dx) + f(c + dx);
    kronrod += kWgk[static_cast<std::size_t>(j)] * s;
    if (j % 2 == 1) gauss += kWg[static_cast<std::size_t>(j / 2)] * s;
  }
  const double value = kronrod * h;
  const double error = std::fabs((kronrod - gauss) * h);
  return {a, b, value, error};
}

}  // namespace

QuadratureResult integrate_gk15(const std::function<double(double)>& f, double a, double b,
                                const QuadratureOptions& options, std::span<const double> breaks) {
  if (!(b >= a)) throw DomainError("integrate_gk15: need a <= b");
  QuadratureResult result;
  if (a == b) {
    result.converged = true;
    return result;
  }
  std::vector<double> edges{a};
  for (const double x : breaks) {
    if (x > edges.back() && x < b) edges.push_back(x);
  }
  edges.push_back(b);

  std::priority_queue<Interval> heap;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    heap.push(rule(f, edges[i], edges[i + 1]));
    result.evaluations += 15;
  }
  // Running totals drift under subtraction; they are recomputed exactly
  // before any convergence decision is accepted.
  auto exact_totals = [&heap]() {
    auto copy = heap;
    CompensatedSum v;
    CompensatedSum e;
    while (!copy.empty()) {
      v.add(copy.top().value);
      e.add(copy.top().error);
      copy.pop();
    }
    return std::pair{v.value(), e.value()};
  };
  auto [value, error] = exact_totals();
  for (;;) {
    const double tol = std::max(options.abs_tol, options.rel_tol * std::fabs(value));
    if (error <= tol) {
      std::tie(value, error) = exact_totals();
      if (error <= std::max(options.abs_tol, options.rel_tol * std::fabs(value))) {
        result.converged = true;
        break;
      }
    }
    if (heap.size() >= options.max_intervals) break;
    const Interval worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // interval at float resolution
    heap.pop();
    const Interval left = rule(f, worst.a, mid);
    const Interval right = rule(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    result.evaluations += 30;
  }
  if (!result.converged) std::tie(value, error) = exact_totals();
  result.value = value;
  result.abs_error = error;
  return result;
}

}  // namespace deltakit
