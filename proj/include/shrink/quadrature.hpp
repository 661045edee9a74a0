#pragma once

#include <cmath>
#include <cstddef>
#include <queue>
#include <stdexcept>
#include <vector>

namespace shrink {

/// Result of an adaptive quadrature: integral value and an error estimate.
struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

namespace detail {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1] (positive half; the rule is
// symmetric).  Even indices are the embedded Gauss-7 points.
inline constexpr double kGk15Nodes[8] = {
    0.991455371120812639206854697526329,  //
    0.949107912342758524526189684047851,  //
    0.864864423359769072789712788640926,  //
    0.741531185599394439863864773280788,  //
    0.586087235467691130294144838258730,  //
    0.405845151377397166906606412076961,  //
    0.207784955007898467600689403773245,  //
    0.0};

inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970,  //
    0.063092092629978553290700663189204,  //
    0.104790010322250183839876322541518,  //
    0.140653259715525918745189590510238,  //
    0.169004726639267902826583426598550,  //
    0.190350578064785409913256402421014,  //
    0.204432940075298892414161999234649,  //
    0.209482141084727828012999174891714};

inline constexpr double kGauss7Weights[4] = {
    0.129484966168869693270611432679082,  //
    0.279705391489276667901467771423780,  //
    0.381830050505118944950369775488975,  //
    0.417959183673469387755102040816327};

template <class F>
QuadResult gk15(const F& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double kronrod = 0.0;
  double gauss = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double dx = half * kGk15Nodes[i];
    const double fsum = (i == 7) ? f(mid) : f(mid - dx) + f(mid + dx);
    kronrod += kKronrodWeights[i] * fsum;
    if (i % 2 == 1) gauss += kGauss7Weights[i / 2] * fsum;  // odd indices: Gauss-7 nodes
  }
  kronrod *= half;
  gauss *= half;
  return {kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod 7/15 integration of f over [a, b].
/// Bisects the interval with the largest error estimate until the summed
/// error estimate is below max(abs_tol, rel_tol * |integral|).
template <class F>
QuadResult integrate_adaptive(const F& f, double a, double b, double rel_tol = 1e-12,
                              double abs_tol = 0.0, std::size_t max_intervals = 4000) {
  struct Interval {
    double a, b, value, error;
    bool operator<(const Interval& o) const { return error < o.error; }
  };

  auto first = detail::gk15(f, a, b);
  std::priority_queue<Interval> queue;
  queue.push({a, b, first.value, first.error});
  double total_value = first.value;
  double total_error = first.error;

  while (queue.size() < max_intervals) {
    if (total_error <= std::max(abs_tol, rel_tol * std::abs(total_value))) break;
    Interval worst = queue.top();
    if (worst.error <= 0.0) break;
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) {  // interval at floating resolution
      total_error -= worst.error;
      worst.error = 0.0;
      queue.push(worst);
      continue;
    }
    const auto left = detail::gk15(f, worst.a, mid);
    const auto right = detail::gk15(f, mid, worst.b);
    total_value += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    queue.push({worst.a, mid, left.value, left.error});
    queue.push({mid, worst.b, right.value, right.error});
  }
  return {total_value, total_error};
}

}  // namespace shrink
