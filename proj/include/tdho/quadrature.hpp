#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include "tdho/errors.hpp"

namespace tdho {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t intervals = 0;
};

namespace detail {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
constexpr std::array<double, 8> kXgk{0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                     0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                     0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                     0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk{0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                     0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                     0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                     0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg{0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment gk15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kWgk[j] * sum;
    if (j % 2 == 1) gauss += kWg[j / 2] * sum;
  }
  return {a, b, kronrod * half, std::fabs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature: the interval with the
/// largest error estimate is bisected until the summed estimate falls below
/// max(abs_tol, rel_tol |I|). Throws Error when max_intervals is reached.
template <class F>
QuadratureResult integrate_gk(F&& f, double a, double b, double rel_tol = 1e-10, double abs_tol = 0.0,
                              std::size_t max_intervals = 4000) {
  std::priority_queue<detail::Segment> heap;
  const auto first = detail::gk15(f, a, b);
  heap.push(first);
  double value = first.value;
  double error = first.error;
  while (error > std::max(abs_tol, rel_tol * std::fabs(value))) {
    if (heap.size() >= max_intervals) throw Error("integrate_gk: interval budget exhausted");
    const detail::Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const auto left = detail::gk15(f, worst.a, mid);
    const auto right = detail::gk15(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    if (mid <= worst.a || mid >= worst.b) break;
  }
  // Re-sum to shed accumulated cancellation from the running updates.
  QuadratureResult out;
  out.intervals = heap.size();
  while (!heap.empty()) {
    out.value += heap.top().value;
    out.error += heap.top().error;
    heap.pop();
  }
  return out;
}

/// Splits [a, b] at the given interior points and integrates each piece.
template <class F>
QuadratureResult integrate_gk_pieces(F&& f, double a, double b, std::vector<double> cuts, double rel_tol = 1e-10) {
  std::sort(cuts.begin(), cuts.end());
  QuadratureResult total;
  double lo = a;
  cuts.push_back(b);
  for (double hi : cuts) {
    if (hi <= lo || hi > b) continue;
    const auto piece = integrate_gk(f, lo, hi, rel_tol);
    total.value += piece.value;
    total.error += piece.error;
    total.intervals += piece.intervals;
    lo = hi;
  }
  return total;
}

}  // namespace tdho
