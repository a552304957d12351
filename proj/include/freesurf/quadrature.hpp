#pragma once

// Adaptive Gauss-Kronrod (7/15) quadrature on finite intervals.

#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include "freesurf/common.hpp"

namespace freesurf::quad {

namespace detail {

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

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double k = fc * kWgk[7];
  double g = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double x = h * kXgk[j];
    const double s = f(c - x) + f(c + x);
    k += kWgk[j] * s;
    if (j % 2 == 1) g += kWg[j / 2] * s;
  }
  return {a, b, k * h, std::abs((k - g) * h)};
}

}  // namespace detail

struct QuadResult {
  double value;
  double error;
  int segments;
};

/// Integrate f over [a, b] to |error| <= max(abs_tol, rel_tol*|value|).
template <class F>
QuadResult integrate(F&& f, double a, double b, double rel_tol = 1e-12, double abs_tol = 0.0,
                     int max_segments = 2000) {
  std::priority_queue<detail::Segment> heap;
  auto first = detail::gk15(f, a, b);
  double value = first.value, error = first.error;
  heap.push(first);
  int count = 1;
  while (error > std::max(abs_tol, rel_tol * std::abs(value)) && count < max_segments) {
    auto s = heap.top();
    heap.pop();
    const double m = 0.5 * (s.a + s.b);
    auto l = detail::gk15(f, s.a, m);
    auto r = detail::gk15(f, m, s.b);
    value += l.value + r.value - s.value;
    error += l.error + r.error - s.error;
    heap.push(l);
    heap.push(r);
    ++count;
  }
  // re-sum to shed accumulated cancellation
  double v = 0.0, e = 0.0;
  while (!heap.empty()) {
    v += heap.top().value;
    e += heap.top().error;
    heap.pop();
  }
  if (e > std::max(abs_tol, rel_tol * std::abs(v)) * 10.0) {
    throw Error("adaptive quadrature did not converge");
  }
  return {v, e, count};
}

}  // namespace freesurf::quad
