#pragma once

// Polyline geometry: non-local gap between boundary nodes and exact
// self-intersection test.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "freesurf/common.hpp"

namespace freesurf::geometry {

inline RVec cumulative_arc(std::span<const cplx> p, bool closed) {
  RVec s(p.size() + 1, 0.0);
  for (std::size_t j = 1; j < p.size(); ++j) s[j] = s[j - 1] + std::abs(p[j] - p[j - 1]);
  s[p.size()] = s[p.size() - 1] + (closed && p.size() > 1 ? std::abs(p.front() - p.back()) : 0.0);
  return s;
}

inline double median_spacing(std::span<const cplx> p, bool closed = true) {
  const std::size_t n = p.size();
  if (n < 2) return 0.0;
  RVec d;
  d.reserve(n);
  for (std::size_t j = 1; j < n; ++j) d.push_back(std::abs(p[j] - p[j - 1]));
  if (closed) d.push_back(std::abs(p.front() - p.back()));
  std::nth_element(d.begin(), d.begin() + d.size() / 2, d.end());
  return d[d.size() / 2];
}

struct GapResult {
  double gap = std::numeric_limits<double>::infinity();
  std::size_t i = 0, j = 0;
};

/// Smallest chord |p_i - p_j| among node pairs whose arc length along the
/// curve exceeds `arc_factor` times the chord, searched within `radius`.
/// Returns gap = +inf when no such pair is closer than `radius`.
inline GapResult min_nonlocal_gap(std::span<const cplx> p, double radius, bool closed = true,
                                  double arc_factor = 4.0) {
  const std::size_t n = p.size();
  GapResult best;
  if (n < 4 || !(radius > 0.0)) return best;
  const RVec s = cumulative_arc(p, closed);
  const double total = s[n];
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return p[a].real() < p[b].real(); });
  for (std::size_t ii = 0; ii < n; ++ii) {
    const std::size_t a = order[ii];
    if (!std::isfinite(p[a].real()) || !std::isfinite(p[a].imag())) continue;
    for (std::size_t jj = ii + 1; jj < n; ++jj) {
      const std::size_t b = order[jj];
      const double dx = p[b].real() - p[a].real();
      if (dx > radius) break;
      if (std::abs(p[b].imag() - p[a].imag()) > radius) continue;
      const double chord = std::abs(p[b] - p[a]);
      if (chord >= radius || chord >= best.gap) continue;
      double arc = std::abs(s[a] - s[b]);
      if (closed) arc = std::min(arc, total - arc);
      if (arc > arc_factor * chord) best = {chord, std::min(a, b), std::max(a, b)};
    }
  }
  return best;
}

namespace detail {

inline double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

inline bool segments_cross(cplx p1, cplx p2, cplx q1, cplx q2) {
  const double d1 = cross(q2 - q1, p1 - q1);
  const double d2 = cross(q2 - q1, p2 - q1);
  const double d3 = cross(p2 - p1, q1 - p1);
  const double d4 = cross(p2 - p1, q2 - p1);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  auto on_segment = [](cplx a, cplx b, cplx c) {
    return std::min(a.real(), b.real()) <= c.real() && c.real() <= std::max(a.real(), b.real()) &&
           std::min(a.imag(), b.imag()) <= c.imag() && c.imag() <= std::max(a.imag(), b.imag());
  };
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

}  // namespace detail

/// First pair of non-adjacent crossing segments (segment k joins node k to
/// node k+1), if any.
inline std::optional<std::pair<std::size_t, std::size_t>> self_intersection(
    std::span<const cplx> p, bool closed = true) {
  const std::size_t n = p.size();
  const std::size_t m = closed ? n : n - 1;
  if (n < 4) return std::nullopt;
  struct Seg {
    double xmin, xmax;
    std::size_t k;
  };
  std::vector<Seg> segs;
  segs.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    const cplx a = p[k], b = p[(k + 1) % n];
    if (!std::isfinite(a.real()) || !std::isfinite(b.real()) || !std::isfinite(a.imag()) ||
        !std::isfinite(b.imag())) {
      continue;
    }
    segs.push_back({std::min(a.real(), b.real()), std::max(a.real(), b.real()), k});
  }
  std::sort(segs.begin(), segs.end(), [](const Seg& a, const Seg& b) { return a.xmin < b.xmin; });
  for (std::size_t i = 0; i < segs.size(); ++i) {
    for (std::size_t j = i + 1; j < segs.size() && segs[j].xmin <= segs[i].xmax; ++j) {
      std::size_t k1 = segs[i].k, k2 = segs[j].k;
      if (k1 > k2) std::swap(k1, k2);
      if (k2 - k1 <= 1 || (closed && k1 == 0 && k2 == m - 1)) continue;
      const cplx a1 = p[k1], a2 = p[(k1 + 1) % n], b1 = p[k2], b2 = p[(k2 + 1) % n];
      if (std::max(a1.imag(), a2.imag()) < std::min(b1.imag(), b2.imag()) ||
          std::max(b1.imag(), b2.imag()) < std::min(a1.imag(), a2.imag())) {
        continue;
      }
      if (detail::segments_cross(a1, a2, b1, b2)) return std::make_pair(k1, k2);
    }
  }
  return std::nullopt;
}

}  // namespace freesurf::geometry
