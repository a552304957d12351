#pragma once

// Conserved quantities, geometric measurements, conic fitting, self-similar
// collapse analysis and the Galilean boost.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "freesurf/common.hpp"
#include "freesurf/dynamics.hpp"
#include "freesurf/exact.hpp"
#include "freesurf/geometry.hpp"
#include "freesurf/quadrature.hpp"
#include "freesurf/spectral.hpp"

namespace freesurf::diagnostics {

using dynamics::SimState;
using spectral::SpectralGrid;

// ---------------------------------------------------------------------------
// Geometry of sampled closed curves

/// Enclosed (signed) area pi * sum k |c_k|^2 of a sampled closed curve.
inline double area(std::span<const cplx> Z, const SpectralGrid& g) {
  g.check_size(Z.size(), "area");
  const CVec c = g.forward(Z);
  double a = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (g.is_nyquist(j)) continue;
    a += static_cast<double>(g.wavenumber(j)) * std::norm(c[j]);
  }
  return pi * a;
}

/// Unfiltered spectral theta-derivatives Z_theta and Z_theta_theta.
inline std::pair<CVec, CVec> theta_derivatives(std::span<const cplx> Z, const SpectralGrid& g) {
  g.check_size(Z.size(), "theta_derivatives");
  const std::size_t n = g.size();
  CVec c = g.forward(Z), d1(n), d2(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double k = g.is_nyquist(j) ? 0.0 : static_cast<double>(g.wavenumber(j));
    d1[j] = I * k * c[j];
    d2[j] = -k * k * c[j];
  }
  return {g.inverse(d1), g.inverse(d2)};
}

/// Signed curvature Im(conj(Z_theta) Z_theta_theta)/|Z_theta|^3.
inline RVec curvature(std::span<const cplx> Z, const SpectralGrid& g) {
  const auto [zt, ztt] = theta_derivatives(Z, g);
  RVec k(Z.size());
  for (std::size_t j = 0; j < k.size(); ++j) {
    k[j] = std::imag(std::conj(zt[j]) * ztt[j]) / std::pow(std::abs(zt[j]), 3);
  }
  return k;
}

inline double perimeter(std::span<const cplx> Z, const SpectralGrid& g) {
  const auto zt = theta_derivatives(Z, g).first;
  double s = 0.0;
  for (auto v : zt) s += std::abs(v);
  return s * g.spacing();
}

// ---------------------------------------------------------------------------
// Energies

/// Kinetic energy (1/2) int Phi Lambda Phi from analytic samples of F.
inline double kinetic_from_potential(std::span<const cplx> F, const SpectralGrid& g) {
  const CVec c = g.forward(F);
  double e = 0.0;
  for (std::size_t k = 1; k < g.half(); ++k) e += static_cast<double>(k) * std::norm(c[k]);
  return 0.5 * pi * e;
}

/// Kinetic energy from conj(U) and Z samples via F_w = conj(U) Z_w.
inline double kinetic_from_velocity(std::span<const cplx> Z, std::span<const cplx> U,
                                    const SpectralGrid& g) {
  const std::size_t n = g.size();
  CVec zc = g.forward(Z), zw(n, 0.0);
  for (std::size_t k = 1; k < n / 2; ++k) zw[k - 1] = static_cast<double>(k) * zc[k];
  CVec zwv = g.inverse(zw), fw(n);
  for (std::size_t j = 0; j < n; ++j) fw[j] = U[j] * zwv[j];
  const CVec fc = g.forward(fw);
  return kinetic_from_potential(g.inverse(spectral::primitive_coeffs(fc, n)), g);
}

/// Bulk potential energy over the fluid domain. Gravity uses the boundary
/// form int y dA = -1/2 int Y^2 X_theta dtheta; other potentials are
/// integrated over the disk image.
inline double potential_energy(std::span<const cplx> Z, const SpectralGrid& g,
                               const dynamics::BodyPotential& b, double rel_tol = 1e-10) {
  if (!b.active()) return 0.0;
  const std::size_t n = g.size();
  double e = 0.0;
  if (b.gravity != 0.0) {
    const auto zt = theta_derivatives(Z, g).first;
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += Z[j].imag() * Z[j].imag() * zt[j].real();
    e += -0.5 * b.gravity * s * g.spacing();
  }
  if (b.custom) {
    const CVec c = g.forward(Z);
    auto ring = [&](double r) {
      CVec zr(n, 0.0), zwr(n, 0.0);
      for (std::size_t k = 0; k < n / 2; ++k) {
        const double rk = std::pow(r, static_cast<double>(k));
        zr[k] = c[k] * rk;
        if (k > 0) zwr[k - 1] = static_cast<double>(k) * c[k] * (k > 1 ? rk / r : 1.0);
      }
      CVec z = g.inverse(zr), zw = g.inverse(zwr);
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += b.custom(z[j]) * std::norm(zw[j]);
      return r * s * g.spacing();
    };
    e += quad::integrate(ring, 0.0, 1.0, rel_tol, 1e-14).value;
  }
  return e;
}

struct DiagnosticRecord {
  double t = 0.0;
  double area = 0.0;
  double kinetic = 0.0;
  double surface_energy = 0.0;
  double potential_energy = 0.0;
  double total_energy = 0.0;
  double minJ = 0.0;
  double maxCurvature = 0.0;
  double min_boundary_gap = std::numeric_limits<double>::infinity();
  double neg_mode_energy = 0.0;

  static constexpr const char* csv_header =
      "t,area,kinetic,surface_energy,potential_energy,total_energy,minJ,maxCurvature,"
      "min_boundary_gap,neg_mode_energy";
};

/// Diagnostics from interface and velocity samples alone.
inline DiagnosticRecord sample_diagnostics(double t, std::span<const cplx> Z,
                                           std::span<const cplx> U, const SpectralGrid& g,
                                           const dynamics::PhysicsParams& phys,
                                           bool bounded = true) {
  DiagnosticRecord r;
  r.t = t;
  const auto [zt, ztt] = theta_derivatives(Z, g);
  double minJ = std::numeric_limits<double>::infinity(), maxk = 0.0, per = 0.0;
  for (std::size_t j = 0; j < Z.size(); ++j) {
    const double J = std::norm(zt[j]);
    minJ = std::min(minJ, J);
    per += std::sqrt(J);
    maxk = std::max(maxk, std::abs(std::imag(std::conj(zt[j]) * ztt[j])) / std::pow(J, 1.5));
  }
  r.minJ = minJ;
  r.maxCurvature = maxk;
  if (bounded) {
    r.area = area(Z, g);
    r.kinetic = kinetic_from_velocity(Z, U, g);
    r.surface_energy = phys.gamma * per * g.spacing();
    r.potential_energy = potential_energy(Z, g, phys.body);
  } else {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    r.area = r.kinetic = r.potential_energy = nan;
    r.surface_energy = nan;
  }
  r.total_energy = r.kinetic + r.surface_energy + r.potential_energy;
  return r;
}

/// Kinetic, surface and potential energy of a state. In ZF form the
/// kinetic energy is taken directly from Phi.
inline DiagnosticRecord energy(const SimState& s) {
  const CVec Z = dynamics::interface(s), U = dynamics::velocity(s);
  const bool bounded = !(s.formulation() == dynamics::Formulation::QUS && s.qus().has_S);
  DiagnosticRecord r = sample_diagnostics(s.t, Z, U, s.grid, s.physics, bounded);
  if (bounded && s.formulation() == dynamics::Formulation::ZF) {
    const CVec pc = s.grid.forward_real(s.zf().Phi);
    double e = 0.0;
    for (std::size_t j = 0; j < s.grid.size(); ++j) {
      if (s.grid.is_nyquist(j)) continue;
      e += std::abs(static_cast<double>(s.grid.wavenumber(j))) * std::norm(pc[j]);
    }
    r.kinetic = pi * e;
    r.total_energy = r.kinetic + r.surface_energy + r.potential_energy;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Conic fitting near an interface extremum

struct ConicFit {
  double a = 0.0, b = 0.0, x0 = 0.0;
  double residual = 0.0;
  int branch = 0;  // +1 ellipse-like, -1 hyperbola-like
  std::array<double, 3> coeffs{};  // Y^2 = c0 + c1 X + c2 X^2
};

/// Least-squares fit of Y^2 = c0 + c1 X + c2 X^2 to the points.
inline ConicFit conic_fit_points(std::span<const cplx> pts) {
  if (pts.size() < 10) throw InvalidInput("conic_fit needs at least 10 samples");
  const Eigen::Index m = static_cast<Eigen::Index>(pts.size());
  double xm = 0.0, xs = 0.0;
  for (auto p : pts) xm += p.real();
  xm /= static_cast<double>(m);
  for (auto p : pts) xs = std::max(xs, std::abs(p.real() - xm));
  if (!(xs > 0.0)) xs = 1.0;
  Eigen::MatrixXd A(m, 3);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double u = (pts[i].real() - xm) / xs;
    A(i, 0) = 1.0;
    A(i, 1) = u;
    A(i, 2) = u * u;
    y(i) = pts[i].imag() * pts[i].imag();
  }
  const Eigen::Vector3d d = A.colPivHouseholderQr().solve(y);
  ConicFit f;
  // back to the unscaled abscissa
  f.coeffs[2] = d(2) / (xs * xs);
  f.coeffs[1] = d(1) / xs - 2.0 * xm * f.coeffs[2];
  f.coeffs[0] = d(0) - d(1) * xm / xs + d(2) * xm * xm / (xs * xs);
  f.residual = std::sqrt((A * d - y).squaredNorm() / static_cast<double>(m));
  const double c2 = f.coeffs[2];
  f.branch = c2 < 0.0 ? 1 : -1;
  if (c2 == 0.0) throw DomainError("degenerate conic fit");
  f.x0 = xm - d(1) * xs / (2.0 * d(2));
  const double b2 = std::abs(d(0) - d(1) * d(1) / (4.0 * d(2)));
  f.b = std::sqrt(b2);
  f.a = std::sqrt(b2 / std::abs(c2));
  return f;
}

/// Fit `count` consecutive samples centred on the node of largest X.
inline ConicFit conic_fit(std::span<const cplx> Z, std::size_t count = 150) {
  const std::size_t n = Z.size();
  if (count < 10 || count > n) throw InvalidInput("conic_fit sample count out of range");
  std::size_t jm = 0;
  for (std::size_t j = 1; j < n; ++j) {
    if (Z[j].real() > Z[jm].real()) jm = j;
  }
  std::vector<cplx> pts;
  pts.reserve(count);
  const long half = static_cast<long>(count / 2);
  for (long i = -half; static_cast<long>(pts.size()) < static_cast<long>(count); ++i) {
    pts.push_back(Z[static_cast<std::size_t>((static_cast<long>(jm) + i + static_cast<long>(n)) %
                                             static_cast<long>(n))]);
  }
  return conic_fit_points(pts);
}

// ---------------------------------------------------------------------------
// Self-similar collapse

inline double beta_for_alpha(double alpha) {
  if (!(alpha < 2.0)) throw InvalidInput("self-similar exponent needs alpha < 2");
  return 1.0 / (2.0 - alpha);
}

/// -i t^beta / Z samples (inverted, time-scaled interface).
inline CVec scaled_inverse_interface(std::span<const cplx> Z, double t, double beta) {
  if (!(t > 0.0)) throw InvalidInput("scaled_inverse_interface needs t > 0");
  CVec out(Z.size());
  const double s = std::pow(t, beta);
  for (std::size_t j = 0; j < Z.size(); ++j) {
    if (!(std::abs(Z[j]) > 0.0)) throw DomainError("interface passes through the origin");
    out[j] = -I * s / Z[j];
  }
  return out;
}

namespace detail {

inline double point_segment(cplx p, cplx a, cplx b) {
  const cplx d = b - a;
  const double l2 = std::norm(d);
  double s = l2 > 0.0 ? std::real((p - a) * std::conj(d)) / l2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return std::abs(p - (a + s * d));
}

/// Largest distance from a windowed point of `a` to the polyline `b`.
/// Segments are scanned outward from the previous match and the scan stops
/// once the point cannot raise the maximum.
inline double directed(const std::vector<cplx>& a, std::span<const cplx> b) {
  const std::size_t n = b.size();
  if (n == 0) return a.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  double worst = 0.0;
  std::size_t hint = 0;
  for (auto p : a) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = hint;
    for (std::size_t step = 0; step < n && best > worst; ++step) {
      const std::size_t j = (step % 2 == 0) ? (hint + step / 2) % n : (hint + n - (step + 1) / 2) % n;
      const double d = point_segment(p, b[j], b[(j + 1) % n]);
      if (d < best) {
        best = d;
        arg = j;
      }
    }
    hint = arg;
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace detail

struct CollapseOptions {
  double window_factor = 1.5;  // keep points with |z| < factor * tip-image radius
};

/// Symmetric point-to-polyline Hausdorff distance between two curves,
/// restricted to a window around the tip image.
inline double hausdorff_window(std::span<const cplx> a, std::span<const cplx> b,
                               const CollapseOptions& opt = {}) {
  auto tip = [](std::span<const cplx> c) {
    double r = 0.0;
    for (auto z : c) {
      if (std::isfinite(std::abs(z))) r = std::max(r, std::abs(z));
    }
    return r;
  };
  const double radius = opt.window_factor * std::max(tip(a), tip(b));
  auto window = [&](std::span<const cplx> c) {
    std::vector<cplx> w;
    for (auto z : c) {
      if (std::isfinite(std::abs(z)) && std::abs(z) < radius) w.push_back(z);
    }
    return w;
  };
  return std::max(detail::directed(window(a), b), detail::directed(window(b), a));
}

/// Maximum windowed Hausdorff distance over all pairs of curves.
inline std::optional<double> collapse_distance(const std::vector<CVec>& curves,
                                               const CollapseOptions& opt = {}) {
  if (curves.size() < 2) return std::nullopt;
  double d = 0.0;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    for (std::size_t j = i + 1; j < curves.size(); ++j) {
      d = std::max(d, hausdorff_window(curves[i], curves[j], opt));
    }
  }
  return d;
}

/// Distances between consecutive curves, d_n = collapse_distance({c_n, c_{n+1}}).
inline RVec collapse_series(const std::vector<CVec>& curves, const CollapseOptions& opt = {}) {
  RVec d;
  for (std::size_t i = 0; i + 1 < curves.size(); ++i) {
    d.push_back(hausdorff_window(curves[i], curves[i + 1], opt));
  }
  return d;
}

// ---------------------------------------------------------------------------
// Galilean boost

/// Z -> Z + v t, F -> F + conj(v) Z (ZF state, Psi_0 re-zeroed).
inline SimState galilean_boost(const SimState& s, cplx v) {
  if (s.formulation() != dynamics::Formulation::ZF) {
    throw InvalidInput("galilean_boost needs a ZF state");
  }
  SimState out = s;
  const CVec Z = dynamics::interface(s);
  auto& f = out.zf();
  for (std::size_t j = 0; j < s.grid.size(); ++j) {
    f.Phi[j] += std::real(std::conj(v) * Z[j]);
    f.X[j] += v.real() * s.t;
  }
  f.y0 += v.imag() * s.t;
  return out;
}

// ---------------------------------------------------------------------------
// Ellipse test errors

/// max_j |W_q(Z_j) - e^{i theta_j}| with a = Re Z_0 and b = 1/a.
inline double ellipse_error_nehari(std::span<const cplx> Z, const SpectralGrid& g) {
  const double a = Z[0].real();
  const maps::EllipseMap map(maps::EllipseParams(std::max(a, 1.0 / a), std::min(a, 1.0 / a)));
  const bool swapped = a < 1.0;
  double e = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const cplx w = swapped ? -I * map.continued(I * Z[j]) : map.continued(Z[j]);
    e = std::max(e, std::abs(w - g.node(j)));
  }
  return e;
}

/// max_j |Z_j - Z_exact(w_j)| against the conic-ODE ellipse at the same time.
inline double ellipse_error_exact(std::span<const cplx> Z, const SpectralGrid& g,
                                  const exact::ConicState& s) {
  const exact::EllipseOracle o(s);
  double e = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) e = std::max(e, std::abs(Z[j] - o.Z(g.node(j))));
  return e;
}

}  // namespace freesurf::diagnostics
