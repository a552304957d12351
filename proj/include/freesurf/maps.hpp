#pragma once

// Explicit conformal maps used to build initial data and exact references:
// disk automorphisms, the smoothed wedge chain, and the ellipse -> disk map
// built from Jacobi elliptic functions.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <string>

#include "freesurf/common.hpp"
#include "freesurf/spectral.hpp"

namespace freesurf::maps {

// ---------------------------------------------------------------------------
// Disk automorphism zeta_r(w) = (w + r)/(1 + r w)

struct MobiusParams {
  double r = 0.0;

  static MobiusParams from_compression(double c) {
    if (!(c >= 1.0)) throw InvalidInput("compression factor must be >= 1");
    const double s = std::sqrt(c);
    return {(s - 1.0) / (s + 1.0)};
  }
  double compression() const { return std::pow((1.0 + r) / (1.0 - r), 2); }
};

inline cplx mobius(cplx w, const MobiusParams& p) { return (w + p.r) / (1.0 + p.r * w); }
inline cplx mobius_dw(cplx w, const MobiusParams& p) {
  const cplx d = 1.0 + p.r * w;
  return (1.0 - p.r * p.r) / (d * d);
}

// ---------------------------------------------------------------------------
// Jacobi elliptic functions

/// Real sn, cn, dn for parameter m = k^2 in [0, 1] by descending Landen (AGM).
inline std::array<double, 3> jacobi_real(double u, double m) {
  if (m < 0.0 || m > 1.0) throw DomainError("jacobi parameter outside [0,1]");
  if (m < 1e-16) return {std::sin(u), std::cos(u), 1.0};
  if (1.0 - m < 1e-16) {
    const double s = 1.0 / std::cosh(u);
    return {std::tanh(u), s, s};
  }
  constexpr int kMax = 40;
  std::array<double, kMax + 1> a{}, c{};
  a[0] = 1.0;
  double b = std::sqrt(1.0 - m);
  c[0] = std::sqrt(m);
  int n = 0;
  while (std::abs(c[n]) > 1e-15 && n < kMax) {
    a[n + 1] = 0.5 * (a[n] + b);
    c[n + 1] = 0.5 * (a[n] - b);
    b = std::sqrt(a[n] * b);
    ++n;
  }
  double phi = std::ldexp(a[n] * u, n);
  double phi_prev = phi;
  for (int j = n; j > 0; --j) {
    phi_prev = phi;
    phi = 0.5 * (phi + std::asin(c[j] / a[j] * std::sin(phi)));
  }
  const double sn = std::sin(phi), cn = std::cos(phi);
  const double dn = n > 0 ? cn / std::cos(phi_prev - phi) : 1.0;
  return {sn, cn, dn};
}

/// Complex sn, cn, dn for parameter m via the imaginary-argument addition formulas.
inline std::array<cplx, 3> jacobi_complex(cplx u, double m) {
  const auto [s, c, d] = jacobi_real(u.real(), m);
  if (u.imag() == 0.0) return {cplx(s), cplx(c), cplx(d)};
  const auto [s1, c1, d1] = jacobi_real(u.imag(), 1.0 - m);
  const double den = c1 * c1 + m * s * s * s1 * s1;
  return {cplx(s * d1, c * d * s1 * c1) / den, cplx(c * c1, -s * d * s1 * d1) / den,
          cplx(d * c1 * d1, -m * s * c * s1) / den};
}

/// Theta constants theta_2(q), theta_3(q) for the nome q in [0, 1).
inline std::pair<double, double> theta23(double q) {
  if (q < 0.0 || q >= 1.0) throw DomainError("nome must lie in [0,1)");
  double t2 = 0.0, t3 = 1.0;
  for (int n = 0; n < 10000; ++n) {
    const double a = std::pow(q, n * (n + 1.0));
    const double b = std::pow(q, (n + 1.0) * (n + 1.0));
    t2 += a;
    t3 += 2.0 * b;
    if (a < 1e-18 * t2 && b < 1e-18) break;
  }
  return {2.0 * std::pow(q, 0.25) * t2, t3};
}

/// Modulus k(q) = theta_2^2/theta_3^2 for nome q.
inline double modulus(double q) {
  const auto [t2, t3] = theta23(q);
  return t2 * t2 / (t3 * t3);
}

/// Quarter period K(q) = (pi/2) theta_3^2 for nome q.
inline double quarter_period(double q) {
  const auto t3 = theta23(q).second;
  return 0.5 * pi * t3 * t3;
}

/// sn(u) with modulus k(q), q the nome.
inline cplx jacobi_sn(cplx u, double q) {
  const double k = modulus(q);
  return jacobi_complex(u, k * k)[0];
}

// ---------------------------------------------------------------------------
// Ellipse -> disk

struct EllipseParams {
  double a = 1.0;
  double b = 1.0;

  EllipseParams() = default;
  EllipseParams(double a_, double b_) : a(a_), b(b_) {
    if (!(b > 0.0) || a < b) throw InvalidInput("ellipse axes must satisfy a >= b > 0");
  }
  double nome() const { return std::pow((a - b) / (a + b), 2); }
  double focal() const { return std::sqrt(a * a - b * b); }
};

/// Conformal map of the ellipse x^2/a^2 + y^2/b^2 < 1 onto the unit disk with
/// w(0) = 0, w'(0) > 0.
class EllipseMap {
 public:
  explicit EllipseMap(EllipseParams p) : p_(p) {
    q_ = p.nome();
    c_ = p.focal();
    if (c_ > 1e-14 * p.a) {
      k_ = modulus(q_);
      m_ = k_ * k_;
      scale_ = 2.0 * quarter_period(q_) / pi;
    }
  }

  const EllipseParams& params() const { return p_; }

  cplx operator()(cplx z) const { return eval(z, nullptr); }

  /// Analytic continuation slightly past the boundary (no domain check).
  cplx continued(cplx z) const { return eval(z, nullptr, false); }

  /// Value and derivative.
  cplx eval(cplx z, cplx* dwdz, bool check = true) const {
    const double inside = std::norm(z.real() / p_.a) + std::norm(z.imag() / p_.b);
    if (check && inside > 1.0 + 1e-9) throw DomainError("point outside the ellipse");
    if (c_ <= 1e-14 * p_.a) {
      if (dwdz) *dwdz = 1.0 / p_.a;
      return z / p_.a;
    }
    const cplx s = z / c_;
    const cplx u = scale_ * std::asin(s);
    const auto [sn, cn, dn] = jacobi_complex(u, m_);
    if (dwdz) *dwdz = std::sqrt(k_) * cn * dn * scale_ / (c_ * std::sqrt(1.0 - s * s));
    return std::sqrt(k_) * sn;
  }

  /// Disk -> ellipse by Newton iteration from the linearized guess.
  cplx inverse(cplx w) const {
    if (std::abs(w) > 1.0 + 1e-12) throw DomainError("point outside the unit disk");
    cplx z = cplx(w.real() * p_.a, w.imag() * p_.b);
    for (int it = 0; it < 60; ++it) {
      // keep iterates inside the closed ellipse
      const double r = std::sqrt(std::norm(z.real() / p_.a) + std::norm(z.imag() / p_.b));
      if (r > 1.0) z /= r;
      cplx d;
      const cplx f = eval(z, &d) - w;
      const cplx step = f / d;
      z -= step;
      if (std::abs(step) < 1e-15 * p_.a) break;
    }
    return z;
  }

 private:
  EllipseParams p_;
  double q_ = 0.0, c_ = 0.0, k_ = 0.0, m_ = 0.0, scale_ = 1.0;
};

inline cplx ellipse_to_disk(cplx z, const EllipseParams& p) { return EllipseMap(p)(z); }

// ---------------------------------------------------------------------------
// Smoothed wedge

struct DimpleParams {
  double eps1 = 0.1;
  double p1 = 81.0;
  double eps2 = 1e-5;
  double p2 = 1620.0;
};

struct WedgeParams {
  double Theta = pi / 3.0;  // opening angle outside the fluid
  double C_plus = 20.0;
  DimpleParams dimple;

  double nu() const { return 2.0 - Theta / pi; }
  void validate() const {
    if (!(Theta > 0.0 && Theta <= pi)) throw InvalidInput("wedge angle must lie in (0, pi]");
    if (!(C_plus > 0.0)) throw InvalidInput("half-plane scale must be positive");
  }
};

/// Dimple profile a(vartheta) with vartheta = arg(-w) in (-pi, pi].
inline double dimple_profile(cplx w, const DimpleParams& d) {
  const double v = std::arg(-w);
  double a = 0.0;
  if (d.eps1 != 0.0) a += d.eps1 * std::pow(std::cos(0.5 * v), d.p1);
  if (d.eps2 != 0.0) a += d.eps2 * std::pow(std::cos(v), d.p2);
  return a;
}

/// Grid samples of the wedge map chain and its w-derivative factors. Without
/// the far-field dimple term the node w = 1 maps to infinity.
struct WedgeChain {
  CVec zeta;     // zeta_d(zeta_r(w))
  CVec dzeta;    // d/dw of zeta
  CVec log_zp;   // log zeta_+(zeta)
  CVec dzp;      // d/dw of zeta_+(zeta)
  CVec Z;        // zeta_+^nu
  CVec Zw;       // d/dw Z
};

inline WedgeChain wedge_chain(const spectral::SpectralGrid& grid, const WedgeParams& p,
                              const MobiusParams& m) {
  p.validate();
  const std::size_t n = grid.size();
  const double nu = p.nu();
  RVec a(n);
  CVec zr(n), zrw(n);
  for (std::size_t j = 0; j < n; ++j) {
    const cplx w = grid.node(j);
    zr[j] = mobius(w, m);
    zrw[j] = mobius_dw(w, m);
    a[j] = dimple_profile(zr[j], p.dimple);
  }
  // B o zeta_r is holomorphic in w with real part a o zeta_r on the circle
  CVec bc = spectral::analytic_coeffs(a, grid);
  CVec b = grid.inverse(bc);
  CVec bwc(n, cplx(0.0));
  for (std::size_t k = 1; k < n / 2; ++k) bwc[k - 1] = static_cast<double>(k) * bc[k];
  CVec bw = grid.inverse(bwc);

  WedgeChain out;
  out.zeta.resize(n);
  out.dzeta.resize(n);
  out.log_zp.resize(n);
  out.dzp.resize(n);
  out.Z.resize(n);
  out.Zw.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const cplx e = std::exp(-b[j]);
    const cplx z = zr[j] * e;
    const cplx dz = e * (zrw[j] - zr[j] * bw[j]);
    const cplx om = 1.0 - z;
    const cplx zp = p.C_plus * (-1.0 + 2.0 / om);
    if (std::isfinite(std::abs(zp)) && !(std::abs(std::arg(zp)) < 0.5 * pi + 1e-6)) {
      throw DomainError("wedge chain left the right half plane at node " + std::to_string(j));
    }
    const cplx lzp = std::log(zp);
    const cplx dzp = 2.0 * p.C_plus / (om * om) * dz;
    out.zeta[j] = z;
    out.dzeta[j] = dz;
    out.log_zp[j] = lzp;
    out.dzp[j] = dzp;
    out.Z[j] = std::exp(nu * lzp);
    out.Zw[j] = nu * std::exp((nu - 1.0) * lzp) * dzp;
  }
  return out;
}

}  // namespace freesurf::maps
