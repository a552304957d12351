#pragma once

// Exact and reduced-ODE solution families: Dirichlet conics (ellipses,
// voids, hyperbolas), self-gravitating ellipsoids and ballistic interfaces.

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "freesurf/common.hpp"
#include "freesurf/geometry.hpp"
#include "freesurf/maps.hpp"
#include "freesurf/ode.hpp"
#include "freesurf/quadrature.hpp"

namespace freesurf::exact {

// ---------------------------------------------------------------------------
// Dirichlet conics

struct ConicState {
  RVec a;
  RVec adot;
  std::vector<int> sigma;
  int sigma0 = 1;
  double t = 0.0;

  std::size_t dim() const { return a.size(); }

  /// Volume radius r with prod a_j = r^d.
  double radius() const {
    double lp = 0.0;
    for (double x : a) lp += std::log(x);
    return std::exp(lp / static_cast<double>(a.size()));
  }
  double signed_speed() const {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += sigma[j] * adot[j] * adot[j];
    return s;
  }
  void validate() const {
    if (a.size() < 2) throw InvalidInput("conic dimension must be >= 2");
    if (adot.size() != a.size() || sigma.size() != a.size()) {
      throw InvalidInput("conic state arrays must have equal length");
    }
    for (double x : a) {
      if (!(x > 0.0)) throw InvalidInput("semi-axes must be positive");
    }
    for (int s : sigma) {
      if (s != 1 && s != -1) throw InvalidInput("signature entries must be +1 or -1");
    }
    if (sigma0 < -1 || sigma0 > 1) throw InvalidInput("sigma0 must be -1, 0 or 1");
  }

  static ConicState ellipse(double a1, double a2, double v1, double v2) {
    return {{a1, a2}, {v1, v2}, {1, 1}, 1, 0.0};
  }
  static ConicState hyperbola(double a1, double a2, double v1, double v2) {
    return {{a1, a2}, {v1, v2}, {-1, 1}, -1, 0.0};
  }
};

/// Pressure multiplier beta = (sum adot^2/a^2)/(sum sigma/a^2).
inline double conic_beta(const RVec& a, const RVec& adot, const std::vector<int>& sigma) {
  double num = 0.0, den = 0.0, scale = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double ia2 = 1.0 / (a[j] * a[j]);
    num += adot[j] * adot[j] * ia2;
    den += sigma[j] * ia2;
    scale += ia2;
  }
  if (std::abs(den) <= 1e-13 * scale) {
    throw SingularityError("parabolic degeneracy: sum sigma_j/a_j^2 vanishes", 0, den);
  }
  return num / den;
}

inline double conic_beta(const ConicState& s) { return conic_beta(s.a, s.adot, s.sigma); }

/// Second derivatives addot_j = beta sigma_j / a_j.
inline RVec conic_accel(const ConicState& s) {
  const double beta = conic_beta(s);
  RVec acc(s.dim());
  for (std::size_t j = 0; j < s.dim(); ++j) acc[j] = beta * s.sigma[j] / s.a[j];
  return acc;
}

inline std::pair<RVec, RVec> conic_rhs(const ConicState& s) {
  s.validate();
  return {s.adot, conic_accel(s)};
}

/// +1 when the Taylor sign condition holds (beta > 0), -1 when it fails.
inline int taylor_sign(const ConicState& s) {
  const double b = conic_beta(s);
  return b > 0.0 ? 1 : (b < 0.0 ? -1 : 0);
}

struct ConicTrajectory {
  std::vector<ConicState> samples;
  bool completed = true;
  ode::StepStats stats;
};

/// Integrate the geodesic equations, sampling at every accepted step.
inline ConicTrajectory integrate_conic(const ConicState& s0, double t_end,
                                       ode::StepControl ctl = {1e-12, 1e-14}) {
  s0.validate();
  const std::size_t d = s0.dim();
  auto rhs = [&](double, const RVec& y, RVec& dy) {
    for (std::size_t j = 0; j < d; ++j) {
      if (!(y[j] > 0.0)) throw SingularityError("semi-axis collapsed", j, y[j]);
    }
    RVec a(y.begin(), y.begin() + d), v(y.begin() + d, y.end());
    const double beta = conic_beta(a, v, s0.sigma);
    for (std::size_t j = 0; j < d; ++j) {
      dy[j] = v[j];
      dy[d + j] = beta * s0.sigma[j] / a[j];
    }
  };
  RVec y(2 * d);
  for (std::size_t j = 0; j < d; ++j) {
    y[j] = s0.a[j];
    y[d + j] = s0.adot[j];
  }
  ConicTrajectory out;
  out.samples.push_back(s0);
  auto unpack = [&](double t, const RVec& v) {
    ConicState s = s0;
    s.t = t;
    for (std::size_t j = 0; j < d; ++j) {
      s.a[j] = v[j];
      s.adot[j] = v[d + j];
    }
    return s;
  };
  const double direction = t_end >= s0.t ? 1.0 : -1.0;
  // integrate in reversed time by flipping the sign of the velocities
  if (direction < 0) {
    for (std::size_t j = 0; j < d; ++j) y[d + j] = -y[d + j];
  }
  out.completed = ode::integrate(
      rhs, 0.0, y, std::abs(t_end - s0.t), ctl,
      [&](double tau, const RVec& v) {
        auto s = unpack(s0.t + direction * tau, v);
        if (direction < 0) {
          for (auto& x : s.adot) x = -x;
        }
        out.samples.push_back(s);
        return true;
      },
      nullptr, &out.stats);
  return out;
}

inline ConicState conic_at(const ConicState& s0, double t, ode::StepControl ctl = {1e-13, 1e-15}) {
  auto tr = integrate_conic(s0, t, ctl);
  if (!tr.completed) throw Error("conic trajectory became singular before the requested time");
  return tr.samples.back();
}

// ---------------------------------------------------------------------------
// Dirichlet ellipse as a conformal oracle

/// Exact interface and complex potential of a 2D Dirichlet ellipse, in the
/// disk parametrization normalized by Z(0) = 0, Z_w(0) > 0.
class EllipseOracle {
 public:
  explicit EllipseOracle(const ConicState& s) : state_(s) {
    if (s.dim() != 2 || s.sigma[0] != 1 || s.sigma[1] != 1) {
      throw InvalidInput("ellipse oracle needs a 2D state with all signs positive");
    }
    swapped_ = s.a[0] < s.a[1];
    const double big = swapped_ ? s.a[1] : s.a[0];
    const double small = swapped_ ? s.a[0] : s.a[1];
    map_ = maps::EllipseMap(maps::EllipseParams(big, small));
    alpha1_ = s.adot[0] / s.a[0];
  }

  /// Interface point for w on the closed unit disk.
  cplx Z(cplx w) const {
    if (!swapped_) return map_.inverse(w);
    // rotate by 90 degrees so the long axis lies on the real axis
    return -I * map_.inverse(I * w);
  }

  /// Complex potential f(z) = (alpha_1/2) z^2 (alpha_2 = -alpha_1).
  cplx F(cplx w) const {
    const cplx z = Z(w);
    return 0.5 * alpha1_ * z * z;
  }

  /// Disk coordinate of an interface point (ellipse -> disk).
  cplx W(cplx z) const {
    if (!swapped_) return map_(z);
    return -I * map_(I * z);
  }

  const ConicState& state() const { return state_; }

 private:
  ConicState state_;
  bool swapped_ = false;
  maps::EllipseMap map_{maps::EllipseParams(1.0, 1.0)};
  double alpha1_ = 0.0;
};

// ---------------------------------------------------------------------------
// 2D Dirichlet hyperbola

struct HyperbolaCase {
  bool blows_up_forward = false;
  std::optional<double> blowup_time;  // forward singular time when blows_up_forward
  int taylor = 0;                     // +1 when theta < pi/4
};

/// Hyperbola with a1 a2 = r^2, asymptote angle tan(theta) = a2/a1 = r^2/a1^2
/// and a1dot = tau/|tan^2 theta - 1|^{1/2}.
class Hyperbola {
 public:
  Hyperbola(double theta0, double tau, double r = 1.0) : theta0_(theta0), tau_(tau), r_(r) {
    if (!(theta0 > 0.0 && theta0 < 0.5 * pi)) throw InvalidInput("theta0 must lie in (0, pi/2)");
    if (std::abs(theta0 - 0.25 * pi) < 1e-14) throw InvalidInput("theta0 = pi/4 is singular");
    if (!(r > 0.0)) throw InvalidInput("r must be positive");
    a10_ = r * std::sqrt(1.0 / std::tan(theta0));
  }

  double a1_initial() const { return a10_; }
  double theta_of(double a1) const { return std::atan(r_ * r_ / (a1 * a1)); }

  double a1dot(double a1) const {
    const double t = r_ * r_ / (a1 * a1);
    return tau_ / std::sqrt(std::abs(t * t - 1.0));
  }

  /// Initial conic state with sigma = (-1, +1).
  ConicState conic() const {
    const double a1 = a10_, a2 = r_ * r_ / a1;
    const double v1 = a1dot(a1);
    const double v2 = -a2 * v1 / a1;
    return ConicState::hyperbola(a1, a2, v1, v2);
  }

  /// a1 moves toward r (theta toward pi/4) forward in time.
  bool blows_up_forward() const { return tau_ != 0.0 && ((a10_ > r_) == (tau_ < 0.0)); }

  /// Time for a1 to reach r, from dt = |tan^2-1|^{1/2} da/|tau| (integrand bounded).
  std::optional<double> blowup_time(double rel_tol = 1e-13) const {
    if (!blows_up_forward()) return std::nullopt;
    auto g = [&](double a) {
      const double t = r_ * r_ / (a * a);
      return std::sqrt(std::abs(t * t - 1.0));
    };
    const double lo = std::min(a10_, r_), hi = std::max(a10_, r_);
    return quad::integrate(g, lo, hi, rel_tol, 1e-15).value / std::abs(tau_);
  }

  /// Same time from the ODE dt/da = |tan^2-1|^{1/2}/|tau| integrated up to a1 = r.
  std::optional<double> blowup_time_ode(double tol) const {
    if (!blows_up_forward()) return std::nullopt;
    auto rhs = [&](double a, const RVec&, RVec& dy) {
      const double t = r_ * r_ / (a * a);
      dy[0] = std::sqrt(std::abs(t * t - 1.0)) / std::abs(tau_);
    };
    const double lo = std::min(a10_, r_), hi = std::max(a10_, r_);
    return ode::integrate_to(rhs, lo, {0.0}, hi, {tol, tol * 1e-3})[0];
  }

  HyperbolaCase classify() const {
    HyperbolaCase c;
    c.blows_up_forward = blows_up_forward();
    c.blowup_time = blowup_time();
    c.taylor = taylor_sign(conic());
    return c;
  }

  /// Path (t, a1) sampled by the time integrator, stopping just short of the
  /// singular time or at t_end.
  std::vector<std::pair<double, double>> path(double t_end, double tol = 1e-10) const {
    std::vector<std::pair<double, double>> out{{0.0, a10_}};
    auto bt = blowup_time();
    const double stop = bt ? std::min(t_end, *bt * (1.0 - 1e-9)) : t_end;
    auto rhs = [&](double, const RVec& y, RVec& dy) { dy[0] = a1dot(y[0]); };
    ode::integrate(rhs, 0.0, {a10_}, stop, {tol, tol * 1e-3},
                   [&](double t, const RVec& y) {
                     out.emplace_back(t, y[0]);
                     return std::abs(y[0] - r_) > 1e-14 * r_;
                   });
    return out;
  }

 private:
  double theta0_, tau_, r_;
  double a10_;
};

// ---------------------------------------------------------------------------
// Self-gravitating ellipsoid

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

struct GravityAlphas {
  double alpha0;
  Vec3 alpha;
};

/// alpha_0 = int_0^inf du/Delta, alpha_i = int_0^inf du/(Delta (a_i^2+u)),
/// Delta^2 = prod(a_j^2+u). Uses u = A^2 (1/s^2 - 1), s in (0, 1].
inline GravityAlphas gravity_alpha(const Vec3& a, double rel_tol = 1e-12) {
  for (int i = 0; i < 3; ++i) {
    if (!(a[i] > 0.0)) throw InvalidInput("semi-axes must be positive");
  }
  const double A = a.maxCoeff();
  auto integrand = [&](double s, int which) {
    if (s <= 0.0) return 0.0;
    const double u = A * A * (1.0 / (s * s) - 1.0);
    const double du = 2.0 * A * A / (s * s * s);
    const double delta =
        std::sqrt((a[0] * a[0] + u) * (a[1] * a[1] + u) * (a[2] * a[2] + u));
    const double base = du / delta;
    return which < 0 ? base : base / (a[which] * a[which] + u);
  };
  GravityAlphas out{};
  out.alpha0 = quad::integrate([&](double s) { return integrand(s, -1); }, 0.0, 1.0, rel_tol).value;
  for (int i = 0; i < 3; ++i) {
    out.alpha[i] = quad::integrate([&](double s) { return integrand(s, i); }, 0.0, 1.0, rel_tol).value;
  }
  return out;
}

struct EllipsoidState {
  Mat3 P = Mat3::Identity();
  Mat3 Pdot = Mat3::Zero();
  double gamma0 = 0.0;  // 2 pi G rho_0
  double t = 0.0;
};

struct EllipsoidAccel {
  Mat3 Pddot;
  double beta;
};

/// Second derivative P'' = R (beta Lambda^{-1} + gamma0 det(Lambda) dalpha0/dLambda) S^T,
/// beta enforcing (log det P)'' = 0.
inline EllipsoidAccel ellipsoid_rhs(const Mat3& P, const Mat3& Pdot, double gamma0) {
  Eigen::JacobiSVD<Mat3> svd(P, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 a = svd.singularValues();
  if (!(a[2] > 1e-300) || !(a[2] > 1e-14 * a[0])) {
    throw SingularityError("ellipsoid matrix is singular", 2, a[2]);
  }
  const Mat3& R = svd.matrixU();
  const Mat3& S = svd.matrixV();
  Vec3 d = Vec3::Zero();
  if (gamma0 != 0.0) {
    const auto g = gravity_alpha(a);
    const double det = a.prod();
    for (int i = 0; i < 3; ++i) d[i] = -gamma0 * det * a[i] * g.alpha[i];
  }
  const Mat3 Pinv = P.inverse();
  const Mat3 M = Pinv * Pdot;
  double inv2 = 0.0, dsum = 0.0;
  for (int i = 0; i < 3; ++i) {
    inv2 += 1.0 / (a[i] * a[i]);
    dsum += d[i] / a[i];
  }
  const double beta = ((M * M).trace() - dsum) / inv2;
  const Mat3 acc = beta * Pinv.transpose() + R * d.asDiagonal() * S.transpose();
  return {acc, beta};
}

inline RVec pack(const EllipsoidState& s) {
  RVec y(18);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      y[3 * i + j] = s.P(i, j);
      y[9 + 3 * i + j] = s.Pdot(i, j);
    }
  return y;
}

inline void unpack(const RVec& y, Mat3& P, Mat3& Pdot) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      P(i, j) = y[3 * i + j];
      Pdot(i, j) = y[9 + 3 * i + j];
    }
}

struct EllipsoidTrajectory {
  std::vector<EllipsoidState> samples;
  bool completed = true;
  ode::StepStats stats;
};

/// Integrate the reduced ellipsoid dynamics, sampling every accepted step
/// (or only at `times` when given).
inline EllipsoidTrajectory integrate_ellipsoid(const EllipsoidState& s0, double t_end,
                                               ode::StepControl ctl = {1e-11, 1e-13},
                                               const std::vector<double>& times = {}) {
  auto rhs = [&](double, const RVec& y, RVec& dy) {
    Mat3 P, Pd;
    unpack(y, P, Pd);
    const auto acc = ellipsoid_rhs(P, Pd, s0.gamma0);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        dy[3 * i + j] = Pd(i, j);
        dy[9 + 3 * i + j] = acc.Pddot(i, j);
      }
  };
  EllipsoidTrajectory out;
  out.samples.push_back(s0);
  auto record = [&](double t, const RVec& y) {
    EllipsoidState s = s0;
    s.t = t;
    unpack(y, s.P, s.Pdot);
    out.samples.push_back(s);
  };
  RVec y = pack(s0);
  if (times.empty()) {
    out.completed = ode::integrate(
        rhs, s0.t, y, t_end, ctl, [&](double t, const RVec& v) { record(t, v); return true; },
        nullptr, &out.stats);
    return out;
  }
  double t = s0.t;
  for (double tn : times) {
    if (tn <= t) continue;
    ode::StepStats st;
    const bool ok = ode::integrate(rhs, t, y, tn, ctl, [](double, const RVec&) { return true; }, &y, &st);
    out.stats.accepted += st.accepted;
    out.stats.rejected += st.rejected;
    out.stats.rhs_evals += st.rhs_evals;
    if (!ok) {
      out.completed = false;
      break;
    }
    record(tn, y);
    t = tn;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ballistic interfaces

struct Cusp {};

struct Cavity {
  double a = -0.2;
  double b = 1.2;

  void validate() const {
    if (std::abs(std::pow(b, 4) - 1.0) < 1e-14) throw InvalidInput("cavity needs b^4 != 1");
  }
  cplx G(cplx V) const {
    const cplx v4 = std::pow(V, 4);
    return 4.0 * a * V / (1.0 - std::pow(b, 4) * v4);
  }
  cplx dG(cplx V) const {
    const cplx q = std::pow(b, 4) * std::pow(V, 4);
    return 4.0 * a * (1.0 + 3.0 * q) / ((1.0 - q) * (1.0 - q));
  }
  /// Time -G'(1) at which the boundary parametrization degenerates.
  double singularity_time() const {
    validate();
    return -dG(1.0).real();
  }
};

/// Cusp family z(u) = t u + u/(u^2+1) - i/(u^2+1).
inline cplx cusp_point(double u, double t) { return t * u + 1.0 / (u + I); }
inline double cusp_dxdu(double u, double t) {
  const double q = u * u + 1.0;
  return t + (1.0 - u * u) / (q * q);
}

inline CVec cusp_boundary(double t, double u_min, double u_max, std::size_t count) {
  CVec out(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double u = u_min + (u_max - u_min) * static_cast<double>(k) / static_cast<double>(count - 1);
    out[k] = cusp_point(u, t);
  }
  return out;
}

/// Cavity boundary z(theta) = e^{i theta} t + G(e^{i theta}) on a uniform grid.
inline CVec cavity_boundary(const Cavity& c, double t, std::size_t count) {
  c.validate();
  CVec out(count);
  for (std::size_t k = 0; k < count; ++k) {
    const cplx V = std::polar(1.0, 2.0 * pi * static_cast<double>(k) / static_cast<double>(count));
    out[k] = V * t + c.G(V);
  }
  return out;
}

/// Least-squares slope of log(y+1) against log|x| on the cusp for
/// u in [u_lo, u_hi].
inline double cusp_local_exponent(double t, double u_lo = 1e-3, double u_hi = 1e-2,
                                  std::size_t count = 200) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double u = u_lo * std::pow(u_hi / u_lo, static_cast<double>(k) / (count - 1));
    const cplx z = cusp_point(u, t);
    const double lx = std::log(std::abs(z.real())), ly = std::log(z.imag() + 1.0);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(count);
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Earliest time in [t_start, t_stop] (scanned forward with step dt, then
/// refined by bisection) at which the cavity boundary self-intersects.
inline std::optional<double> cavity_splash_time(const Cavity& c, double t_start, double t_stop,
                                                double dt = 1e-2, std::size_t count = 4096) {
  auto hits = [&](double t) {
    auto z = cavity_boundary(c, t, count);
    return geometry::self_intersection(z, true).has_value();
  };
  if (hits(t_start)) return t_start;
  double prev = t_start;
  for (double t = t_start + dt; t <= t_stop + 1e-15; t += dt) {
    if (hits(t)) {
      double lo = prev, hi = t;
      for (int i = 0; i < 60 && hi - lo > 1e-12; ++i) {
        const double m = 0.5 * (lo + hi);
        (hits(m) ? hi : lo) = m;
      }
      return hi;
    }
    prev = t;
  }
  return std::nullopt;
}

}  // namespace freesurf::exact
