#pragma once

// Right-hand sides of the two conformal evolution systems.
//
//   ZF : real traces X = Re Z and Phi = Re F on the circle.
//   QUS: analytic coefficients (k = 0..N/2-1) of Q = 1/Z_w, V = conj(U) and
//        optionally S, an analytic function of 1/Z used to recover Z in
//        unbounded domains.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <tuple>
#include <variant>

#include "freesurf/common.hpp"
#include "freesurf/maps.hpp"
#include "freesurf/spectral.hpp"

namespace freesurf::dynamics {

using spectral::BoundaryTrace;
using spectral::SpectralGrid;

enum class Formulation { ZF, QUS };
enum class Gauge { FixedCenter, MovingCenter };

inline const char* to_string(Formulation f) { return f == Formulation::ZF ? "ZF" : "QUS"; }
inline const char* to_string(Gauge g) {
  return g == Gauge::FixedCenter ? "FixedCenter" : "MovingCenter";
}

/// Scalar body potential b(z); gravity contributes g * Im z.
struct BodyPotential {
  double gravity = 0.0;
  std::function<double(cplx)> custom;

  bool active() const { return gravity != 0.0 || static_cast<bool>(custom); }
  double operator()(cplx z) const {
    double b = gravity * z.imag();
    if (custom) b += custom(z);
    return b;
  }
};

struct PhysicsParams {
  double gamma = 0.0;      // surface tension
  BodyPotential body;
  double c1 = 0.0;         // Bernoulli constant
  bool pin_phi0 = false;   // choose c1 so that mean(Phi) stays fixed (ZF)

  void validate() const {
    if (!(gamma >= 0.0)) throw InvalidInput("surface tension must be non-negative");
  }
};

struct ZFFields {
  RVec X;
  RVec Phi;
  double y0 = 0.0;  // Im Z(0)
};

struct QUSFields {
  CVec Q;  // coefficients, index k < N/2, rest zero
  CVec V;
  CVec S;
  bool has_S = false;
  double nu = 1.0;   // S = Z^{-1/nu}
  cplx z0 = 0.0;     // Z(0) when S is absent
};

struct SimState {
  SimState(SpectralGrid g) : grid(std::move(g)) {}

  std::variant<ZFFields, QUSFields> fields;
  double t = 0.0;
  SpectralGrid grid;
  Gauge gauge = Gauge::FixedCenter;
  PhysicsParams physics;
  std::string preset = "custom";
  bool experimental = false;

  Formulation formulation() const {
    return std::holds_alternative<ZFFields>(fields) ? Formulation::ZF : Formulation::QUS;
  }
  const ZFFields& zf() const { return std::get<ZFFields>(fields); }
  ZFFields& zf() { return std::get<ZFFields>(fields); }
  const QUSFields& qus() const { return std::get<QUSFields>(fields); }
  QUSFields& qus() { return std::get<QUSFields>(fields); }
};

// ---------------------------------------------------------------------------

namespace detail {

/// Values from analytic coefficients stored at indices k < N/2.
inline void values_from_coeffs(const SpectralGrid& g, const CVec& c, CVec& out) {
  g.inverse(c.data(), out.data());
}

/// w-derivative coefficients with optional filter: d_{k-1} = k rho_k c_k.
inline void dw_inplace(const SpectralGrid& g, const CVec& c, CVec& d, bool filtered) {
  const std::size_t n = g.size();
  std::fill(d.begin(), d.end(), cplx(0.0));
  for (std::size_t k = 1; k < n / 2; ++k) {
    d[k - 1] = static_cast<double>(k) * (filtered ? g.rho(k) : 1.0) * c[k];
  }
}

/// Analytic-extension coefficients of a real sample vector (in place on c).
inline void analytic_from_real_coeffs(std::size_t n, CVec& c) {
  c[0] = c[0].real();
  for (std::size_t k = 1; k < n; ++k) c[k] = k < n / 2 ? 2.0 * c[k] : cplx(0.0);
}

}  // namespace detail

/// Traces recorded by an evaluation for inspection.
struct Traces {
  CVec G, R;            // holomorphic traces G and R
  CVec Zt;              // raw time derivative of Z (ZF) or Q (QUS) before projection
  double min_J = 0.0;
  std::size_t argmin_J = 0;
  double state_norm2 = 0.0;  // sum |c_k|^2 of Z (ZF) or Q (QUS)
};

/// Evaluates the right-hand side on a flat state vector. Layout:
///   ZF : [X (N), Phi (N), y0]
///   QUS: [Q, V, (S)] as N/2 complex coefficients each (re, im interleaved),
///        followed by Re z0, Im z0.
class Evaluator {
 public:
  explicit Evaluator(const SimState& proto)
      : grid_(proto.grid),
        form_(proto.formulation()),
        gauge_(proto.gauge),
        phys_(proto.physics) {
    phys_.validate();
    const std::size_t n = grid_.size();
    if (form_ == Formulation::QUS) {
      has_S_ = proto.qus().has_S;
      nu_ = proto.qus().nu;
    }
    for (auto* v : {&c0_, &c1_, &c2_, &c3_, &v0_, &v1_, &v2_, &v3_, &v4_, &v5_, &v6_, &v7_}) {
      v->assign(n, cplx(0.0));
    }
    nodes_.resize(n);
    for (std::size_t j = 0; j < n; ++j) nodes_[j] = grid_.node(j);
  }

  double min_J_threshold = 1e-10;

  const SpectralGrid& grid() const { return grid_; }
  Formulation formulation() const { return form_; }

  std::size_t size() const {
    const std::size_t n = grid_.size();
    return form_ == Formulation::ZF ? 2 * n + 1 : (has_S_ ? 3 : 2) * n + 2;
  }

  RVec pack(const SimState& s) const {
    const std::size_t n = grid_.size();
    RVec y(size());
    if (form_ == Formulation::ZF) {
      const auto& f = s.zf();
      std::copy(f.X.begin(), f.X.end(), y.begin());
      std::copy(f.Phi.begin(), f.Phi.end(), y.begin() + n);
      y[2 * n] = f.y0;
      return y;
    }
    const auto& f = s.qus();
    auto put = [&](const CVec& c, std::size_t off) {
      for (std::size_t k = 0; k < n / 2; ++k) {
        y[off + 2 * k] = c[k].real();
        y[off + 2 * k + 1] = c[k].imag();
      }
    };
    put(f.Q, 0);
    put(f.V, n);
    if (has_S_) put(f.S, 2 * n);
    y[size() - 2] = f.z0.real();
    y[size() - 1] = f.z0.imag();
    return y;
  }

  void unpack(const RVec& y, SimState& s) const {
    const std::size_t n = grid_.size();
    if (form_ == Formulation::ZF) {
      auto& f = s.zf();
      f.X.assign(y.begin(), y.begin() + n);
      f.Phi.assign(y.begin() + n, y.begin() + 2 * n);
      f.y0 = y[2 * n];
      return;
    }
    auto& f = s.qus();
    auto get = [&](CVec& c, std::size_t off) {
      c.assign(n, cplx(0.0));
      for (std::size_t k = 0; k < n / 2; ++k) c[k] = cplx(y[off + 2 * k], y[off + 2 * k + 1]);
    };
    get(f.Q, 0);
    get(f.V, n);
    if (has_S_) get(f.S, 2 * n);
    f.z0 = cplx(y[size() - 2], y[size() - 1]);
  }

  void operator()(double /*t*/, const RVec& y, RVec& dy) {
    if (form_ == Formulation::ZF) {
      rhs_zf(y, dy, nullptr);
    } else {
      rhs_qus(y, dy, nullptr);
    }
  }

  /// Evaluate and keep the intermediate traces.
  RVec evaluate(const RVec& y, Traces& tr) {
    RVec dy(size());
    if (form_ == Formulation::ZF) {
      rhs_zf(y, dy, &tr);
    } else {
      rhs_qus(y, dy, &tr);
    }
    return dy;
  }

  /// Multiply the stored QUS coefficients by the filter (post-step filtering).
  void filter_state(RVec& y) const {
    const std::size_t n = grid_.size();
    if (form_ == Formulation::ZF) {
      for (int f = 0; f < 2; ++f) {
        CVec c(y.begin() + f * n, y.begin() + (f + 1) * n);
        CVec h = grid_.forward(c);
        for (std::size_t k = 0; k < n; ++k) h[k] *= grid_.rho(k);
        CVec v = grid_.inverse(h);
        for (std::size_t j = 0; j < n; ++j) y[f * n + j] = v[j].real();
      }
      return;
    }
    const int nf = has_S_ ? 3 : 2;
    for (int f = 0; f < nf; ++f) {
      for (std::size_t k = 1; k < n / 2; ++k) {
        y[f * n + 2 * k] *= grid_.rho(k);
        y[f * n + 2 * k + 1] *= grid_.rho(k);
      }
    }
  }

 private:
  void check_J(const RVec& J, Traces* tr) const {
    std::size_t jm = 0;
    for (std::size_t j = 1; j < J.size(); ++j) {
      if (J[j] < J[jm] || std::isnan(J[j])) jm = j;
    }
    if (tr) {
      tr->min_J = J[jm];
      tr->argmin_J = jm;
    }
    if (!(J[jm] > min_J_threshold)) {
      throw SingularityError("Jacobian |Z_theta|^2 below threshold", jm, J[jm]);
    }
  }

  void rhs_zf(const RVec& y, RVec& dy, Traces* tr) {
    const std::size_t n = grid_.size();
    const double* X = y.data();
    const double* P = y.data() + n;
    for (std::size_t j = 0; j < n; ++j) v0_[j] = X[j];
    grid_.forward(v0_.data(), c0_.data());  // X hat
    for (std::size_t j = 0; j < n; ++j) v0_[j] = P[j];
    grid_.forward(v0_.data(), c1_.data());  // Phi hat

    // Z_theta = X_theta + i Lambda X, F_theta likewise (filtered)
    for (std::size_t k = 0; k < n; ++k) {
      const double s = (k > 0 && k < n / 2) ? 2.0 * static_cast<double>(k) * grid_.rho(k) : 0.0;
      c2_[k] = I * s * c0_[k];
      c3_[k] = I * s * c1_[k];
    }
    grid_.inverse(c2_.data(), v1_.data());  // Z_theta
    grid_.inverse(c3_.data(), v2_.data());  // F_theta

    RVec J(n), a(n);
    for (std::size_t j = 0; j < n; ++j) J[j] = std::norm(v1_[j]);
    check_J(J, tr);
    for (std::size_t j = 0; j < n; ++j) {
      a[j] = v2_[j].imag() / J[j];
      v3_[j] = a[j];
    }
    grid_.forward(v3_.data(), c2_.data());
    for (std::size_t k = 0; k < n; ++k) {
      const long kk = grid_.wavenumber(k);
      c2_[k] = (kk == 0 || grid_.is_nyquist(k)) ? cplx(0.0) : (kk > 0 ? -I : I) * c2_[k];
    }
    grid_.inverse(c2_.data(), v3_.data());  // H a (real part)

    cplx Z1 = 2.0 * c0_[1], F1 = 2.0 * c1_[1];
    const bool moving = gauge_ == Gauge::MovingCenter;
    if (moving && !(std::abs(Z1) > 0.0)) throw SingularityError("Z_w(0) vanishes", 1, 0.0);
    RVec T(n);
    for (std::size_t j = 0; j < n; ++j) {
      T[j] = v3_[j].real();
      if (moving) T[j] += -2.0 * std::imag(nodes_[j] * F1) / std::norm(Z1);
    }

    RVec p(n, 0.0);
    if (phys_.gamma != 0.0) {
      for (std::size_t k = 0; k < n; ++k) {
        const double kk = static_cast<double>(k);
        c2_[k] = (k > 0 && k < n / 2) ? -2.0 * kk * kk * grid_.rho(k) * c0_[k] : cplx(0.0);
      }
      grid_.inverse(c2_.data(), v4_.data());  // Z_theta_theta
      for (std::size_t j = 0; j < n; ++j) {
        const double xt = v1_[j].real(), lx = v1_[j].imag();
        const double xtt = v4_[j].real(), lxt = v4_[j].imag();
        p[j] = phys_.gamma * (xt * lxt - xtt * lx) / std::pow(J[j], 1.5);
      }
    }
    RVec b(n, 0.0);
    if (phys_.body.active()) {
      for (std::size_t k = 0; k < n; ++k) c2_[k] = c0_[k];
      detail::analytic_from_real_coeffs(n, c2_);
      grid_.inverse(c2_.data(), v4_.data());
      for (std::size_t j = 0; j < n; ++j) b[j] = phys_.body(v4_[j] + I * y[2 * n]);
    }

    double* Xt = dy.data();
    double* Pt = dy.data() + n;
    RVec kin(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double xt = v1_[j].real(), lx = v1_[j].imag();
      const double pt = v2_[j].real(), lp = v2_[j].imag();
      Xt[j] = lx * a[j] + xt * T[j];
      kin[j] = (pt * pt + lp * lp) / (2.0 * J[j]);
      Pt[j] = -p[j] - b[j] + (lp * lp - pt * pt) / (2.0 * J[j]) + pt * T[j] - phys_.c1;
    }
    if (phys_.pin_phi0) {
      double mean = 0.0;
      for (std::size_t j = 0; j < n; ++j) mean += Pt[j];
      mean /= static_cast<double>(n);
      for (std::size_t j = 0; j < n; ++j) Pt[j] -= mean;
    }
    dy[2 * n] = moving ? -std::imag(c1_[1] / c0_[1]) : 0.0;

    if (tr) {
      tr->state_norm2 = 0.0;
      for (std::size_t k = 0; k < n / 2; ++k) tr->state_norm2 += std::norm((k ? 2.0 : 1.0) * c0_[k]);
      tr->G.resize(n);
      tr->Zt.resize(n);
      for (std::size_t j = 0; j < n; ++j) {
        tr->G[j] = nodes_[j] * cplx(a[j], T[j]);
        tr->Zt[j] = -I * v1_[j] * cplx(a[j], T[j]);
      }
      for (std::size_t j = 0; j < n; ++j) v4_[j] = kin[j] + p[j] + b[j];
      grid_.forward(v4_.data(), c2_.data());
      detail::analytic_from_real_coeffs(n, c2_);
      tr->R.resize(n);
      grid_.inverse(c2_.data(), tr->R.data());
      for (auto& r : tr->R) r += phys_.c1;
    }
  }

  void rhs_qus(const RVec& y, RVec& dy, Traces* tr) {
    const std::size_t n = grid_.size();
    auto load = [&](CVec& c, std::size_t off) {
      std::fill(c.begin(), c.end(), cplx(0.0));
      for (std::size_t k = 0; k < n / 2; ++k) c[k] = cplx(y[off + 2 * k], y[off + 2 * k + 1]);
    };
    load(c0_, 0);   // Q hat
    load(c1_, n);   // V hat
    grid_.inverse(c0_.data(), v0_.data());  // q
    grid_.inverse(c1_.data(), v1_.data());  // v

    RVec J(n);
    for (std::size_t j = 0; j < n; ++j) J[j] = 1.0 / std::norm(v0_[j]);
    check_J(J, tr);

    // A = (I + iH) Re(conj(w v) q)
    for (std::size_t j = 0; j < n; ++j) v2_[j] = std::real(std::conj(nodes_[j] * v1_[j]) * v0_[j]);
    grid_.forward(v2_.data(), c2_.data());
    detail::analytic_from_real_coeffs(n, c2_);
    grid_.inverse(c2_.data(), v2_.data());  // A
    detail::dw_inplace(grid_, c2_, c3_, true);
    grid_.inverse(c3_.data(), v3_.data());  // A_w

    const bool moving = gauge_ == Gauge::MovingCenter;
    const cplx G0 = moving ? std::conj(c1_[0]) * c0_[0] : cplx(0.0);
    CVec G(n), Gw(n);
    for (std::size_t j = 0; j < n; ++j) {
      const cplx w = nodes_[j];
      G[j] = w * v2_[j] + G0 - w * w * std::conj(G0);
      Gw[j] = v2_[j] + w * v3_[j] - 2.0 * w * std::conj(G0);
    }

    detail::dw_inplace(grid_, c0_, c3_, true);
    grid_.inverse(c3_.data(), v4_.data());  // Q_w
    detail::dw_inplace(grid_, c1_, c3_, true);
    grid_.inverse(c3_.data(), v5_.data());  // V_w

    // Bernoulli trace
    for (std::size_t j = 0; j < n; ++j) {
      double r = 0.5 * std::norm(v1_[j]);
      if (phys_.gamma != 0.0) {
        const cplx w = nodes_[j];
        r += phys_.gamma * std::abs(v0_[j]) * std::real(1.0 - w * v4_[j] / v0_[j]);
      }
      v6_[j] = r;
    }
    if (phys_.body.active()) {
      CVec z = interface_values(y);
      for (std::size_t j = 0; j < n; ++j) v6_[j] += phys_.body(z[j]);
    }
    grid_.forward(v6_.data(), c2_.data());
    detail::analytic_from_real_coeffs(n, c2_);
    if (tr) {
      tr->R.resize(n);
      grid_.inverse(c2_.data(), tr->R.data());
      for (auto& r : tr->R) r += phys_.c1;
      tr->G = G;
    }
    detail::dw_inplace(grid_, c2_, c3_, true);
    grid_.inverse(c3_.data(), v6_.data());  // R_w

    auto store = [&](CVec& vals, std::size_t off) {
      grid_.forward(vals.data(), c3_.data());
      for (std::size_t k = 0; k < n / 2; ++k) {
        dy[off + 2 * k] = c3_[k].real();
        dy[off + 2 * k + 1] = c3_[k].imag();
      }
    };
    for (std::size_t j = 0; j < n; ++j) v7_[j] = v4_[j] * G[j] - v0_[j] * Gw[j];
    if (tr) {
      tr->Zt = v7_;
      tr->state_norm2 = 0.0;
      for (std::size_t k = 0; k < n / 2; ++k) tr->state_norm2 += std::norm(c0_[k]);
    }
    store(v7_, 0);
    for (std::size_t j = 0; j < n; ++j) v7_[j] = v5_[j] * G[j] - v0_[j] * v6_[j];
    store(v7_, n);
    if (has_S_) {
      load(c2_, 2 * n);
      detail::dw_inplace(grid_, c2_, c3_, true);
      grid_.inverse(c3_.data(), v7_.data());
      for (std::size_t j = 0; j < n; ++j) v7_[j] *= G[j];
      store(v7_, 2 * n);
    }
    const cplx z0t = moving ? std::conj(c1_[0]) : cplx(0.0);
    dy[size() - 2] = z0t.real();
    dy[size() - 1] = z0t.imag();
  }

 public:
  /// Interface samples from a flat QUS vector.
  CVec interface_values(const RVec& y) const {
    const std::size_t n = grid_.size();
    CVec c(n, cplx(0.0)), out(n);
    if (has_S_) {
      for (std::size_t k = 0; k < n / 2; ++k) c[k] = cplx(y[2 * n + 2 * k], y[2 * n + 2 * k + 1]);
      grid_.inverse(c.data(), out.data());
      for (auto& s : out) s = std::exp(-nu_ * std::log(s));
      return out;
    }
    for (std::size_t k = 0; k < n / 2; ++k) c[k] = cplx(y[2 * k], y[2 * k + 1]);
    auto q = BoundaryTrace::from_coeffs(c, grid_);
    auto z = spectral::reconstruct_Z(q, grid_);
    const cplx z0(y[size() - 2], y[size() - 1]);
    out = z.values();
    for (auto& v : out) v += z0;
    return out;
  }

 private:
  SpectralGrid grid_;
  Formulation form_;
  Gauge gauge_;
  PhysicsParams phys_;
  bool has_S_ = false;
  double nu_ = 1.0;
  CVec nodes_;
  CVec c0_, c1_, c2_, c3_;
  CVec v0_, v1_, v2_, v3_, v4_, v5_, v6_, v7_;
};

// ---------------------------------------------------------------------------
// State-level views

/// Interface samples Z(theta_j).
inline CVec interface(const SimState& s) {
  const auto& g = s.grid;
  const std::size_t n = g.size();
  if (s.formulation() == Formulation::ZF) {
    CVec c = g.forward_real(s.zf().X);
    detail::analytic_from_real_coeffs(n, c);
    CVec z = g.inverse(c);
    for (auto& v : z) v += I * s.zf().y0;
    return z;
  }
  Evaluator ev(s);
  return ev.interface_values(ev.pack(s));
}

/// Analytic coefficients of Z (index k < N/2; Z(0) at index 0).
inline CVec interface_coeffs(const SimState& s) {
  const auto& g = s.grid;
  if (s.formulation() == Formulation::ZF) {
    CVec c = g.forward_real(s.zf().X);
    detail::analytic_from_real_coeffs(g.size(), c);
    c[0] += I * s.zf().y0;
    return c;
  }
  return g.forward(interface(s));
}

/// Complex potential samples F (ZF) with Im F(0) = 0.
inline CVec potential_values(const SimState& s) {
  const auto& g = s.grid;
  if (s.formulation() == Formulation::ZF) {
    CVec c = g.forward_real(s.zf().Phi);
    detail::analytic_from_real_coeffs(g.size(), c);
    return g.inverse(c);
  }
  // F_w = V / Q, F(0) = 0
  const auto& f = s.qus();
  CVec q = g.inverse(f.Q), v = g.inverse(f.V), fw(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) fw[j] = v[j] / q[j];
  CVec c = g.forward(fw);
  return g.inverse(spectral::primitive_coeffs(c, g.size()));
}

/// Conjugate velocity samples conj(U) = F_w / Z_w.
inline CVec velocity(const SimState& s) {
  const auto& g = s.grid;
  const std::size_t n = g.size();
  if (s.formulation() == Formulation::QUS) return g.inverse(s.qus().V);
  CVec zc = g.forward_real(s.zf().X), fc = g.forward_real(s.zf().Phi);
  CVec dz(n, cplx(0.0)), df(n, cplx(0.0));
  for (std::size_t k = 1; k < n / 2; ++k) {
    dz[k - 1] = 2.0 * static_cast<double>(k) * zc[k];
    df[k - 1] = 2.0 * static_cast<double>(k) * fc[k];
  }
  CVec zw = g.inverse(dz), fw = g.inverse(df), u(n);
  for (std::size_t j = 0; j < n; ++j) u[j] = fw[j] / zw[j];
  return u;
}

// ---------------------------------------------------------------------------
// Operations on states

inline RVec curvature_pressure(std::span<const double> X, const SpectralGrid& grid, double gamma) {
  grid.check_size(X.size(), "curvature_pressure");
  const std::size_t n = grid.size();
  CVec c = grid.forward_real(X), d1(n, cplx(0.0)), d2(n, cplx(0.0));
  for (std::size_t k = 1; k < n / 2; ++k) {
    const double kk = static_cast<double>(k);
    d1[k] = 2.0 * I * kk * grid.rho(k) * c[k];
    d2[k] = -2.0 * kk * kk * grid.rho(k) * c[k];
  }
  CVec zt = grid.inverse(d1), ztt = grid.inverse(d2);
  RVec p(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double J = std::norm(zt[j]);
    if (!(J > 1e-300)) throw SingularityError("Jacobian vanishes", j, J);
    p[j] = gamma * (zt[j].real() * ztt[j].imag() - ztt[j].real() * zt[j].imag()) / std::pow(J, 1.5);
  }
  return p;
}

inline Traces traces(const SimState& s) {
  Evaluator ev(s);
  Traces tr;
  ev.evaluate(ev.pack(s), tr);
  return tr;
}

inline BoundaryTrace compute_G(const SimState& s) {
  return BoundaryTrace::from_values(traces(s).G, s.grid);
}

inline BoundaryTrace compute_R(const SimState& s) {
  return BoundaryTrace::from_values(traces(s).R, s.grid);
}

inline std::pair<RVec, RVec> rhs_zf(const SimState& s) {
  if (s.formulation() != Formulation::ZF) throw InvalidInput("rhs_zf needs a ZF state");
  Evaluator ev(s);
  RVec dy(ev.size());
  ev(s.t, ev.pack(s), dy);
  const std::size_t n = s.grid.size();
  return {RVec(dy.begin(), dy.begin() + n), RVec(dy.begin() + n, dy.begin() + 2 * n)};
}

inline std::tuple<BoundaryTrace, BoundaryTrace, BoundaryTrace> rhs_qus(const SimState& s) {
  if (s.formulation() != Formulation::QUS) throw InvalidInput("rhs_qus needs a QUS state");
  Evaluator ev(s);
  RVec dy(ev.size());
  ev(s.t, ev.pack(s), dy);
  const std::size_t n = s.grid.size();
  auto get = [&](std::size_t off) {
    CVec c(n, cplx(0.0));
    for (std::size_t k = 0; k < n / 2; ++k) c[k] = cplx(dy[off + 2 * k], dy[off + 2 * k + 1]);
    return BoundaryTrace::from_coeffs(c, s.grid);
  };
  BoundaryTrace st = s.qus().has_S ? get(2 * n) : BoundaryTrace::from_coeffs(CVec(n, 0.0), s.grid);
  return {get(0), get(n), st};
}

// ---------------------------------------------------------------------------
// Initial data

namespace detail {

inline CVec analytic_coeffs_of(const SpectralGrid& g, const CVec& values) {
  CVec c = g.forward(values);
  for (std::size_t k = g.half(); k < g.size(); ++k) c[k] = 0.0;
  return c;
}

}  // namespace detail

/// State from analytic boundary traces of Z and F.
inline SimState from_traces(const SpectralGrid& g, Formulation form, const CVec& Z, const CVec& F) {
  g.check_size(Z.size(), "initial Z");
  g.check_size(F.size(), "initial F");
  const std::size_t n = g.size();
  SimState s(g);
  CVec zc = detail::analytic_coeffs_of(g, Z), fc = detail::analytic_coeffs_of(g, F);
  if (form == Formulation::ZF) {
    ZFFields f;
    f.X.resize(n);
    f.Phi.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      f.X[j] = Z[j].real();
      f.Phi[j] = F[j].real();
    }
    f.y0 = zc[0].imag();
    s.fields = f;
    return s;
  }
  CVec zw(n, 0.0), fw(n, 0.0);
  for (std::size_t k = 1; k < n / 2; ++k) {
    zw[k - 1] = static_cast<double>(k) * zc[k];
    fw[k - 1] = static_cast<double>(k) * fc[k];
  }
  CVec zwv = g.inverse(zw), fwv = g.inverse(fw), q(n), v(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (!(std::abs(zwv[j]) > 0.0)) throw SingularityError("Z_w vanishes on the circle", j, 0.0);
    q[j] = 1.0 / zwv[j];
    v[j] = fwv[j] * q[j];
  }
  QUSFields f;
  f.Q = detail::analytic_coeffs_of(g, q);
  f.V = detail::analytic_coeffs_of(g, v);
  f.S.assign(n, 0.0);
  f.z0 = zc[0];
  s.fields = f;
  return s;
}

/// Convert between formulations through the physical traces.
inline SimState convert(const SimState& s, Formulation to) {
  if (s.formulation() == to) return s;
  if (to == Formulation::QUS) {
    SimState out = from_traces(s.grid, to, interface(s), potential_values(s));
    out.t = s.t;
    out.gauge = s.gauge;
    out.physics = s.physics;
    out.preset = s.preset;
    return out;
  }
  if (s.qus().has_S) throw InvalidInput("states carrying S cannot be converted to ZF");
  SimState out = from_traces(s.grid, to, interface(s), potential_values(s));
  out.t = s.t;
  out.gauge = s.gauge;
  out.physics = s.physics;
  out.preset = s.preset;
  return out;
}

/// Unit disk with F = amplitude * w^2 (Dirichlet ellipse starting from a circle).
inline SimState ellipse_test(const SpectralGrid& g, Formulation form, double amplitude = 0.5) {
  CVec Z(g.size()), F(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    Z[j] = g.node(j);
    F[j] = amplitude * Z[j] * Z[j];
  }
  auto s = from_traces(g, form, Z, F);
  s.preset = "ellipse-test";
  return s;
}

/// Unit disk with F = -0.15 w^5.
inline SimState fivefold(const SpectralGrid& g, Formulation form, double amplitude = -0.15) {
  CVec Z(g.size()), F(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    Z[j] = g.node(j);
    F[j] = amplitude * std::pow(Z[j], 5);
  }
  auto s = from_traces(g, form, Z, F);
  s.preset = "fivefold";
  return s;
}

/// Z = zeta_r(w), Re F = ((Re Z + 1)/2)^5.
inline SimState nose(const SpectralGrid& g, Formulation form, double compression = 250.0) {
  const auto m = maps::MobiusParams::from_compression(compression);
  CVec Z(g.size());
  RVec a(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    Z[j] = maps::mobius(g.node(j), m);
    a[j] = std::pow(0.5 * (Z[j].real() + 1.0), 5);
  }
  auto F = spectral::analytic_extension(a, g).values();
  auto s = from_traces(g, form, Z, F);
  s.preset = "nose";
  return s;
}

struct WedgeSetup {
  maps::WedgeParams wedge;
  double alpha_nu = 1.0;       // alpha * nu
  double compression = 20000;  // grid compression c
  double t0 = 1.0;
};

/// Smoothed wedge in the QUS variables with S = zeta_+^{-1} = Z^{-1/nu}.
inline SimState wedge(const SpectralGrid& g, const WedgeSetup& w) {
  const auto m = maps::MobiusParams::from_compression(w.compression);
  const auto ch = maps::wedge_chain(g, w.wedge, m);
  const std::size_t n = g.size();
  const double nu = w.wedge.nu();
  const double alpha = w.alpha_nu / nu;
  CVec q(n), v(n), sv(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(std::abs(ch.Z[j]))) {
      throw DomainError("wedge interface is unbounded; enable the far-field dimple term");
    }
    q[j] = 1.0 / ch.Zw[j];
    v[j] = alpha * std::exp(nu * (alpha - 1.0) * ch.log_zp[j]);
    sv[j] = std::exp(-ch.log_zp[j]);
  }
  SimState s(g);
  QUSFields f;
  f.Q = detail::analytic_coeffs_of(g, q);
  f.V = detail::analytic_coeffs_of(g, v);
  f.S = detail::analytic_coeffs_of(g, sv);
  f.has_S = true;
  f.nu = nu;
  s.fields = f;
  s.t = w.t0;
  s.preset = "wedge";
  s.experimental = !(std::abs(w.alpha_nu - 1.0) < 1e-12 || std::abs(w.alpha_nu - 0.75) < 1e-12);
  return s;
}

/// Polynomial data Z = sum z_k w^k, F = sum f_k w^k (modes given as (k, coefficient)).
inline SimState custom(const SpectralGrid& g, Formulation form,
                       const std::vector<std::pair<int, cplx>>& z_modes,
                       const std::vector<std::pair<int, cplx>>& f_modes) {
  CVec Z(g.size(), 0.0), F(g.size(), 0.0);
  for (const auto& [k, c] : z_modes) {
    if (k < 0 || static_cast<std::size_t>(k) >= g.half()) throw InvalidInput("mode index out of range");
  }
  for (const auto& [k, c] : f_modes) {
    if (k < 0 || static_cast<std::size_t>(k) >= g.half()) throw InvalidInput("mode index out of range");
  }
  for (std::size_t j = 0; j < g.size(); ++j) {
    const cplx w = g.node(j);
    for (const auto& [k, c] : z_modes) Z[j] += c * std::pow(w, k);
    for (const auto& [k, c] : f_modes) F[j] += c * std::pow(w, k);
  }
  auto s = from_traces(g, form, Z, F);
  s.preset = "custom";
  return s;
}

}  // namespace freesurf::dynamics
