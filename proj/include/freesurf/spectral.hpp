#pragma once

// Fourier machinery on the uniform circle grid theta_j = j*h, h = 2*pi/N.
//
// Coefficient convention: c_k = (1/N) sum_j x_j exp(-i k theta_j), so that
// x_j = sum_k c_k exp(i k theta_j). Index j of a coefficient array holds
// wavenumber k = j for j < N/2, k = j - N for j > N/2; j = N/2 is the
// Nyquist mode, which the Hilbert transform and every derivative annihilate.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <utility>

#include "freesurf/common.hpp"

namespace freesurf::spectral {

/// Exponential filter rho(xi) = exp(-strength * (|xi|/pi)^order), xi = h*k.
/// strength = 0 disables filtering.
struct FilterSpec {
  double strength = 10.0;
  int order = 15;

  double operator()(double xi) const {
    if (strength == 0.0) return 1.0;
    return std::exp(-strength * std::pow(std::abs(xi) / pi, order));
  }
};

namespace detail {

// FFTW planning is not thread safe; execution on new arrays is. Plans are
// created once per size and live for the whole process.
class PlanCache {
 public:
  struct Plans {
    fftw_plan forward;
    fftw_plan backward;
  };

  static const Plans& get(std::size_t n) {
    static std::mutex mutex;
    static std::map<std::size_t, Plans> plans;
    std::lock_guard lock(mutex);
    auto it = plans.find(n);
    if (it != plans.end()) return it->second;
    auto* in = fftw_alloc_complex(n);
    auto* out = fftw_alloc_complex(n);
    const int ni = static_cast<int>(n);
    constexpr unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    Plans p{fftw_plan_dft_1d(ni, in, out, FFTW_FORWARD, flags),
            fftw_plan_dft_1d(ni, in, out, FFTW_BACKWARD, flags)};
    fftw_free(in);
    fftw_free(out);
    return plans.emplace(n, p).first->second;
  }
};

inline fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }
inline fftw_complex* as_fftw(const cplx* p) {
  return reinterpret_cast<fftw_complex*>(const_cast<cplx*>(p));
}

}  // namespace detail

class SpectralGrid {
 public:
  explicit SpectralGrid(std::size_t n, FilterSpec filter = {})
      : n_(n), h_(2.0 * pi / static_cast<double>(n)), filter_(filter) {
    if (n < 8 || (n & (n - 1)) != 0) {
      throw InvalidInput("grid size must be a power of two >= 8, got " + std::to_string(n));
    }
    plans_ = &detail::PlanCache::get(n);
    rho_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      rho_[j] = is_nyquist(j) ? 0.0 : filter_(h_ * static_cast<double>(std::abs(wavenumber(j))));
    }
  }

  std::size_t size() const noexcept { return n_; }
  std::size_t half() const noexcept { return n_ / 2; }
  double spacing() const noexcept { return h_; }
  double theta(std::size_t j) const noexcept { return h_ * static_cast<double>(j); }
  const FilterSpec& filter() const noexcept { return filter_; }

  long wavenumber(std::size_t j) const noexcept {
    const long jj = static_cast<long>(j);
    const long nn = static_cast<long>(n_);
    return jj <= nn / 2 ? jj : jj - nn;
  }
  bool is_nyquist(std::size_t j) const noexcept { return j == n_ / 2; }

  /// Filter value rho(h|k|) at coefficient index j (zero at Nyquist).
  double rho(std::size_t j) const noexcept { return rho_[j]; }
  std::span<const double> rho() const noexcept { return rho_; }

  /// Unit-circle node e^{i theta_j}.
  cplx node(std::size_t j) const { return std::polar(1.0, theta(j)); }

  void check_size(std::size_t n, const char* what) const {
    if (n != n_) {
      throw InvalidInput(std::string(what) + ": length " + std::to_string(n) +
                         " does not match grid size " + std::to_string(n_));
    }
  }

  void forward(const cplx* in, cplx* out) const {
    fftw_execute_dft(plans_->forward, detail::as_fftw(in), detail::as_fftw(out));
    const double s = 1.0 / static_cast<double>(n_);
    for (std::size_t j = 0; j < n_; ++j) out[j] *= s;
  }
  void inverse(const cplx* in, cplx* out) const {
    fftw_execute_dft(plans_->backward, detail::as_fftw(in), detail::as_fftw(out));
  }

  CVec forward(std::span<const cplx> in) const {
    check_size(in.size(), "forward transform");
    CVec out(n_);
    forward(in.data(), out.data());
    return out;
  }
  CVec inverse(std::span<const cplx> in) const {
    check_size(in.size(), "inverse transform");
    CVec out(n_);
    inverse(in.data(), out.data());
    return out;
  }
  CVec forward_real(std::span<const double> in) const {
    check_size(in.size(), "forward transform");
    CVec tmp(in.begin(), in.end());
    CVec out(n_);
    forward(tmp.data(), out.data());
    return out;
  }

 private:
  std::size_t n_;
  double h_;
  FilterSpec filter_;
  const detail::PlanCache::Plans* plans_ = nullptr;
  RVec rho_;
};

/// Samples of a complex boundary function together with its DFT coefficients.
/// Both representations are kept in sync at construction.
class BoundaryTrace {
 public:
  BoundaryTrace() = default;

  static BoundaryTrace from_values(CVec values, const SpectralGrid& grid) {
    grid.check_size(values.size(), "BoundaryTrace");
    BoundaryTrace t;
    t.coeffs_ = grid.forward(values);
    t.values_ = std::move(values);
    return t;
  }
  static BoundaryTrace from_coeffs(CVec coeffs, const SpectralGrid& grid) {
    grid.check_size(coeffs.size(), "BoundaryTrace");
    BoundaryTrace t;
    t.values_ = grid.inverse(coeffs);
    t.coeffs_ = std::move(coeffs);
    return t;
  }

  /// Trace of a function holomorphic in the disk. Throws when the negative
  /// half of the spectrum (Nyquist included) exceeds `tol` relative to the
  /// largest coefficient.
  static BoundaryTrace analytic_from_values(CVec values, const SpectralGrid& grid,
                                            double tol = 1e-12) {
    auto t = from_values(std::move(values), grid);
    const double r = t.negative_mode_ratio();
    if (r > tol) {
      throw InvalidInput("trace is not analytic: negative-mode ratio " + std::to_string(r));
    }
    t.analytic_ = true;
    return t;
  }

  /// Drop negative modes and Nyquist, giving the analytic part.
  static BoundaryTrace project_analytic(CVec values, const SpectralGrid& grid) {
    grid.check_size(values.size(), "BoundaryTrace");
    CVec c = grid.forward(values);
    for (std::size_t j = grid.half(); j < grid.size(); ++j) c[j] = 0.0;
    auto t = from_coeffs(std::move(c), grid);
    t.analytic_ = true;
    return t;
  }

  const CVec& values() const noexcept { return values_; }
  const CVec& coeffs() const noexcept { return coeffs_; }
  bool analytic() const noexcept { return analytic_; }
  std::size_t size() const noexcept { return values_.size(); }

  /// max_{k<0 or Nyquist} |c_k| / max_k |c_k| (0 for the zero trace).
  double negative_mode_ratio() const {
    const std::size_t n = coeffs_.size();
    double neg = 0.0, all = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double a = std::abs(coeffs_[j]);
      all = std::max(all, a);
      if (j >= n / 2) neg = std::max(neg, a);
    }
    return all > 0.0 ? neg / all : 0.0;
  }

 private:
  CVec values_;
  CVec coeffs_;
  bool analytic_ = false;
};

/// Negative-mode energy fraction sum_{k<0, Nyquist}|c_k|^2 / sum_k |c_k|^2.
inline double negative_energy_fraction(std::span<const cplx> coeffs) {
  const std::size_t n = coeffs.size();
  double neg = 0.0, all = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double e = std::norm(coeffs[j]);
    all += e;
    if (j >= n / 2) neg += e;
  }
  return all > 0.0 ? neg / all : 0.0;
}

/// Periodic Hilbert transform, Fourier symbol -i sgn(k).
inline RVec hilbert(std::span<const double> x, const SpectralGrid& grid) {
  grid.check_size(x.size(), "hilbert");
  CVec c = grid.forward_real(x);
  const std::size_t n = grid.size();
  for (std::size_t j = 0; j < n; ++j) {
    const long k = grid.wavenumber(j);
    if (k == 0 || grid.is_nyquist(j)) {
      c[j] = 0.0;
    } else {
      c[j] *= k > 0 ? -I : I;
    }
  }
  CVec v(n);
  grid.inverse(c.data(), v.data());
  RVec out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = v[j].real();
  return out;
}

/// Filtered theta-derivative, symbol i k rho(h k).
inline CVec filtered_derivative(std::span<const cplx> x, const SpectralGrid& grid) {
  grid.check_size(x.size(), "filtered_derivative");
  const std::size_t n = grid.size();
  CVec c(n);
  grid.forward(x.data(), c.data());
  for (std::size_t j = 0; j < n; ++j) {
    c[j] *= I * static_cast<double>(grid.wavenumber(j)) * grid.rho(j);
  }
  CVec out(n);
  grid.inverse(c.data(), out.data());
  return out;
}

inline RVec filtered_derivative(std::span<const double> x, const SpectralGrid& grid) {
  CVec z(x.begin(), x.end());
  CVec d = filtered_derivative(std::span<const cplx>(z), grid);
  RVec out(d.size());
  for (std::size_t j = 0; j < d.size(); ++j) out[j] = d[j].real();
  return out;
}

/// Coefficients of (I + iH)a: G_0 = a_0, G_k = 2 a_k (0<k<N/2), G_k = 0 otherwise.
inline CVec analytic_coeffs(std::span<const double> a, const SpectralGrid& grid) {
  CVec c = grid.forward_real(a);
  const std::size_t n = grid.size();
  for (std::size_t j = 1; j < n; ++j) {
    c[j] = j < n / 2 ? 2.0 * c[j] : cplx(0.0);
  }
  c[0] = c[0].real();
  return c;
}

/// Trace of the holomorphic function whose real part on the circle is `a`
/// (imaginary part of the mean fixed at zero).
inline BoundaryTrace analytic_extension(std::span<const double> a, const SpectralGrid& grid) {
  grid.check_size(a.size(), "analytic_extension");
  auto t = BoundaryTrace::from_coeffs(analytic_coeffs(a, grid), grid);
  return BoundaryTrace::project_analytic(t.values(), grid);
}

/// d/dw of an analytic trace on the circle, filtered: coefficient k-1 of the
/// result is k rho(hk) times coefficient k of the input, 1 <= k < N/2.
inline CVec dw_coeffs(std::span<const cplx> coeffs, const SpectralGrid& grid) {
  const std::size_t n = grid.size();
  CVec d(n, cplx(0.0));
  for (std::size_t k = 1; k < n / 2; ++k) {
    d[k - 1] = static_cast<double>(k) * grid.rho(k) * coeffs[k];
  }
  return d;
}

inline BoundaryTrace derivative_w(const BoundaryTrace& f, const SpectralGrid& grid) {
  grid.check_size(f.size(), "derivative_w");
  auto t = BoundaryTrace::from_coeffs(dw_coeffs(f.coeffs(), grid), grid);
  return BoundaryTrace::project_analytic(t.values(), grid);
}

/// Primitive of an analytic trace vanishing at w = 0:
/// Z_j = sum_{k=1}^{N/2-1} (c_{k-1}/k) e^{i k theta_j}, c the coefficients of f.
inline CVec primitive_coeffs(std::span<const cplx> c, std::size_t n) {
  CVec z(n, cplx(0.0));
  for (std::size_t k = 1; k < n / 2; ++k) z[k] = c[k - 1] / static_cast<double>(k);
  return z;
}

/// Interface position from Q = 1/Z_w, normalized by Z(0) = 0.
inline BoundaryTrace reconstruct_Z(const BoundaryTrace& q, const SpectralGrid& grid) {
  grid.check_size(q.size(), "reconstruct_Z");
  const std::size_t n = grid.size();
  std::size_t argmin = 0;
  double qmin = std::abs(q.values()[0]);
  for (std::size_t j = 1; j < n; ++j) {
    const double a = std::abs(q.values()[j]);
    if (a < qmin) {
      qmin = a;
      argmin = j;
    }
  }
  if (!(qmin > 0.0) || !std::isfinite(qmin)) {
    throw SingularityError("reconstruct_Z: Q vanishes at a grid node", argmin, qmin);
  }
  CVec inv(n);
  for (std::size_t j = 0; j < n; ++j) inv[j] = 1.0 / q.values()[j];
  CVec c = grid.forward(inv);
  auto t = BoundaryTrace::from_coeffs(primitive_coeffs(c, n), grid);
  return BoundaryTrace::project_analytic(t.values(), grid);
}

}  // namespace freesurf::spectral
