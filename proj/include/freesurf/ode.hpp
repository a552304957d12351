#pragma once

// Dormand-Prince 5(4) pair with FSAL and elementary step-size control.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>

#include "freesurf/common.hpp"

namespace freesurf::ode {

struct StepControl {
  double rel_tol = 1e-9;
  double abs_tol = 1e-11;
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 0.0;  // 0 selects automatically
  std::size_t max_steps = 50'000'000;
  double safety = 0.9;
  double min_factor = 0.2;
  double max_factor = 5.0;
  bool max_norm = false;  // error norm: max instead of RMS

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw InvalidInput("tolerances must be positive");
    if (!(max_step > 0.0)) throw InvalidInput("max_step must be positive");
  }
};

struct StepStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evals = 0;
  double min_step = std::numeric_limits<double>::infinity();
  double max_step = 0.0;
  double last_step = 0.0;
};

enum class StepOutcome { Accepted, Underflow };

/// Explicit embedded Runge-Kutta integrator on flat real vectors.
class DormandPrince {
 public:
  using Rhs = std::function<void(double, const RVec&, RVec&)>;

  DormandPrince(Rhs f, StepControl ctl) : f_(std::move(f)), ctl_(ctl) { ctl_.validate(); }

  void reset(double t, RVec y) {
    t_ = t;
    y_ = std::move(y);
    const std::size_t n = y_.size();
    for (auto* v : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &tmp_, &ynew_}) v->assign(n, 0.0);
    eval(t_, y_, k1_);
    h_ = ctl_.initial_step > 0.0 ? ctl_.initial_step : 0.0;
  }

  double t() const noexcept { return t_; }
  const RVec& y() const noexcept { return y_; }
  const StepStats& stats() const noexcept { return stats_; }
  double next_step() const noexcept { return h_; }
  /// Message of the last right-hand-side failure seen in a trial stage.
  const std::string& last_failure() const noexcept { return last_failure_; }

  /// Replace the state in place (e.g. a post-step filter); the stored
  /// derivative is refreshed.
  template <class Fn>
  void modify(Fn&& fn) {
    fn(y_);
    eval(t_, y_, k1_);
  }

  /// Take one accepted step that does not pass t_stop (> t()).
  StepOutcome step(double t_stop) {
    const double span = t_stop - t_;
    if (h_ <= 0.0) h_ = initial_step(span);
    const double h_floor = 1e-14 * std::max(std::abs(t_stop), std::abs(span));
    while (true) {
      double h = std::min({h_, ctl_.max_step, span});
      bool clipped = h >= span;
      if (clipped) h = span;
      if (h < h_floor && !clipped) return StepOutcome::Underflow;
      double err;
      try {
        err = attempt(h);
      } catch (const SingularityError& e) {
        // a trial stage left the admissible set; treat as a failed step
        last_failure_ = e.what();
        err = std::numeric_limits<double>::infinity();
      }
      if (err <= 1.0 && std::isfinite(err)) {
        t_ = clipped ? t_stop : t_ + h;
        std::swap(y_, ynew_);
        std::swap(k1_, k7_);
        ++stats_.accepted;
        stats_.min_step = std::min(stats_.min_step, h);
        stats_.max_step = std::max(stats_.max_step, h);
        stats_.last_step = h;
        const double fac = err == 0.0 ? ctl_.max_factor
                                      : std::clamp(ctl_.safety * std::pow(err, -0.2),
                                                   ctl_.min_factor, ctl_.max_factor);
        // do not let an output clip shrink the natural step
        h_ = clipped ? std::max(h_, h * fac) : h * fac;
        return StepOutcome::Accepted;
      }
      ++stats_.rejected;
      const double fac = std::isfinite(err)
                             ? std::clamp(ctl_.safety * std::pow(err, -0.2), ctl_.min_factor, 1.0)
                             : ctl_.min_factor;
      h_ = h * fac;
      if (h_ < h_floor) return StepOutcome::Underflow;
    }
  }

 private:
  void eval(double t, const RVec& y, RVec& dy) {
    f_(t, y, dy);
    ++stats_.rhs_evals;
  }

  double initial_step(double span) {
    // Hairer, Norsett & Wanner, starting step heuristic
    const std::size_t n = y_.size();
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sc = ctl_.abs_tol + ctl_.rel_tol * std::abs(y_[i]);
      d0 += std::pow(y_[i] / sc, 2);
      d1 += std::pow(k1_[i] / sc, 2);
    }
    d0 = std::sqrt(d0 / n);
    d1 = std::sqrt(d1 / n);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min({h0, span, ctl_.max_step});
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y_[i] + h0 * k1_[i];
    eval(t_ + h0, tmp_, k2_);
    double d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sc = ctl_.abs_tol + ctl_.rel_tol * std::abs(y_[i]);
      d2 += std::pow((k2_[i] - k1_[i]) / sc, 2);
    }
    d2 = std::sqrt(d2 / n) / h0;
    const double m = std::max(d1, d2);
    const double h1 = m <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / m, 0.2);
    return std::min({100.0 * h0, h1, span, ctl_.max_step});
  }

  double attempt(double h) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    const std::size_t n = y_.size();
    const RVec& y = y_;
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * a21 * k1_[i];
    eval(t_ + c2 * h, tmp_, k2_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * (a31 * k1_[i] + a32 * k2_[i]);
    eval(t_ + c3 * h, tmp_, k3_);
    for (std::size_t i = 0; i < n; ++i)
      tmp_[i] = y[i] + h * (a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]);
    eval(t_ + c4 * h, tmp_, k4_);
    for (std::size_t i = 0; i < n; ++i)
      tmp_[i] = y[i] + h * (a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
    eval(t_ + c5 * h, tmp_, k5_);
    for (std::size_t i = 0; i < n; ++i)
      tmp_[i] = y[i] + h * (a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] +
                            a65 * k5_[i]);
    eval(t_ + h, tmp_, k6_);
    for (std::size_t i = 0; i < n; ++i)
      ynew_[i] = y[i] + h * (b1 * k1_[i] + b3 * k3_[i] + b4 * k4_[i] + b5 * k5_[i] + b6 * k6_[i]);
    eval(t_ + h, ynew_, k7_);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] + e6 * k6_[i] +
                            e7 * k7_[i]);
      const double sc = ctl_.abs_tol + ctl_.rel_tol * std::max(std::abs(y[i]), std::abs(ynew_[i]));
      if (ctl_.max_norm) {
        err = std::max(err, std::abs(e / sc));
      } else {
        err += (e / sc) * (e / sc);
      }
    }
    return ctl_.max_norm ? err : std::sqrt(err / static_cast<double>(n));
  }

  Rhs f_;
  StepControl ctl_;
  double t_ = 0.0;
  double h_ = 0.0;
  RVec y_, k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, ynew_;
  StepStats stats_;
  std::string last_failure_;
};

/// Integrate from t0 to t1, calling observer(t, y) after every accepted step.
/// Returns false on step underflow. The observer may return false to stop.
template <class Observer>
bool integrate(DormandPrince::Rhs f, double t0, RVec y0, double t1, const StepControl& ctl,
               Observer&& observer, RVec* y_out = nullptr, StepStats* stats = nullptr) {
  DormandPrince dp(std::move(f), ctl);
  dp.reset(t0, std::move(y0));
  bool ok = true;
  while (dp.t() < t1) {
    if (dp.stats().accepted >= ctl.max_steps || dp.step(t1) != StepOutcome::Accepted) {
      ok = false;
      break;
    }
    if (!observer(dp.t(), dp.y())) break;
  }
  if (y_out) *y_out = dp.y();
  if (stats) *stats = dp.stats();
  return ok;
}

inline RVec integrate_to(DormandPrince::Rhs f, double t0, RVec y0, double t1,
                         const StepControl& ctl) {
  RVec y;
  if (!integrate(std::move(f), t0, std::move(y0), t1, ctl, [](double, const RVec&) { return true; },
                 &y)) {
    throw Error("step size underflow");
  }
  return y;
}

}  // namespace freesurf::ode
