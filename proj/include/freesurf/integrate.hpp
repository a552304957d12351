#pragma once

// Adaptive time integration of a SimState with event detection.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "freesurf/common.hpp"
#include "freesurf/diagnostics.hpp"
#include "freesurf/dynamics.hpp"
#include "freesurf/geometry.hpp"
#include "freesurf/ode.hpp"

namespace freesurf::integrate {

using dynamics::Formulation;
using dynamics::SimState;

struct EventThresholds {
  double min_J = 1e-10;
  double neg_mode_energy = 1e-8;
  std::optional<double> min_boundary_gap;  // default: 5 x median initial spacing
};

struct IntegratorConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-11;
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 0.0;
  std::size_t max_steps = 10'000'000;
  bool max_norm = false;  // step error measured in max norm instead of RMS
  std::optional<bool> post_step_filter;  // default: on for QUS, off for ZF
  EventThresholds thresholds;
  bool splash_terminal = false;    // self-intersection stops the run
  bool gap_terminal = false;       // small boundary gap stops the run
  bool neg_mode_terminal = true;   // analyticity loss stops the run
  bool check_geometry = true;      // run the gap / self-intersection checks
  std::size_t event_interval = 1;  // accepted steps between event checks
  std::vector<double> output_times;  // frames at these times (plus start and end)
  double output_interval = 0.0;      // or on this cadence when > 0

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw InvalidInput("tolerances must be positive");
    if (!(max_step > 0.0)) throw InvalidInput("max_step must be positive");
    if (!(thresholds.min_J >= 0.0) || !(thresholds.neg_mode_energy > 0.0)) {
      throw InvalidInput("event thresholds must be non-negative");
    }
    if (output_interval < 0.0) throw InvalidInput("output interval must be non-negative");
    if (event_interval == 0) throw InvalidInput("event interval must be positive");
  }

  bool filter_for(Formulation f) const {
    return post_step_filter.value_or(f == Formulation::QUS);
  }
};

enum class EventKind { MinJ, NegativeModes, BoundaryGap, SelfIntersection };

inline const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::MinJ: return "min_J";
    case EventKind::NegativeModes: return "neg_mode_energy";
    case EventKind::BoundaryGap: return "boundary_gap";
    case EventKind::SelfIntersection: return "self_intersection";
  }
  return "?";
}

struct Event {
  EventKind kind;
  double t = 0.0;
  double value = 0.0;
  std::size_t index = 0;
  std::size_t index2 = 0;
  bool terminal = false;
};

struct EventSet {
  std::vector<Event> events;
  double min_J = 0.0;
  std::size_t argmin_J = 0;
  double neg_mode_energy = 0.0;
  double min_gap = std::numeric_limits<double>::infinity();

  bool empty() const { return events.empty(); }
  bool terminal() const {
    return std::any_of(events.begin(), events.end(), [](const Event& e) { return e.terminal; });
  }
  bool has(EventKind k) const {
    return std::any_of(events.begin(), events.end(), [&](const Event& e) { return e.kind == k; });
  }
};

/// Fraction of spectral energy of the unprojected rate (Z_t for ZF, Q_t for
/// QUS) that falls on negative wavenumbers. The denominator has a floor of
/// (1e-12)^2 times the state energy so that vanishing rates read as zero.
inline double negative_mode_energy(const dynamics::Traces& tr, const spectral::SpectralGrid& g) {
  const CVec c = g.forward(tr.Zt);
  double neg = 0.0, all = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    all += std::norm(c[j]);
    if (j >= g.half()) neg += std::norm(c[j]);
  }
  const double den = std::max(all, 1e-24 * tr.state_norm2);
  return den > 0.0 ? neg / den : 0.0;
}

/// Inspect a state for Jacobian degeneration, aliasing into negative modes
/// and boundary near-contact.
inline EventSet detect_events(const SimState& s, const EventThresholds& th = {},
                              const IntegratorConfig* flags = nullptr,
                              std::optional<double> gap_threshold = std::nullopt) {
  EventSet es;
  dynamics::Evaluator ev(s);
  ev.min_J_threshold = -1.0;
  dynamics::Traces tr;
  ev.evaluate(ev.pack(s), tr);
  es.min_J = tr.min_J;
  es.argmin_J = tr.argmin_J;
  if (!(tr.min_J > th.min_J)) {
    es.events.push_back({EventKind::MinJ, s.t, tr.min_J, tr.argmin_J, 0, true});
  }
  es.neg_mode_energy = negative_mode_energy(tr, s.grid);
  if (!(es.neg_mode_energy <= th.neg_mode_energy)) {
    es.events.push_back({EventKind::NegativeModes, s.t, es.neg_mode_energy, 0, 0,
                         flags ? flags->neg_mode_terminal : true});
  }
  if (!flags || flags->check_geometry) {
    const CVec Z = dynamics::interface(s);
    const double gap_thr =
        gap_threshold.value_or(th.min_boundary_gap.value_or(5.0 * geometry::median_spacing(Z)));
    const auto gap = geometry::min_nonlocal_gap(Z, gap_thr);
    es.min_gap = gap.gap;
    if (gap.gap < gap_thr) {
      es.events.push_back({EventKind::BoundaryGap, s.t, gap.gap, gap.i, gap.j,
                           flags ? flags->gap_terminal : false});
    }
    if (auto x = geometry::self_intersection(Z)) {
      es.events.push_back({EventKind::SelfIntersection, s.t, 0.0, x->first, x->second,
                           flags ? flags->splash_terminal : false});
    }
  }
  return es;
}

struct FrameDiagnostics {
  double area = 0.0;
  double energy = 0.0;
  double minJ = 0.0;
  double maxCurvature = 0.0;
  cplx Z0 = 0.0;
  cplx Z1 = 0.0;
};

struct Frame {
  double t = 0.0;
  CVec Z;
  CVec U;  // conj(U) samples
  FrameDiagnostics diagnostics;
  diagnostics::DiagnosticRecord record;
};

/// Frame diagnostics from the stored samples.
inline FrameDiagnostics frame_diagnostics(const CVec& Z, const CVec& U,
                                          const spectral::SpectralGrid& g,
                                          const dynamics::PhysicsParams& phys, bool bounded) {
  const auto r = diagnostics::sample_diagnostics(0.0, Z, U, g, phys, bounded);
  const CVec c = g.forward(Z);
  return {r.area, r.total_energy, r.minJ, r.maxCurvature, c[0], c[1]};
}

using FrameSink = std::function<void(const Frame&)>;

enum class Termination { ReachedEnd, Event, StepUnderflow, MaxSteps, Singular };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::ReachedEnd: return "reached-t-end";
    case Termination::Event: return "event";
    case Termination::StepUnderflow: return "step-underflow";
    case Termination::MaxSteps: return "max-steps";
    case Termination::Singular: return "singular";
  }
  return "?";
}

struct TerminationReport {
  Termination reason = Termination::ReachedEnd;
  double t_final = 0.0;
  ode::StepStats stats;
  std::vector<Event> events;
  std::string message;
  std::size_t frames = 0;
  double wall_seconds = 0.0;
};

namespace detail {

inline std::vector<double> output_schedule(double t0, double t_end, const IntegratorConfig& cfg) {
  std::vector<double> ts;
  for (double t : cfg.output_times) {
    if (t > t0 && t < t_end) ts.push_back(t);
  }
  if (cfg.output_interval > 0.0) {
    for (long k = 1;; ++k) {
      const double t = t0 + static_cast<double>(k) * cfg.output_interval;
      if (t >= t_end * (1.0 - 1e-14)) break;
      ts.push_back(t);
    }
  }
  ts.push_back(t_end);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

}  // namespace detail

inline Frame make_frame(const SimState& s) {
  Frame f;
  f.t = s.t;
  f.Z = dynamics::interface(s);
  f.U = dynamics::velocity(s);
  const bool bounded = !(s.formulation() == Formulation::QUS && s.qus().has_S);
  f.diagnostics = frame_diagnostics(f.Z, f.U, s.grid, s.physics, bounded);
  f.record = diagnostics::energy(s);
  return f;
}

/// Advance `state` to t_end (in place). Frames go to `sink` at the configured
/// times, at the start and at termination.
inline TerminationReport evolve(SimState& state, double t_end, const IntegratorConfig& cfg,
                                const FrameSink& sink = {}) {
  cfg.validate();
  if (!(t_end > state.t)) throw InvalidInput("t_end must exceed the current time");
  const auto wall0 = std::chrono::steady_clock::now();
  TerminationReport rep;

  dynamics::Evaluator ev(state);
  ev.min_J_threshold = cfg.thresholds.min_J;
  const bool filter = cfg.filter_for(state.formulation());

  // boundary gap threshold fixed from the initial spacing
  std::optional<double> gap_thr = cfg.thresholds.min_boundary_gap;
  if (cfg.check_geometry && !gap_thr) {
    gap_thr = 5.0 * geometry::median_spacing(dynamics::interface(state));
  }

  auto emit = [&](const SimState& s, const diagnostics::DiagnosticRecord* rec_override,
                  const EventSet* es) {
    if (!sink) return;
    Frame f = make_frame(s);
    if (rec_override) f.record = *rec_override;
    if (es) {
      f.record.min_boundary_gap = es->min_gap;
      f.record.neg_mode_energy = es->neg_mode_energy;
    }
    sink(f);
    ++rep.frames;
  };

  auto check = [&](const SimState& s) {
    return detect_events(s, cfg.thresholds, &cfg, gap_thr);
  };

  {
    const EventSet es = check(state);
    emit(state, nullptr, &es);
    if (es.terminal()) {
      rep.reason = Termination::Event;
      rep.events = es.events;
      rep.t_final = state.t;
      return rep;
    }
  }

  ode::StepControl ctl;
  ctl.rel_tol = cfg.rel_tol;
  ctl.abs_tol = cfg.abs_tol;
  ctl.max_step = cfg.max_step;
  ctl.initial_step = cfg.initial_step;
  ctl.max_steps = cfg.max_steps;
  ctl.max_norm = cfg.max_norm;
  ode::DormandPrince dp([&ev](double t, const RVec& y, RVec& dy) { ev(t, y, dy); }, ctl);
  try {
    dp.reset(state.t, ev.pack(state));
  } catch (const SingularityError& e) {
    rep.reason = Termination::Singular;
    rep.message = e.what();
    rep.t_final = state.t;
    return rep;
  }

  const auto schedule = detail::output_schedule(state.t, t_end, cfg);
  std::size_t next_out = 0;
  std::size_t since_check = 0;
  bool done = false;
  while (!done) {
    const double target = schedule[next_out];
    if (dp.stats().accepted >= cfg.max_steps) {
      rep.reason = Termination::MaxSteps;
      break;
    }
    ode::StepOutcome out;
    try {
      out = dp.step(target);
    } catch (const SingularityError& e) {
      rep.reason = Termination::Singular;
      rep.message = e.what();
      break;
    }
    if (out == ode::StepOutcome::Underflow) {
      rep.reason = Termination::StepUnderflow;
      rep.message = "step size underflow";
      if (!dp.last_failure().empty()) rep.message += ": " + dp.last_failure();
      break;
    }
    if (filter) {
      try {
        dp.modify([&](RVec& y) { ev.filter_state(y); });
      } catch (const SingularityError& e) {
        rep.reason = Termination::Singular;
        rep.message = e.what();
        break;
      }
    }
    const bool at_output = dp.t() >= target;
    ++since_check;
    if (at_output || since_check >= cfg.event_interval) {
      since_check = 0;
      ev.unpack(dp.y(), state);
      state.t = dp.t();
      const EventSet es = check(state);
      for (const auto& e : es.events) {
        const bool seen = std::any_of(rep.events.begin(), rep.events.end(),
                                      [&](const Event& o) { return o.kind == e.kind; });
        if (!seen || e.terminal) rep.events.push_back(e);
      }
      if (es.terminal()) {
        emit(state, nullptr, &es);
        rep.reason = Termination::Event;
        done = true;
        break;
      }
      if (at_output) {
        emit(state, nullptr, &es);
        ++next_out;
        if (next_out == schedule.size()) {
          rep.reason = Termination::ReachedEnd;
          done = true;
        }
      }
    }
  }
  ev.unpack(dp.y(), state);
  state.t = dp.t();
  if (rep.reason != Termination::ReachedEnd && rep.reason != Termination::Event) {
    try {
      emit(state, nullptr, nullptr);
    } catch (const Error&) {
    }
  }
  rep.t_final = state.t;
  rep.stats = dp.stats();
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
  return rep;
}

}  // namespace freesurf::integrate
