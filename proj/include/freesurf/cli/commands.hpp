#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "freesurf/cli/config.hpp"
#include "freesurf/cli/output.hpp"
#include "freesurf/diagnostics.hpp"
#include "freesurf/exact.hpp"
#include "freesurf/integrate.hpp"

namespace freesurf::cli {

inline constexpr const char* kReportSchema = "freesurf.report/1";

/// Runs f(i) for i in [0, n) on up to `jobs` threads.
template <class F>
void parallel_for(std::size_t n, int jobs, F&& f) {
  const std::size_t k = std::clamp<std::size_t>(jobs > 0 ? static_cast<std::size_t>(jobs) : 1, 1, std::max<std::size_t>(n, 1));
  if (k == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex m;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < k; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(m);
          if (!err) err = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

inline json to_json(const diagnostics::DiagnosticRecord& r) {
  auto v = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  return {{"t", r.t},
          {"area", v(r.area)},
          {"kinetic", v(r.kinetic)},
          {"surface_energy", v(r.surface_energy)},
          {"potential_energy", v(r.potential_energy)},
          {"total_energy", v(r.total_energy)},
          {"minJ", v(r.minJ)},
          {"maxCurvature", v(r.maxCurvature)},
          {"min_boundary_gap", v(r.min_boundary_gap)},
          {"neg_mode_energy", v(r.neg_mode_energy)}};
}

inline json to_json(const integrate::TerminationReport& r) {
  json ev = json::array();
  for (const auto& e : r.events) {
    ev.push_back({{"kind", integrate::to_string(e.kind)},
                  {"t", e.t},
                  {"value", e.value},
                  {"index", e.index},
                  {"index2", e.index2},
                  {"terminal", e.terminal}});
  }
  return {{"reason", integrate::to_string(r.reason)},
          {"t_final", r.t_final},
          {"message", r.message},
          {"frames", r.frames},
          {"wall_seconds", r.wall_seconds},
          {"steps",
           {{"accepted", r.stats.accepted},
            {"rejected", r.stats.rejected},
            {"rhs_evals", r.stats.rhs_evals},
            {"min_step", std::isfinite(r.stats.min_step) ? json(r.stats.min_step) : json(nullptr)},
            {"max_step", r.stats.max_step}}},
          {"events", ev}};
}

inline int exit_code(const integrate::TerminationReport& r) {
  switch (r.reason) {
    case integrate::Termination::ReachedEnd:
    case integrate::Termination::Event:
    case integrate::Termination::Singular: return 0;
    default: return 3;
  }
}

inline void prepare_dir(const fs::path& out, const RunConfig& c) {
  fs::create_directories(out);
  RunConfig r = c;
  r.out_dir = out.string();
  write_json(out / "resolved-config.json", to_json(r));
}

inline std::string time_label(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "t=%.4g", t);
  return buf;
}

// ---------------------------------------------------------------------------
// simulate

/// Exact Dirichlet-ellipse state for the ellipse test data F = amplitude w^2.
inline exact::ConicState ellipse_test_exact(double amplitude, double t) {
  const double v = 2.0 * amplitude;
  return exact::conic_at(exact::ConicState::ellipse(1.0, 1.0, v, -v), t);
}

inline int cmd_simulate(const RunConfig& c, const fs::path& out) {
  c.validate();
  prepare_dir(out, c);
  dynamics::SimState s = make_state(c);
  const auto ic = make_integrator(c);
  const bool bounded = !(s.formulation() == dynamics::Formulation::QUS && s.qus().has_S);

  FrameWriter frames(out / "frames.csv", c.output.stride);
  DiagnosticsWriter diag(out / "diagnostics.csv");
  std::vector<CVec> curves;
  std::vector<double> times;
  integrate::Frame last;
  auto rep = integrate::evolve(s, c.t_end, ic, [&](const integrate::Frame& f) {
    frames.write(f);
    diag.write(f.record);
    if (c.output.svg) {
      curves.push_back(f.Z);
      times.push_back(f.t);
    }
    last = f;
  });

  json j;
  j["schema"] = kReportSchema;
  j["command"] = "simulate";
  j["preset"] = c.preset;
  j["initial"] = c.initial.kind;
  j["formulation"] = dynamics::to_string(c.formulation);
  j["gauge"] = dynamics::to_string(c.gauge);
  j["N"] = c.N;
  j["experimental"] = s.experimental;
  j["termination"] = to_json(rep);
  j["final"] = to_json(last.record);

  const bool free_flight = c.gamma == 0.0 && c.gravity == 0.0;
  if (c.initial.kind == "ellipse-test" && free_flight && rep.reason == integrate::Termination::ReachedEnd) {
    const auto st = ellipse_test_exact(c.initial.amplitude, rep.t_final);
    const CVec z = dynamics::interface(s);
    j["ellipse"] = {{"semi_axis_exact", st.a[0]},
                    {"semi_axis_computed", z[0].real()},
                    {"max_error_exact", diagnostics::ellipse_error_exact(z, s.grid, st)},
                    {"max_error_inverse_map", diagnostics::ellipse_error_nehari(z, s.grid)}};
  }
  if (c.initial.kind == "nose" && !last.Z.empty()) {
    const auto f = diagnostics::conic_fit(last.Z);
    j["conic_fit"] = {{"t", last.t},           {"a", f.a},          {"b", f.b},
                      {"x0", f.x0},           {"residual", f.residual}, {"branch", f.branch > 0 ? "ellipse" : "hyperbola"},
                      {"coeffs", f.coeffs}};
  }
  if (c.initial.kind == "wedge") {
    const double nu = make_wedge(c).wedge.nu();
    j["wedge"] = {{"nu", nu}, {"alpha", c.initial.alpha_nu / nu}, {"compression", c.initial.compression}};
  }
  write_json(out / "report.json", j);

  if (c.output.svg && !curves.empty()) {
    std::vector<std::string> labels;
    for (double t : times) labels.push_back(time_label(t));
    write_svg(out / "frames.svg", curves, labels, c.preset.empty() ? "interface" : c.preset, bounded);
  }
  return exit_code(rep);
}

// ---------------------------------------------------------------------------
// exact

namespace detail {

inline exact::Mat3 mat3(const std::vector<double>& v) {
  exact::Mat3 m;
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) m(i, k) = v[static_cast<std::size_t>(3 * i + k)];
  }
  return m;
}

inline CVec conic_curve(const exact::ConicState& s, std::size_t count) {
  CVec z(count);
  const bool hyper = s.sigma[0] != s.sigma[1];
  for (std::size_t k = 0; k < count; ++k) {
    const double u = static_cast<double>(k) / static_cast<double>(count);
    if (hyper) {
      // branch x = a1 cosh s, |s| <= 2
      const double q = -2.0 + 4.0 * static_cast<double>(k) / static_cast<double>(count - 1);
      z[k] = cplx(s.a[0] * std::cosh(q), s.a[1] * std::sinh(q));
    } else {
      z[k] = cplx(s.a[0] * std::cos(2 * pi * u), s.a[1] * std::sin(2 * pi * u));
    }
  }
  return z;
}

}  // namespace detail

inline int cmd_exact(const RunConfig& c, const fs::path& out) {
  c.validate();
  prepare_dir(out, c);
  const auto& ex = c.exact;
  const ode::StepControl ctl{ex.rel_tol, ex.rel_tol * 1e-2};
  json j;
  j["schema"] = kReportSchema;
  j["command"] = "exact";
  j["preset"] = c.preset;
  j["family"] = ex.family;
  std::vector<CVec> curves;
  std::vector<double> times;
  bool closed = true;

  if (ex.family == "conic") {
    exact::ConicState s0{ex.a, ex.adot, ex.sigma, ex.sigma0, 0.0};
    s0.validate();
    auto tr = exact::integrate_conic(s0, ex.t_end, ctl);
    auto f = open_out(out / "trajectory.csv");
    f << "t";
    for (std::size_t i = 0; i < s0.dim(); ++i) f << ",a" << i + 1;
    for (std::size_t i = 0; i < s0.dim(); ++i) f << ",adot" << i + 1;
    f << '\n';
    const double vol0 = 1.0 / std::pow(s0.radius(), static_cast<double>(s0.dim()));
    const double speed0 = s0.signed_speed();
    double vol_drift = 0.0, speed_drift = 0.0;
    for (const auto& s : tr.samples) {
      f << num(s.t);
      for (double v : s.a) f << ',' << num(v);
      for (double v : s.adot) f << ',' << num(v);
      f << '\n';
      vol_drift = std::max(vol_drift, std::abs(std::pow(s.radius(), static_cast<double>(s.dim())) * vol0 - 1.0));
      speed_drift = std::max(speed_drift, std::abs(s.signed_speed() - speed0));
    }
    const auto& fin = tr.samples.back();
    j["final"] = {{"t", fin.t}, {"a", fin.a}, {"adot", fin.adot}, {"taylor_sign", exact::taylor_sign(fin)}};
    j["completed"] = tr.completed;
    j["volume_drift"] = vol_drift;
    j["speed_drift"] = speed_drift;
    if (s0.dim() == 2) {
      for (double t : ex.times) {
        curves.push_back(detail::conic_curve(exact::conic_at(s0, t), ex.samples));
        times.push_back(t);
      }
      closed = s0.sigma[0] == s0.sigma[1];
    }
  } else if (ex.family == "hyperbola") {
    exact::Hyperbola h(ex.theta0_deg * pi / 180.0, ex.tau, ex.r);
    const auto cls = h.classify();
    j["classification"] = {{"blows_up_forward", cls.blows_up_forward},
                           {"blowup_time", cls.blowup_time ? json(*cls.blowup_time) : json(nullptr)},
                           {"taylor_sign", cls.taylor}};
    auto f = open_out(out / "trajectory.csv");
    f << "t,a1,theta\n";
    for (const auto& [t, a1] : h.path(ex.t_end)) f << num(t) << ',' << num(a1) << ',' << num(h.theta_of(a1)) << '\n';
    for (double t : ex.times) {
      auto bt = cls.blowup_time;
      if (bt && t >= *bt) continue;
      curves.push_back(detail::conic_curve(exact::conic_at(h.conic(), t), ex.samples));
      times.push_back(t);
    }
    closed = false;
  } else if (ex.family == "ellipsoid") {
    exact::EllipsoidState s0;
    s0.P = detail::mat3(ex.P);
    s0.Pdot = detail::mat3(ex.Pdot);
    s0.gamma0 = ex.gamma0;
    auto tr = exact::integrate_ellipsoid(s0, ex.t_end, ctl, ex.times);
    auto f = open_out(out / "trajectory.csv");
    f << "t";
    for (int i = 0; i < 3; ++i) {
      for (int k = 0; k < 3; ++k) f << ",P" << i + 1 << k + 1;
    }
    f << ",detP\n";
    const double d0 = s0.P.determinant();
    double drift = 0.0;
    for (const auto& s : tr.samples) {
      f << num(s.t);
      for (int i = 0; i < 3; ++i) {
        for (int k = 0; k < 3; ++k) f << ',' << num(s.P(i, k));
      }
      f << ',' << num(s.P.determinant()) << '\n';
      drift = std::max(drift, std::abs(s.P.determinant() / d0 - 1.0));
    }
    const auto& fin = tr.samples.back();
    Eigen::JacobiSVD<exact::Mat3> svd(fin.P);
    j["final"] = {{"t", fin.t}, {"semi_axes", std::vector<double>{svd.singularValues()[0], svd.singularValues()[1],
                                                                   svd.singularValues()[2]}}};
    j["completed"] = tr.completed;
    j["det_drift"] = drift;
  } else if (ex.family == "cusp") {
    for (double t : ex.times) {
      curves.push_back(exact::cusp_boundary(t, ex.u_min, ex.u_max, ex.samples));
      times.push_back(t);
    }
    json exps = json::array();
    for (double t : ex.times) {
      if (t < 0.0) exps.push_back({{"t", t}, {"exponent", exact::cusp_local_exponent(t)}});
    }
    j["local_exponents"] = exps;
    closed = false;
  } else {
    exact::Cavity cav{ex.cavity_a, ex.cavity_b};
    cav.validate();
    for (double t : ex.times) {
      curves.push_back(exact::cavity_boundary(cav, t, ex.samples));
      times.push_back(t);
    }
    j["singularity_time"] = cav.singularity_time();
    std::optional<double> splash;
    if (!ex.times.empty()) {
      const double lo = *std::min_element(ex.times.begin(), ex.times.end());
      if (ex.splash_scan_end > lo) splash = exact::cavity_splash_time(cav, lo, ex.splash_scan_end);
    }
    j["splash_time"] = splash ? json(*splash) : json(nullptr);
  }

  if (!curves.empty()) {
    write_curves(out / "curves.csv", times, curves);
    if (c.output.svg) {
      std::vector<std::string> labels;
      for (double t : times) labels.push_back(time_label(t));
      write_svg(out / "curves.svg", curves, labels, ex.family, closed);
    }
  }
  write_json(out / "report.json", j);
  return 0;
}

// ---------------------------------------------------------------------------
// verify

struct LadderRow {
  std::size_t N = 0;
  double E_ZF = 0.0, E_QU = 0.0;              // inverse-map error
  double E_ZF_exact = 0.0, E_QU_exact = 0.0;  // against the closed-form interface
  std::size_t steps_ZF = 0, steps_QU = 0;
  bool ok_ZF = true, ok_QU = true;
};

struct LadderGate {
  bool pass = true;
  std::vector<std::string> failures;
};

/// One ladder entry: evolve the ellipse test data to t_end and measure errors.
inline std::pair<double, double> ladder_run(std::size_t n, dynamics::Formulation f, const VerifyConfig& v,
                                            std::size_t* steps = nullptr, bool* ok = nullptr) {
  spectral::SpectralGrid g(n);
  auto s = dynamics::ellipse_test(g, f, v.amplitude);
  integrate::IntegratorConfig ic;
  ic.rel_tol = v.rel_tol;
  ic.abs_tol = v.abs_tol;
  ic.check_geometry = false;
  ic.neg_mode_terminal = false;
  const auto rep = integrate::evolve(s, v.t_end, ic);
  if (steps) *steps = rep.stats.accepted;
  if (ok) *ok = rep.reason == integrate::Termination::ReachedEnd;
  const CVec z = dynamics::interface(s);
  const auto st = ellipse_test_exact(v.amplitude, v.t_end);
  return {diagnostics::ellipse_error_nehari(z, g), diagnostics::ellipse_error_exact(z, g, st)};
}

inline std::vector<LadderRow> run_ladder(const VerifyConfig& v, int jobs) {
  std::vector<LadderRow> rows(v.sizes.size());
  parallel_for(2 * rows.size(), jobs, [&](std::size_t i) {
    auto& r = rows[i / 2];
    r.N = v.sizes[i / 2];
    if (i % 2 == 0) {
      std::tie(r.E_ZF, r.E_ZF_exact) = ladder_run(r.N, dynamics::Formulation::ZF, v, &r.steps_ZF, &r.ok_ZF);
    } else {
      std::tie(r.E_QU, r.E_QU_exact) = ladder_run(r.N, dynamics::Formulation::QUS, v, &r.steps_QU, &r.ok_QU);
    }
  });
  return rows;
}

/// Super-algebraic convergence: successive ratio above min_ratio while the
/// coarser error is above the round-off plateau.
inline LadderGate ladder_gate(const std::vector<LadderRow>& rows, const VerifyConfig& v) {
  LadderGate g;
  auto fail = [&](std::string m) {
    g.pass = false;
    g.failures.push_back(std::move(m));
  };
  for (const auto& r : rows) {
    if (!r.ok_ZF || !r.ok_QU) fail("N=" + std::to_string(r.N) + ": run did not reach t_end");
    if (r.N == 512 && !(r.E_QU <= v.max_error_512)) fail("N=512: E_QU above " + num(v.max_error_512));
  }
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    if (rows[i + 1].N != 2 * rows[i].N) continue;
    const std::pair<const char*, std::pair<double, double>> cols[] = {
        {"ZF", {rows[i].E_ZF, rows[i + 1].E_ZF}}, {"QU", {rows[i].E_QU, rows[i + 1].E_QU}}};
    for (const auto& [name, e] : cols) {
      if (e.first <= v.plateau) continue;
      const double ratio = e.first / e.second;
      if (!(ratio > v.min_ratio)) {
        fail(std::string(name) + " N=" + std::to_string(rows[i].N) + "->" + std::to_string(rows[i + 1].N) +
             ": ratio " + num(ratio));
      }
    }
  }
  return g;
}

inline int cmd_verify(const RunConfig& c, const fs::path& out, int jobs) {
  c.validate();
  prepare_dir(out, c);
  const auto rows = run_ladder(c.verify, jobs);
  const auto gate = ladder_gate(rows, c.verify);
  {
    auto f = open_out(out / "table.csv");
    f << "N,E_ZF,E_QU,E_ZF_exact,E_QU_exact,steps_ZF,steps_QU\n";
    for (const auto& r : rows) {
      f << r.N << ',' << num(r.E_ZF) << ',' << num(r.E_QU) << ',' << num(r.E_ZF_exact) << ','
        << num(r.E_QU_exact) << ',' << r.steps_ZF << ',' << r.steps_QU << '\n';
    }
  }
  json t = json::array();
  for (const auto& r : rows) {
    t.push_back({{"N", r.N},
                 {"E_ZF", r.E_ZF},
                 {"E_QU", r.E_QU},
                 {"E_ZF_exact", r.E_ZF_exact},
                 {"E_QU_exact", r.E_QU_exact},
                 {"steps_ZF", r.steps_ZF},
                 {"steps_QU", r.steps_QU}});
  }
  json j;
  j["schema"] = kReportSchema;
  j["command"] = "verify";
  j["preset"] = c.preset;
  j["error_measure"] = "max_j |W(Z_j) - exp(i theta_j)| with the inverse ellipse map W";
  j["table"] = t;
  j["gate"] = {{"pass", gate.pass}, {"failures", gate.failures}};
  write_json(out / "report.json", j);
  return gate.pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// scaling

struct ScalingResult {
  double beta = 0.0;
  std::vector<double> times;
  std::vector<CVec> curves;  // scaled inverse interfaces
  RVec series;               // consecutive-pair collapse distances
  std::optional<double> collapse;
  integrate::TerminationReport report;
  bool experimental = false;
};

inline ScalingResult run_scaling(const RunConfig& c) {
  ScalingResult res;
  dynamics::SimState s = make_state(c);
  res.experimental = s.experimental;
  const double nu = c.initial.kind == "wedge" ? make_wedge(c).wedge.nu() : 1.0;
  res.beta = c.scaling.beta.value_or(diagnostics::beta_for_alpha(c.initial.alpha_nu / nu));
  auto ic = make_integrator(c);
  ic.output_times = c.scaling.times;
  ic.output_interval = 0.0;
  const double t_end = std::max(c.t_end, *std::max_element(c.scaling.times.begin(), c.scaling.times.end()));
  res.report = integrate::evolve(s, t_end, ic, [&](const integrate::Frame& f) {
    for (double t : c.scaling.times) {
      if (std::abs(f.t - t) <= 1e-12 * std::max(1.0, std::abs(t))) {
        res.times.push_back(f.t);
        res.curves.push_back(diagnostics::scaled_inverse_interface(f.Z, f.t, res.beta));
        break;
      }
    }
  });
  diagnostics::CollapseOptions opt{c.scaling.window_factor};
  res.series = diagnostics::collapse_series(res.curves, opt);
  res.collapse = diagnostics::collapse_distance(res.curves, opt);
  return res;
}

/// Collapse distances strictly decreasing over the final half of the series.
inline bool final_half_monotone(const RVec& series) {
  if (series.empty()) return false;
  for (std::size_t i = series.size() / 2; i + 1 < series.size(); ++i) {
    if (!(series[i + 1] < series[i])) return false;
  }
  return true;
}

inline int cmd_scaling(const RunConfig& c, const fs::path& out) {
  c.validate();
  prepare_dir(out, c);
  auto res = run_scaling(c);
  write_curves(out / "scaled.csv", res.times, res.curves);
  {
    auto f = open_out(out / "collapse.csv");
    f << "t_a,t_b,distance\n";
    for (std::size_t i = 0; i < res.series.size(); ++i) {
      f << num(res.times[i]) << ',' << num(res.times[i + 1]) << ',' << num(res.series[i]) << '\n';
    }
  }
  json j;
  j["schema"] = kReportSchema;
  j["command"] = "scaling";
  j["preset"] = c.preset;
  j["beta"] = res.beta;
  j["experimental"] = res.experimental;
  j["snapshots"] = res.times;
  j["collapse_metric"] = {{"name", "symmetric discrete Hausdorff, point to polyline"},
                          {"window_factor", c.scaling.window_factor}};
  j["collapse_series"] = res.series;
  j["collapse_distance"] = res.collapse ? json(*res.collapse) : json(nullptr);
  j["final_half_monotone"] = res.series.empty() ? json(nullptr) : json(final_half_monotone(res.series));
  j["termination"] = to_json(res.report);
  write_json(out / "report.json", j);
  if (c.output.svg && !res.curves.empty()) {
    std::vector<std::string> labels;
    for (double t : res.times) labels.push_back(time_label(t));
    write_svg(out / "scaled.svg", res.curves, labels, "scaled inverse interfaces", false);
  }
  return exit_code(res.report);
}

}  // namespace freesurf::cli
