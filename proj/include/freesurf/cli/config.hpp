#pragma once

#include <json.hpp>

#include <cmath>
#include <initializer_list>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "freesurf/dynamics.hpp"
#include "freesurf/exact.hpp"
#include "freesurf/integrate.hpp"

namespace freesurf::cli {

using json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "freesurf.run/1";

struct InitialData {
  std::string kind = "ellipse-test";  // ellipse-test | fivefold | nose | wedge | custom
  double amplitude = 0.5;             // ellipse-test, fivefold
  double compression = 250.0;         // nose, wedge
  double theta_deg = 60.0;            // wedge
  double alpha_nu = 1.0;
  double c_plus = 20.0;
  maps::DimpleParams dimple;
  double t0 = 1.0;
  std::vector<std::pair<int, cplx>> z_modes{{1, 1.0}};  // custom
  std::vector<std::pair<int, cplx>> f_modes;
};

struct OutputConfig {
  std::vector<double> times;
  double interval = 0.0;
  std::size_t stride = 1;  // write every stride-th sample to frames.csv
  bool svg = false;
};

struct VerifyConfig {
  std::vector<std::size_t> sizes{64, 128, 256, 512, 1024};
  double amplitude = 0.5;
  double t_end = 0.25;
  double rel_tol = 1e-12;
  double abs_tol = 1e-15;
  double min_ratio = 50.0;  // successive error ratio required above the plateau
  double plateau = 1e-10;   // errors below this count as round-off
  double max_error_512 = 1e-11;
};

struct ScalingConfig {
  std::vector<double> times;
  std::optional<double> beta;  // default from alpha
  double window_factor = 1.5;
};

struct ExactConfig {
  std::string family = "conic";  // conic | hyperbola | ellipsoid | cusp | cavity
  std::vector<double> times;
  double t_end = 0.25;
  std::size_t samples = 512;
  double rel_tol = 1e-12;
  // conic
  RVec a{1.0, 1.0};
  RVec adot{1.0, -1.0};
  std::vector<int> sigma{1, 1};
  int sigma0 = 1;
  // hyperbola
  double theta0_deg = 30.0;
  double tau = -1.0;
  double r = 1.0;
  // ellipsoid, row-major
  std::vector<double> P{1, 0, 0, 0, 1, 0, 0, 0, 1};
  std::vector<double> Pdot{0.2, 0, 0, 0, -0.1, 0, 0, 0, -0.1};
  double gamma0 = 1.0;
  // cusp
  double u_min = -3.0;
  double u_max = 3.0;
  // cavity
  double cavity_a = -0.2;
  double cavity_b = 1.2;
  double splash_scan_end = -0.5;  // splash search runs from the first time to here
};

struct RunConfig {
  std::string command = "simulate";  // simulate | exact | verify | scaling
  std::string preset;                // name the config was expanded from
  std::size_t N = 256;
  spectral::FilterSpec filter;
  dynamics::Formulation formulation = dynamics::Formulation::QUS;
  dynamics::Gauge gauge = dynamics::Gauge::FixedCenter;
  double gamma = 0.0;
  double gravity = 0.0;
  double c1 = 0.0;
  bool pin_phi0 = false;
  InitialData initial;
  double t_end = 0.25;
  integrate::IntegratorConfig integrator;
  OutputConfig output;
  std::string out_dir;
  VerifyConfig verify;
  ScalingConfig scaling;
  ExactConfig exact;

  void validate() const;
};

// ---------------------------------------------------------------------------
// enum names

inline dynamics::Formulation parse_formulation(const std::string& s) {
  if (s == "ZF") return dynamics::Formulation::ZF;
  if (s == "QUS") return dynamics::Formulation::QUS;
  throw InvalidInput("unknown formulation '" + s + "'");
}

inline dynamics::Gauge parse_gauge(const std::string& s) {
  if (s == "FixedCenter") return dynamics::Gauge::FixedCenter;
  if (s == "MovingCenter") return dynamics::Gauge::MovingCenter;
  throw InvalidInput("unknown gauge '" + s + "'");
}

inline void RunConfig::validate() const {
  static const std::set<std::string> commands{"simulate", "exact", "verify", "scaling"};
  static const std::set<std::string> kinds{"ellipse-test", "fivefold", "nose", "wedge", "custom"};
  static const std::set<std::string> families{"conic", "hyperbola", "ellipsoid", "cusp", "cavity"};
  if (!commands.count(command)) throw InvalidInput("unknown command '" + command + "'");
  if (N < 8 || N % 2 != 0) throw InvalidInput("N must be an even integer >= 8");
  if (!(filter.strength >= 0.0) || filter.order <= 0) throw InvalidInput("invalid filter");
  if (!kinds.count(initial.kind)) throw InvalidInput("unknown initial data '" + initial.kind + "'");
  if (initial.kind == "wedge" && formulation != dynamics::Formulation::QUS) {
    throw InvalidInput("wedge initial data requires the QUS formulation");
  }
  if (!families.count(exact.family)) throw InvalidInput("unknown exact family '" + exact.family + "'");
  if (!std::isfinite(t_end)) throw InvalidInput("t_end must be finite");
  if (output.stride == 0) throw InvalidInput("output stride must be positive");
  if (!(output.interval >= 0.0)) throw InvalidInput("output interval must be non-negative");
  if (!(scaling.window_factor > 0.0)) throw InvalidInput("window factor must be positive");
  if (exact.samples < 16) throw InvalidInput("exact.samples must be >= 16");
  if (exact.P.size() != 9 || exact.Pdot.size() != 9) throw InvalidInput("P and Pdot need 9 entries");
  if (!(gamma >= 0.0)) throw InvalidInput("surface tension must be non-negative");
  integrator.validate();
  if (command == "verify" && verify.sizes.empty()) throw InvalidInput("verify.sizes is empty");
  if (command == "scaling" && scaling.times.empty()) throw InvalidInput("scaling.times is empty");
}

// ---------------------------------------------------------------------------
// serialization

namespace detail {

inline void check_keys(const json& j, const char* where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw InvalidInput(std::string(where) + " must be an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw InvalidInput(std::string("unknown key '") + k + "' in " + where);
  }
}

template <class T>
void get(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    j.at(key).get_to(out);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("bad value for '") + key + "': " + e.what());
  }
}

inline json modes_json(const std::vector<std::pair<int, cplx>>& m) {
  json a = json::array();
  for (const auto& [k, c] : m) a.push_back({k, c.real(), c.imag()});
  return a;
}

inline std::vector<std::pair<int, cplx>> modes_from(const json& a) {
  std::vector<std::pair<int, cplx>> out;
  if (!a.is_array()) throw InvalidInput("modes must be an array of [k, re, im]");
  for (const auto& e : a) {
    if (!e.is_array() || e.size() != 3) throw InvalidInput("mode entries must be [k, re, im]");
    out.emplace_back(e[0].get<int>(), cplx(e[1].get<double>(), e[2].get<double>()));
  }
  return out;
}

// infinity is not representable in JSON; null stands for unbounded
inline json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace detail

inline json to_json(const RunConfig& c) {
  const auto& in = c.initial;
  const auto& ic = c.integrator;
  const auto& ex = c.exact;
  json j;
  j["schema"] = kSchema;
  j["command"] = c.command;
  j["preset"] = c.preset;
  j["N"] = c.N;
  j["filter"] = {{"strength", c.filter.strength}, {"order", c.filter.order}};
  j["formulation"] = dynamics::to_string(c.formulation);
  j["gauge"] = dynamics::to_string(c.gauge);
  j["physics"] = {{"gamma", c.gamma}, {"gravity", c.gravity}, {"c1", c.c1}, {"pin_phi0", c.pin_phi0}};
  j["initial"] = {{"kind", in.kind},
                  {"amplitude", in.amplitude},
                  {"compression", in.compression},
                  {"theta_deg", in.theta_deg},
                  {"alpha_nu", in.alpha_nu},
                  {"c_plus", in.c_plus},
                  {"dimple",
                   {{"eps1", in.dimple.eps1}, {"p1", in.dimple.p1}, {"eps2", in.dimple.eps2}, {"p2", in.dimple.p2}}},
                  {"t0", in.t0},
                  {"z_modes", detail::modes_json(in.z_modes)},
                  {"f_modes", detail::modes_json(in.f_modes)}};
  j["t_end"] = c.t_end;
  json th = {{"min_J", ic.thresholds.min_J}, {"neg_mode_energy", ic.thresholds.neg_mode_energy}};
  th["min_boundary_gap"] = ic.thresholds.min_boundary_gap ? json(*ic.thresholds.min_boundary_gap) : json(nullptr);
  j["integrator"] = {{"rel_tol", ic.rel_tol},
                     {"abs_tol", ic.abs_tol},
                     {"max_step", detail::finite_or_null(ic.max_step)},
                     {"initial_step", ic.initial_step},
                     {"max_steps", ic.max_steps},
                     {"max_norm", ic.max_norm},
                     {"post_step_filter", ic.post_step_filter ? json(*ic.post_step_filter) : json(nullptr)},
                     {"thresholds", th},
                     {"splash_terminal", ic.splash_terminal},
                     {"gap_terminal", ic.gap_terminal},
                     {"neg_mode_terminal", ic.neg_mode_terminal},
                     {"check_geometry", ic.check_geometry},
                     {"event_interval", ic.event_interval}};
  j["output"] = {{"times", c.output.times},
                 {"interval", c.output.interval},
                 {"stride", c.output.stride},
                 {"svg", c.output.svg}};
  j["out_dir"] = c.out_dir;
  j["verify"] = {{"sizes", c.verify.sizes},
                 {"amplitude", c.verify.amplitude},
                 {"t_end", c.verify.t_end},
                 {"rel_tol", c.verify.rel_tol},
                 {"abs_tol", c.verify.abs_tol},
                 {"min_ratio", c.verify.min_ratio},
                 {"plateau", c.verify.plateau},
                 {"max_error_512", c.verify.max_error_512}};
  j["scaling"] = {{"times", c.scaling.times},
                  {"beta", c.scaling.beta ? json(*c.scaling.beta) : json(nullptr)},
                  {"window_factor", c.scaling.window_factor}};
  j["exact"] = {{"family", ex.family},
                {"times", ex.times},
                {"t_end", ex.t_end},
                {"samples", ex.samples},
                {"rel_tol", ex.rel_tol},
                {"a", ex.a},
                {"adot", ex.adot},
                {"sigma", ex.sigma},
                {"sigma0", ex.sigma0},
                {"theta0_deg", ex.theta0_deg},
                {"tau", ex.tau},
                {"r", ex.r},
                {"P", ex.P},
                {"Pdot", ex.Pdot},
                {"gamma0", ex.gamma0},
                {"u_min", ex.u_min},
                {"u_max", ex.u_max},
                {"cavity_a", ex.cavity_a},
                {"cavity_b", ex.cavity_b},
                {"splash_scan_end", ex.splash_scan_end}};
  return j;
}

inline RunConfig from_json(const json& j, RunConfig c = {}) {
  using detail::get;
  detail::check_keys(j, "config",
                     {"schema", "command", "preset", "N", "filter", "formulation", "gauge", "physics", "initial",
                      "t_end", "integrator", "output", "out_dir", "verify", "scaling", "exact"});
  if (j.contains("schema") && j.at("schema") != kSchema) {
    throw InvalidInput("unsupported schema '" + j.at("schema").dump() + "', expected " + kSchema);
  }
  get(j, "command", c.command);
  get(j, "preset", c.preset);
  get(j, "N", c.N);
  if (j.contains("filter")) {
    const auto& f = j.at("filter");
    detail::check_keys(f, "filter", {"strength", "order"});
    get(f, "strength", c.filter.strength);
    get(f, "order", c.filter.order);
  }
  if (j.contains("formulation")) c.formulation = parse_formulation(j.at("formulation").get<std::string>());
  if (j.contains("gauge")) c.gauge = parse_gauge(j.at("gauge").get<std::string>());
  if (j.contains("physics")) {
    const auto& p = j.at("physics");
    detail::check_keys(p, "physics", {"gamma", "gravity", "c1", "pin_phi0"});
    get(p, "gamma", c.gamma);
    get(p, "gravity", c.gravity);
    get(p, "c1", c.c1);
    get(p, "pin_phi0", c.pin_phi0);
  }
  if (j.contains("initial")) {
    const auto& p = j.at("initial");
    auto& in = c.initial;
    detail::check_keys(p, "initial",
                       {"kind", "amplitude", "compression", "theta_deg", "alpha_nu", "c_plus", "dimple", "t0",
                        "z_modes", "f_modes"});
    get(p, "kind", in.kind);
    get(p, "amplitude", in.amplitude);
    get(p, "compression", in.compression);
    get(p, "theta_deg", in.theta_deg);
    get(p, "alpha_nu", in.alpha_nu);
    get(p, "c_plus", in.c_plus);
    if (p.contains("dimple")) {
      const auto& d = p.at("dimple");
      detail::check_keys(d, "initial.dimple", {"eps1", "p1", "eps2", "p2"});
      get(d, "eps1", in.dimple.eps1);
      get(d, "p1", in.dimple.p1);
      get(d, "eps2", in.dimple.eps2);
      get(d, "p2", in.dimple.p2);
    }
    get(p, "t0", in.t0);
    if (p.contains("z_modes")) in.z_modes = detail::modes_from(p.at("z_modes"));
    if (p.contains("f_modes")) in.f_modes = detail::modes_from(p.at("f_modes"));
  }
  get(j, "t_end", c.t_end);
  if (j.contains("integrator")) {
    const auto& p = j.at("integrator");
    auto& ic = c.integrator;
    detail::check_keys(p, "integrator",
                       {"rel_tol", "abs_tol", "max_step", "initial_step", "max_steps", "max_norm",
                        "post_step_filter", "thresholds", "splash_terminal", "gap_terminal", "neg_mode_terminal",
                        "check_geometry", "event_interval"});
    get(p, "rel_tol", ic.rel_tol);
    get(p, "abs_tol", ic.abs_tol);
    if (p.contains("max_step")) {
      ic.max_step = p.at("max_step").is_null() ? std::numeric_limits<double>::infinity()
                                               : p.at("max_step").get<double>();
    }
    get(p, "initial_step", ic.initial_step);
    get(p, "max_steps", ic.max_steps);
    get(p, "max_norm", ic.max_norm);
    if (p.contains("post_step_filter")) {
      const auto& v = p.at("post_step_filter");
      ic.post_step_filter = v.is_null() ? std::nullopt : std::optional<bool>(v.get<bool>());
    }
    if (p.contains("thresholds")) {
      const auto& t = p.at("thresholds");
      detail::check_keys(t, "integrator.thresholds", {"min_J", "neg_mode_energy", "min_boundary_gap"});
      get(t, "min_J", ic.thresholds.min_J);
      get(t, "neg_mode_energy", ic.thresholds.neg_mode_energy);
      if (t.contains("min_boundary_gap")) {
        const auto& v = t.at("min_boundary_gap");
        ic.thresholds.min_boundary_gap = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
      }
    }
    get(p, "splash_terminal", ic.splash_terminal);
    get(p, "gap_terminal", ic.gap_terminal);
    get(p, "neg_mode_terminal", ic.neg_mode_terminal);
    get(p, "check_geometry", ic.check_geometry);
    get(p, "event_interval", ic.event_interval);
  }
  if (j.contains("output")) {
    const auto& p = j.at("output");
    detail::check_keys(p, "output", {"times", "interval", "stride", "svg"});
    get(p, "times", c.output.times);
    get(p, "interval", c.output.interval);
    get(p, "stride", c.output.stride);
    get(p, "svg", c.output.svg);
  }
  get(j, "out_dir", c.out_dir);
  if (j.contains("verify")) {
    const auto& p = j.at("verify");
    detail::check_keys(p, "verify",
                       {"sizes", "amplitude", "t_end", "rel_tol", "abs_tol", "min_ratio", "plateau", "max_error_512"});
    get(p, "sizes", c.verify.sizes);
    get(p, "amplitude", c.verify.amplitude);
    get(p, "t_end", c.verify.t_end);
    get(p, "rel_tol", c.verify.rel_tol);
    get(p, "abs_tol", c.verify.abs_tol);
    get(p, "min_ratio", c.verify.min_ratio);
    get(p, "plateau", c.verify.plateau);
    get(p, "max_error_512", c.verify.max_error_512);
  }
  if (j.contains("scaling")) {
    const auto& p = j.at("scaling");
    detail::check_keys(p, "scaling", {"times", "beta", "window_factor"});
    get(p, "times", c.scaling.times);
    if (p.contains("beta")) {
      const auto& v = p.at("beta");
      c.scaling.beta = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
    }
    get(p, "window_factor", c.scaling.window_factor);
  }
  if (j.contains("exact")) {
    const auto& p = j.at("exact");
    auto& ex = c.exact;
    detail::check_keys(p, "exact",
                       {"family", "times", "t_end", "samples", "rel_tol", "a", "adot", "sigma", "sigma0",
                        "theta0_deg", "tau", "r", "P", "Pdot", "gamma0", "u_min", "u_max", "cavity_a",
                        "cavity_b", "splash_scan_end"});
    get(p, "family", ex.family);
    get(p, "times", ex.times);
    get(p, "t_end", ex.t_end);
    get(p, "samples", ex.samples);
    get(p, "rel_tol", ex.rel_tol);
    get(p, "a", ex.a);
    get(p, "adot", ex.adot);
    get(p, "sigma", ex.sigma);
    get(p, "sigma0", ex.sigma0);
    get(p, "theta0_deg", ex.theta0_deg);
    get(p, "tau", ex.tau);
    get(p, "r", ex.r);
    get(p, "P", ex.P);
    get(p, "Pdot", ex.Pdot);
    get(p, "gamma0", ex.gamma0);
    get(p, "u_min", ex.u_min);
    get(p, "u_max", ex.u_max);
    get(p, "cavity_a", ex.cavity_a);
    get(p, "cavity_b", ex.cavity_b);
    get(p, "splash_scan_end", ex.splash_scan_end);
  }
  return c;
}

// ---------------------------------------------------------------------------
// presets

namespace detail {

inline std::vector<double> multiples(double step, int count, std::vector<double> head = {}) {
  for (int n = 1; n <= count; ++n) head.push_back(step * n);
  return head;
}

inline RunConfig wedge_base(const std::string& name, std::size_t n, double compression, double alpha_nu) {
  RunConfig c;
  c.preset = name;
  c.N = n;
  c.formulation = dynamics::Formulation::QUS;
  c.initial.kind = "wedge";
  c.initial.compression = compression;
  c.initial.alpha_nu = alpha_nu;
  c.integrator.check_geometry = false;
  return c;
}

}  // namespace detail

inline std::vector<std::string> preset_names() {
  return {"ellipse-test", "fivefold",   "nose",       "wedge",      "wedge60-a1",  "wedge60-a34",
          "wedge-desk",   "accuracy-ladder",     "scaling-a1", "scaling-a34", "scaling-desk", "conic-ellipse",
          "hyperbola",    "ellipsoid",  "cusp",       "cavity"};
}

/// Fully expanded configuration for a named preset.
inline RunConfig preset(const std::string& name) {
  RunConfig c;
  c.preset = name;
  if (name == "ellipse-test") {
    c.N = 256;
    c.formulation = dynamics::Formulation::QUS;
    c.t_end = 0.25;
    c.integrator.rel_tol = 1e-12;
    c.integrator.abs_tol = 1e-15;
    c.integrator.check_geometry = false;
    c.output.interval = 0.05;
  } else if (name == "fivefold") {
    c.N = 16384;
    c.initial.kind = "fivefold";
    c.initial.amplitude = -0.15;
    c.t_end = 0.3;
    c.output.times = {0.1, 0.2};
  } else if (name == "nose") {
    c.N = 4096;
    c.formulation = dynamics::Formulation::ZF;
    c.integrator.post_step_filter = true;
    c.initial.kind = "nose";
    c.initial.compression = 250.0;
    c.t_end = 0.6;
    c.output.times = {0.2, 0.4};
  } else if (name == "wedge" || name == "wedge60-a1") {
    c = detail::wedge_base(name, 32768, 20000, 1.0);
    c.t_end = 1000;
    c.output.times = detail::multiples(200, 4, {10});
  } else if (name == "wedge60-a34") {
    c = detail::wedge_base(name, 32768, 4000, 0.75);
    c.t_end = 1000;
    c.output.times = detail::multiples(200, 4, {10});
  } else if (name == "wedge-desk") {
    c = detail::wedge_base(name, 4096, 100, 1.0);
    c.t_end = 200;
    c.output.times = detail::multiples(20, 9, {10});
  } else if (name == "accuracy-ladder") {
    c.command = "verify";
  } else if (name == "scaling-a1") {
    c = detail::wedge_base(name, 32768, 20000, 1.0);
    c.command = "scaling";
    c.scaling.times = detail::multiples(500, 10);
    c.t_end = 5000;
  } else if (name == "scaling-a34") {
    c = detail::wedge_base(name, 32768, 4000, 0.75);
    c.command = "scaling";
    c.scaling.times = detail::multiples(1000, 10);
    c.t_end = 10000;
  } else if (name == "scaling-desk") {
    c = detail::wedge_base(name, 4096, 100, 1.0);
    c.command = "scaling";
    c.scaling.times = detail::multiples(20, 10);
    c.t_end = 200;
  } else if (name == "conic-ellipse") {
    c.command = "exact";
    c.exact.family = "conic";
    c.exact.t_end = 0.25;
    c.exact.times = {0.0, 0.25};
  } else if (name == "hyperbola") {
    c.command = "exact";
    c.exact.family = "hyperbola";
    c.exact.theta0_deg = 30.0;
    c.exact.tau = -1.0;
    c.exact.t_end = 2.0;
  } else if (name == "ellipsoid") {
    c.command = "exact";
    c.exact.family = "ellipsoid";
    c.exact.t_end = 5.0;
    c.exact.times = detail::multiples(0.5, 10);
  } else if (name == "cusp") {
    c.command = "exact";
    c.exact.family = "cusp";
    c.exact.times = {-4, -3, -2, -1};
  } else if (name == "cavity") {
    c.command = "exact";
    c.exact.family = "cavity";
    c.exact.cavity_a = -0.2;
    c.exact.cavity_b = 1.2;
    c.exact.times = {-3, -2, -1.03};
  } else {
    throw InvalidInput("unknown preset '" + name + "'");
  }
  return c;
}

// ---------------------------------------------------------------------------
// building library objects

inline spectral::SpectralGrid make_grid(const RunConfig& c) { return spectral::SpectralGrid(c.N, c.filter); }

inline dynamics::PhysicsParams make_physics(const RunConfig& c) {
  dynamics::PhysicsParams p;
  p.gamma = c.gamma;
  p.body.gravity = c.gravity;
  p.c1 = c.c1;
  p.pin_phi0 = c.pin_phi0;
  return p;
}

inline dynamics::WedgeSetup make_wedge(const RunConfig& c) {
  dynamics::WedgeSetup w;
  w.wedge.Theta = c.initial.theta_deg * pi / 180.0;
  w.wedge.C_plus = c.initial.c_plus;
  w.wedge.dimple = c.initial.dimple;
  w.alpha_nu = c.initial.alpha_nu;
  w.compression = c.initial.compression;
  w.t0 = c.initial.t0;
  return w;
}

inline dynamics::SimState make_state(const RunConfig& c) {
  const auto g = make_grid(c);
  const auto& in = c.initial;
  dynamics::SimState s = [&] {
    if (in.kind == "ellipse-test") return dynamics::ellipse_test(g, c.formulation, in.amplitude);
    if (in.kind == "fivefold") return dynamics::fivefold(g, c.formulation, in.amplitude);
    if (in.kind == "nose") return dynamics::nose(g, c.formulation, in.compression);
    if (in.kind == "wedge") return dynamics::wedge(g, make_wedge(c));
    return dynamics::custom(g, c.formulation, in.z_modes, in.f_modes);
  }();
  s.gauge = c.gauge;
  s.physics = make_physics(c);
  s.physics.validate();
  return s;
}

inline integrate::IntegratorConfig make_integrator(const RunConfig& c) {
  auto ic = c.integrator;
  ic.output_times = c.output.times;
  ic.output_interval = c.output.interval;
  return ic;
}

}  // namespace freesurf::cli
