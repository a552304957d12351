#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "freesurf/cli/commands.hpp"

using namespace freesurf;
using namespace freesurf::cli;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("freesurf_test_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

RunConfig small_ellipse() {
  auto c = preset("ellipse-test");
  c.N = 64;
  c.t_end = 0.05;
  c.output.interval = 0.025;
  return c;
}

}  // namespace

TEST(Config, PresetsRoundTripLosslessly) {
  for (const auto& name : preset_names()) {
    const auto c = preset(name);
    const std::string a = to_json(c).dump();
    const std::string b = to_json(from_json(json::parse(a))).dump();
    EXPECT_EQ(a, b) << name;
  }
}

TEST(Config, NonDefaultValuesRoundTrip) {
  RunConfig c;
  c.N = 96;
  c.filter = {7.5, 12};
  c.formulation = dynamics::Formulation::ZF;
  c.gauge = dynamics::Gauge::MovingCenter;
  c.gamma = 0.1 + 1e-17;
  c.initial.kind = "custom";
  c.initial.z_modes = {{1, 1.0}, {3, cplx(0.01, -0.02)}};
  c.initial.f_modes = {{2, cplx(1.0 / 3.0, 0.0)}};
  c.integrator.max_step = 0.5;
  c.integrator.post_step_filter = false;
  c.integrator.thresholds.min_boundary_gap = 1e-3;
  c.scaling.beta = 0.7;
  c.exact.sigma = {-1, 1};
  const auto back = from_json(json::parse(to_json(c).dump()));
  EXPECT_EQ(to_json(back).dump(), to_json(c).dump());
  EXPECT_EQ(back.gamma, c.gamma);
  EXPECT_EQ(back.initial.f_modes[0].second, c.initial.f_modes[0].second);
  ASSERT_TRUE(back.integrator.post_step_filter.has_value());
  EXPECT_FALSE(*back.integrator.post_step_filter);
  // unbounded max_step travels as null
  RunConfig d;
  EXPECT_TRUE(to_json(d)["integrator"]["max_step"].is_null());
  EXPECT_TRUE(std::isinf(from_json(to_json(d)).integrator.max_step));
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(from_json(json::parse(R"({"bogus": 1})")), InvalidInput);
  EXPECT_THROW(from_json(json::parse(R"({"schema": "freesurf.run/0"})")), InvalidInput);
  EXPECT_THROW(from_json(json::parse(R"({"N": "many"})")), InvalidInput);
  EXPECT_THROW(from_json(json::parse(R"({"integrator": {"rtol": 1}})")), InvalidInput);
  EXPECT_THROW(preset("nope"), InvalidInput);
  auto c = preset("wedge-desk");
  c.formulation = dynamics::Formulation::ZF;
  EXPECT_THROW(c.validate(), InvalidInput);
  RunConfig odd;
  odd.N = 63;
  EXPECT_THROW(odd.validate(), InvalidInput);
}

TEST(Config, PresetExpandsSnapshotTimes) {
  const auto w = preset("wedge");
  const std::vector<double> want{10, 200, 400, 600, 800};
  EXPECT_EQ(w.output.times, want);
  EXPECT_EQ(w.t_end, 1000.0);
  const auto s = preset("scaling-a34");
  ASSERT_EQ(s.scaling.times.size(), 10u);
  EXPECT_EQ(s.scaling.times.front(), 1000.0);
  EXPECT_EQ(s.initial.alpha_nu, 0.75);
}

TEST(Simulate, WritesOutputsAndIsDeterministic) {
  const auto c = small_ellipse();
  const auto d1 = scratch("det1"), d2 = scratch("det2");
  auto c2 = c;
  c2.output.svg = true;
  EXPECT_EQ(cmd_simulate(c, d1), 0);
  EXPECT_EQ(cmd_simulate(c2, d2), 0);
  EXPECT_EQ(slurp(d1 / "frames.csv"), slurp(d2 / "frames.csv"));
  EXPECT_EQ(slurp(d1 / "diagnostics.csv"), slurp(d2 / "diagnostics.csv"));
  EXPECT_TRUE(fs::exists(d2 / "frames.svg"));
  EXPECT_FALSE(fs::exists(d1 / "frames.svg"));

  const std::string frames = slurp(d1 / "frames.csv");
  EXPECT_EQ(frames.substr(0, frames.find('\n')), "t,j,theta,X,Y,ReUbar,ImUbar");
  // three frames of 64 samples plus the header
  EXPECT_EQ(std::count(frames.begin(), frames.end(), '\n'), 3 * 64 + 1);

  const auto rep = read_json(d1 / "report.json");
  EXPECT_EQ(rep["termination"]["reason"], "reached-t-end");
  EXPECT_LT(rep["ellipse"]["max_error_exact"].get<double>(), 1e-3);

  // the resolved config reruns to identical data
  const auto again = from_json(read_json(d1 / "resolved-config.json"));
  const auto d3 = scratch("det3");
  EXPECT_EQ(cmd_simulate(again, d3), 0);
  EXPECT_EQ(slurp(d1 / "frames.csv"), slurp(d3 / "frames.csv"));
}

TEST(Simulate, FramesReadBackBitExact) {
  const auto d = scratch("bits");
  auto c = small_ellipse();
  ASSERT_EQ(cmd_simulate(c, d), 0);
  std::ifstream f(d / "frames.csv");
  std::string line;
  std::getline(f, line);
  std::getline(f, line);
  std::stringstream ss(line);
  std::string t, j, th, x;
  std::getline(ss, t, ',');
  std::getline(ss, j, ',');
  std::getline(ss, th, ',');
  std::getline(ss, x, ',');
  auto s = make_state(c);
  EXPECT_EQ(std::stod(x), dynamics::interface(s)[0].real());
}

TEST(Exact, ConicReportsSemiAxis) {
  const auto d = scratch("conic");
  ASSERT_EQ(cmd_exact(preset("conic-ellipse"), d), 0);
  const auto rep = read_json(d / "report.json");
  EXPECT_NEAR(rep["final"]["a"][0].get<double>(), 1.278, 1e-3);
  EXPECT_TRUE(fs::exists(d / "curves.csv"));
  EXPECT_TRUE(fs::exists(d / "trajectory.csv"));
}

TEST(Exact, CavityReportsSingularAndSplashTimes) {
  const auto d = scratch("cavity");
  ASSERT_EQ(cmd_exact(preset("cavity"), d), 0);
  const auto rep = read_json(d / "report.json");
  EXPECT_NEAR(rep["singularity_time"].get<double>(), 5.01176, 1e-4);
  ASSERT_FALSE(rep["splash_time"].is_null());
  EXPECT_LT(rep["splash_time"].get<double>(), -1.0);
}

TEST(Verify, GateFailureGivesNonzeroExit) {
  auto c = preset("accuracy-ladder");
  c.verify.sizes = {64, 128};
  EXPECT_EQ(cmd_verify(c, scratch("verify_ok"), 2), 0);
  c.verify.min_ratio = 1e9;
  const auto d = scratch("verify_bad");
  EXPECT_EQ(cmd_verify(c, d, 2), 1);
  EXPECT_FALSE(read_json(d / "report.json")["gate"]["pass"].get<bool>());
}

TEST(Scaling, SingleSnapshotGivesNullCollapse) {
  RunConfig c;
  c.command = "scaling";
  c.N = 64;
  c.initial.kind = "fivefold";
  c.initial.amplitude = -0.15;
  c.t_end = 0.01;
  c.scaling.times = {0.01};
  const auto d = scratch("scaling1");
  EXPECT_EQ(cmd_scaling(c, d), 0);
  const auto rep = read_json(d / "report.json");
  EXPECT_TRUE(rep["collapse_distance"].is_null());
  EXPECT_EQ(rep["snapshots"].size(), 1u);
}

TEST(Binary, InvalidConfigGivesJsonError) {
  const auto d = scratch("binary");
  fs::create_directories(d);
  {
    std::ofstream f(d / "bad.json");
    f << R"({"N": 7})";
  }
  const std::string cmd = std::string(FREESURF_BIN) + " simulate --config " + (d / "bad.json").string() +
                          " --out " + (d / "out").string() + " 2> " + (d / "err.txt").string() + " > /dev/null";
  const int rc = std::system(cmd.c_str());
  EXPECT_NE(rc, 0);
  const auto err = json::parse(slurp(d / "err.txt"));
  EXPECT_EQ(err["error"], "invalid_config");
}
