#include <gtest/gtest.h>

#include <cmath>

#include "freesurf/integrate.hpp"

using namespace freesurf;
using namespace freesurf::integrate;
using dynamics::Formulation;

namespace {

IntegratorConfig tight() {
  IntegratorConfig c;
  c.rel_tol = 1e-12;
  c.abs_tol = 1e-15;
  c.check_geometry = false;
  c.neg_mode_terminal = false;
  return c;
}

SimState exp_map(std::size_t n, double c) {
  spectral::SpectralGrid g(n);
  CVec z(n), f(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) z[j] = std::exp(c * g.node(j)) - 1.0;
  return dynamics::from_traces(g, Formulation::ZF, z, f);
}

}  // namespace

TEST(Evolve, RestCircleUnchanged) {
  for (auto f : {Formulation::ZF, Formulation::QUS}) {
    spectral::SpectralGrid g(64);
    auto s = dynamics::custom(g, f, {{1, 1.0}}, {});
    const CVec z0 = dynamics::interface(s);
    auto rep = evolve(s, 1.0, IntegratorConfig{});
    EXPECT_EQ(rep.reason, Termination::ReachedEnd);
    EXPECT_DOUBLE_EQ(rep.t_final, 1.0);
    const CVec z1 = dynamics::interface(s);
    for (std::size_t j = 0; j < g.size(); ++j) EXPECT_LT(std::abs(z1[j] - z0[j]), 1e-12);
  }
}

TEST(Evolve, EllipseMatchesExactSolution) {
  const auto st = exact::conic_at(exact::ConicState::ellipse(1, 1, 1, -1), 0.25);
  for (auto f : {Formulation::ZF, Formulation::QUS}) {
    spectral::SpectralGrid g(256);
    auto s = dynamics::ellipse_test(g, f);
    auto rep = evolve(s, 0.25, tight());
    ASSERT_EQ(rep.reason, Termination::ReachedEnd);
    const CVec z = dynamics::interface(s);
    EXPECT_LT(diagnostics::ellipse_error_exact(z, g, st), 1e-7);
    EXPECT_LT(diagnostics::ellipse_error_nehari(z, g), 1e-7);
  }
}

TEST(Evolve, ConservesAreaAndEnergy) {
  spectral::SpectralGrid g(256);
  auto s = dynamics::ellipse_test(g, Formulation::ZF);
  const auto e0 = diagnostics::energy(s);
  std::vector<diagnostics::DiagnosticRecord> recs;
  auto cfg = tight();
  cfg.output_interval = 0.05;
  evolve(s, 0.25, cfg, [&](const Frame& f) { recs.push_back(f.record); });
  ASSERT_GE(recs.size(), 5u);
  for (const auto& r : recs) {
    EXPECT_LT(std::abs(r.area - e0.area) / e0.area, 1e-10);
    EXPECT_LT(std::abs(r.total_energy - e0.total_energy) / e0.total_energy, 1e-9);
  }
}

TEST(Evolve, FramesAtRequestedTimes) {
  spectral::SpectralGrid g(256);
  auto s = dynamics::fivefold(g, Formulation::QUS);
  IntegratorConfig cfg;
  cfg.output_times = {0.01, 0.02, 0.05};
  std::vector<Frame> frames;
  auto rep = evolve(s, 0.06, cfg, [&](const Frame& f) { frames.push_back(f); });
  ASSERT_EQ(rep.reason, Termination::ReachedEnd);
  ASSERT_EQ(frames.size(), 5u);
  const double want[] = {0.0, 0.01, 0.02, 0.05, 0.06};
  for (std::size_t i = 0; i < frames.size(); ++i) EXPECT_DOUBLE_EQ(frames[i].t, want[i]);
  // stored diagnostics reproduce from stored samples
  for (const auto& f : frames) {
    auto d = frame_diagnostics(f.Z, f.U, g, s.physics, true);
    EXPECT_NEAR(d.area, f.diagnostics.area, 1e-12);
    EXPECT_NEAR(d.energy, f.diagnostics.energy, 1e-12);
    EXPECT_NEAR(d.minJ, f.diagnostics.minJ, 1e-12);
    EXPECT_NEAR(d.maxCurvature, f.diagnostics.maxCurvature, 1e-12);
  }
}

TEST(Evolve, HalvedToleranceIsSelfConsistent) {
  spectral::SpectralGrid g(128);
  auto run = [&](double tol) {
    auto s = dynamics::ellipse_test(g, Formulation::ZF);
    IntegratorConfig c;
    c.rel_tol = tol;
    c.abs_tol = tol;
    c.check_geometry = false;
    c.neg_mode_terminal = false;
    c.max_norm = true;
    evolve(s, 0.25, c);
    return dynamics::interface(s);
  };
  const CVec a = run(1e-8), b = run(5e-9);
  double d = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, std::abs(a[j] - b[j]));
  EXPECT_LT(d, 1e-8);
}

TEST(Evolve, PostStepFilterKeepsArea) {
  spectral::SpectralGrid g(256);
  auto s = dynamics::ellipse_test(g, Formulation::ZF);
  auto cfg = tight();
  cfg.post_step_filter = true;
  const double a0 = diagnostics::energy(s).area;
  auto rep = evolve(s, 0.25, cfg);
  const double drift = std::abs(diagnostics::energy(s).area - a0) / a0;
  EXPECT_LT(drift / static_cast<double>(rep.stats.accepted), 1e-12);
}

TEST(Evolve, RejectsBadInput) {
  spectral::SpectralGrid g(64);
  auto s = dynamics::fivefold(g, Formulation::ZF);
  EXPECT_THROW(evolve(s, 0.0, IntegratorConfig{}), InvalidInput);
  IntegratorConfig c;
  c.rel_tol = 0.0;
  EXPECT_THROW(evolve(s, 1.0, c), InvalidInput);
}

TEST(Events, UnitCircleHasNone) {
  spectral::SpectralGrid g(128);
  auto s = dynamics::custom(g, Formulation::ZF, {{1, 1.0}}, {});
  auto es = detect_events(s);
  EXPECT_TRUE(es.empty());
  EXPECT_NEAR(es.min_J, 1.0, 1e-13);
}

TEST(Events, NearContactAndSelfIntersection) {
  // exp(c w) is univalent on the disk for c < pi; its ends meet near -1
  auto near = exp_map(512, 3.13);
  auto es = detect_events(near);
  ASSERT_TRUE(es.has(EventKind::BoundaryGap));
  EXPECT_FALSE(es.has(EventKind::SelfIntersection));
  EXPECT_LE(es.min_gap, 2.0 * std::exp(3.13 * 0.0) * std::sin(pi - 3.13) + 1e-12);
  EXPECT_FALSE(es.terminal());

  auto crossed = exp_map(512, 3.3);
  IntegratorConfig flags;
  flags.splash_terminal = true;
  auto ex = detect_events(crossed, flags.thresholds, &flags);
  EXPECT_TRUE(ex.has(EventKind::SelfIntersection));
  EXPECT_TRUE(ex.terminal());
}

TEST(Events, LooserThresholdNeverFiresEarlier) {
  auto first_event = [](double thr) {
    spectral::SpectralGrid g(64);
    auto s = dynamics::fivefold(g, Formulation::ZF);
    IntegratorConfig c;
    c.thresholds.neg_mode_energy = thr;
    c.check_geometry = false;
    auto rep = evolve(s, 2.0, c);
    return rep.t_final;
  };
  const double t1 = first_event(1e-10), t2 = first_event(1e-8), t3 = first_event(1e-6);
  EXPECT_LE(t1, t2);
  EXPECT_LE(t2, t3);
}

TEST(Events, SingularJacobianStopsRun) {
  spectral::SpectralGrid g(64);
  auto s = dynamics::custom(g, Formulation::ZF, {{1, 1.0}, {2, 0.5}}, {});
  auto rep = evolve(s, 1.0, IntegratorConfig{});
  EXPECT_EQ(rep.reason, Termination::Event);
  ASSERT_FALSE(rep.events.empty());
  EXPECT_EQ(rep.events.front().kind, EventKind::MinJ);
}
