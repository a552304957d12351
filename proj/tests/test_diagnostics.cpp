#include <gtest/gtest.h>

#include <cmath>

#include "freesurf/diagnostics.hpp"

using namespace freesurf;
using namespace freesurf::diagnostics;
using dynamics::Formulation;

namespace {

CVec circle(const spectral::SpectralGrid& g, double r, cplx c = 0.0) {
  CVec z(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) z[j] = c + r * g.node(j);
  return z;
}

}  // namespace

TEST(Area, CircleEllipseAndScaling) {
  spectral::SpectralGrid g(512);
  EXPECT_NEAR(area(circle(g, 1.0), g), pi, 1e-13);
  EXPECT_NEAR(area(circle(g, 3.0, cplx(2, 1)), g), 9.0 * pi, 1e-12);
  const double a = 1.2, b = 0.7;
  exact::EllipseOracle o(exact::ConicState::ellipse(a, b, 0.0, 0.0));
  CVec z(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) z[j] = o.Z(g.node(j));
  EXPECT_NEAR(area(z, g), pi * a * b, 1e-11);
  for (auto& v : z) v *= 1.7;
  EXPECT_NEAR(area(z, g), 1.7 * 1.7 * pi * a * b, 1e-11);
}

TEST(Curvature, Circles) {
  spectral::SpectralGrid g(64);
  for (double r : {0.5, 1.0, 4.0}) {
    for (double k : curvature(circle(g, r), g)) EXPECT_NEAR(k, 1.0 / r, 1e-12);
  }
  EXPECT_NEAR(perimeter(circle(g, 2.0), g), 4.0 * pi, 1e-12);
}

TEST(Energy, RestCircleIsZero) {
  spectral::SpectralGrid g(64);
  for (auto f : {Formulation::ZF, Formulation::QUS}) {
    auto s = dynamics::custom(g, f, {{1, 1.0}}, {});
    auto r = energy(s);
    EXPECT_NEAR(r.total_energy, 0.0, 1e-15);
    EXPECT_NEAR(r.area, pi, 1e-13);
  }
}

TEST(Energy, KineticOfDoubleMode) {
  spectral::SpectralGrid g(128);
  // Phi = cos 2 theta
  for (auto f : {Formulation::ZF, Formulation::QUS}) {
    auto s = dynamics::custom(g, f, {{1, 1.0}}, {{2, 1.0}});
    auto r = energy(s);
    EXPECT_NEAR(r.kinetic, pi, 1e-12);
    EXPECT_EQ(r.total_energy, r.kinetic + r.surface_energy + r.potential_energy);
  }
}

TEST(Energy, SurfaceEnergyIsPerimeter) {
  spectral::SpectralGrid g(64);
  auto s = dynamics::custom(g, Formulation::ZF, {{1, 1.0}}, {});
  s.physics.gamma = 1.0;
  EXPECT_NEAR(energy(s).total_energy, 2.0 * pi, 1e-12);
}

TEST(Energy, PotentialBoundaryAndBulkAgree) {
  spectral::SpectralGrid g(128);
  const CVec z = circle(g, 1.0, cplx(0.0, 0.5));
  dynamics::BodyPotential grav{1.0, {}};
  EXPECT_NEAR(potential_energy(z, g, grav), 0.5 * pi, 1e-12);
  dynamics::BodyPotential bulk{0.0, [](cplx w) { return w.imag(); }};
  EXPECT_NEAR(potential_energy(z, g, bulk), 0.5 * pi, 1e-9);
  dynamics::BodyPotential r2{0.0, [](cplx w) { return std::norm(w); }};
  EXPECT_NEAR(potential_energy(circle(g, 1.0), g, r2), 0.5 * pi, 1e-9);
}

TEST(ConicFit, RecoversHyperbola) {
  const double a = 0.532, b = 0.199, x0 = 2.398;
  std::vector<cplx> pts;
  for (int i = 0; i < 150; ++i) {
    const double s = -1.0 + 2.0 * i / 149.0;
    pts.emplace_back(x0 + a * std::cosh(s), b * std::sinh(s));
  }
  auto f = conic_fit_points(pts);
  EXPECT_EQ(f.branch, -1);
  EXPECT_NEAR(f.a, a, 1e-10);
  EXPECT_NEAR(f.b, b, 1e-10);
  EXPECT_NEAR(f.x0, x0, 1e-10);
  EXPECT_LT(f.residual, 1e-12);

  // deterministic perturbation
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] += 1e-6 * std::sin(12.9898 * i + 1.0);
  auto p = conic_fit_points(pts);
  EXPECT_NEAR(p.a, a, 1e-4);
  EXPECT_NEAR(p.b, b, 1e-4);
  EXPECT_NEAR(p.x0, x0, 1e-4);
}

TEST(ConicFit, CircleIsEllipseLike) {
  spectral::SpectralGrid g(512);
  auto f = conic_fit(circle(g, 0.8, cplx(1.5, 0.0)), 150);
  EXPECT_EQ(f.branch, 1);
  EXPECT_NEAR(f.x0, 1.5, 1e-10);
  EXPECT_NEAR(f.a, 0.8, 1e-10);
  EXPECT_NEAR(f.b, 0.8, 1e-10);
  EXPECT_THROW(conic_fit(circle(g, 1.0), 5), InvalidInput);
}

TEST(Scaling, BetaValues) {
  EXPECT_NEAR(beta_for_alpha(3.0 / 5.0), 5.0 / 7.0, 1e-15);
  EXPECT_NEAR(beta_for_alpha(0.75 / (5.0 / 3.0)), 20.0 / 31.0, 1e-15);
}

TEST(Scaling, ExactSelfSimilarityIsTimeIndependent) {
  spectral::SpectralGrid g(64);
  const double beta = 5.0 / 7.0;
  CVec w = circle(g, 1.0, cplx(2.0, 0.0));
  std::vector<CVec> curves;
  for (double t : {1.0, 10.0, 100.0}) {
    CVec z = w;
    for (auto& v : z) v *= std::pow(t, beta);
    curves.push_back(scaled_inverse_interface(z, t, beta));
  }
  for (std::size_t j = 0; j < g.size(); ++j) EXPECT_NEAR(std::abs(curves[0][j] - curves[2][j]), 0.0, 1e-13);
  EXPECT_NEAR(*collapse_distance(curves), 0.0, 1e-13);
}

TEST(Collapse, OffsetCurves) {
  spectral::SpectralGrid g(1024);
  std::vector<CVec> c{circle(g, 1.0), circle(g, 1.001)};
  EXPECT_NEAR(*collapse_distance(c), 1e-3, 1e-5);
  EXPECT_FALSE(collapse_distance({circle(g, 1.0)}).has_value());
  auto series = collapse_series({circle(g, 1.0), circle(g, 1.01), circle(g, 1.015), circle(g, 1.0175)});
  ASSERT_EQ(series.size(), 3u);
  EXPECT_GT(series[0], series[1]);
  EXPECT_GT(series[1], series[2]);
}

TEST(Galilean, IdentityAndUniformVelocity) {
  spectral::SpectralGrid g(64);
  auto s = dynamics::fivefold(g, Formulation::ZF);
  auto b = galilean_boost(s, 0.0);
  for (std::size_t j = 0; j < g.size(); ++j) {
    EXPECT_EQ(b.zf().X[j], s.zf().X[j]);
    EXPECT_EQ(b.zf().Phi[j], s.zf().Phi[j]);
  }
  const cplx v(0.3, -0.2);
  auto r = galilean_boost(dynamics::custom(g, Formulation::ZF, {{1, 1.0}}, {}), v);
  for (auto u : dynamics::velocity(r)) EXPECT_NEAR(std::abs(u - std::conj(v)), 0.0, 1e-14);
}

TEST(EllipseError, ExactDataHasNoError) {
  spectral::SpectralGrid g(256);
  auto st = exact::conic_at(exact::ConicState::ellipse(1, 1, 1, -1), 0.25);
  exact::EllipseOracle o(st);
  CVec z(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) z[j] = o.Z(g.node(j));
  EXPECT_LT(ellipse_error_exact(z, g, st), 1e-15);
  EXPECT_LT(ellipse_error_nehari(z, g), 1e-10);
}
