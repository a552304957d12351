#include <gtest/gtest.h>

#include <boost/math/special_functions/ellint_rd.hpp>
#include <boost/math/special_functions/ellint_rf.hpp>

#include "freesurf/exact.hpp"
#include "freesurf/quadrature.hpp"

using namespace freesurf;
using namespace freesurf::exact;

TEST(Quadrature, Polynomials) {
  auto r = quad::integrate([](double x) { return x * x * x - x; }, 0.0, 2.0);
  EXPECT_NEAR(r.value, 2.0, 1e-14);
  auto s = quad::integrate([](double x) { return std::sqrt(x); }, 0.0, 1.0);
  EXPECT_NEAR(s.value, 2.0 / 3.0, 1e-12);
}

TEST(Conic, EllipseBetaByHand) {
  auto s = ConicState::ellipse(1.0, 1.0, 1.0, -1.0);
  auto [v, acc] = conic_rhs(s);
  EXPECT_DOUBLE_EQ(conic_beta(s), 1.0);
  EXPECT_DOUBLE_EQ(acc[0], 1.0);
  EXPECT_DOUBLE_EQ(acc[1], 1.0);
}

TEST(Conic, StaticIsStatic) {
  ConicState s{{1.0, 2.0, 0.5}, {0.0, 0.0, 0.0}, {1, 1, 1}, 1, 0.0};
  for (double x : conic_accel(s)) EXPECT_EQ(x, 0.0);
}

TEST(Conic, HyperbolaDegenerate) {
  auto s = ConicState::hyperbola(1.0, 1.0, 0.5, -0.5);
  EXPECT_THROW(conic_beta(s), SingularityError);
}

TEST(Conic, TrajectoryInvariants) {
  ConicState s{{1.2, 0.9, 1.0 / (1.2 * 0.9)}, {0.3, -0.5, 0.0}, {1, 1, 1}, 1, 0.0};
  s.adot[2] = -s.a[2] * (s.adot[0] / s.a[0] + s.adot[1] / s.a[1]);
  const double r3 = s.a[0] * s.a[1] * s.a[2];
  const double speed = s.signed_speed();
  auto tr = integrate_conic(s, 3.0);
  ASSERT_TRUE(tr.completed);
  for (const auto& x : tr.samples) {
    EXPECT_LT(std::abs(x.a[0] * x.a[1] * x.a[2] - r3) / r3, 1e-10);
    EXPECT_LT(std::abs(x.signed_speed() - speed), 1e-10);
  }
  // velocities nondecreasing and bounded by the speed
  for (std::size_t k = 1; k < tr.samples.size(); ++k) {
    for (int j = 0; j < 3; ++j) {
      EXPECT_GE(tr.samples[k].adot[j], tr.samples[k - 1].adot[j] - 1e-13);
      EXPECT_LE(std::abs(tr.samples[k].adot[j]), std::sqrt(speed) + 1e-12);
    }
  }
}

TEST(Conic, EllipseAxisAtQuarter) {
  auto s = conic_at(ConicState::ellipse(1, 1, 1, -1), 0.25);
  EXPECT_NEAR(s.a[0], 1.278, 5e-4);
  EXPECT_NEAR(s.a[0] * s.a[1], 1.0, 1e-12);
}

TEST(Conic, BackwardIntegration) {
  auto s0 = ConicState::ellipse(1, 1, 1, -1);
  auto s = conic_at(s0, -0.25);
  EXPECT_NEAR(s.a[1], conic_at(s0, 0.25).a[0], 1e-11);
}

TEST(Conic, TaylorSigns) {
  EXPECT_EQ(taylor_sign(ConicState::ellipse(1.3, 1 / 1.3, 0.2, 0.7)), 1);
  ConicState bubble{{1.3, 1 / 1.3}, {0.2, -0.2 / 1.69}, {-1, -1}, -1, 0.0};
  EXPECT_EQ(taylor_sign(bubble), -1);
  EXPECT_EQ(Hyperbola(pi / 3, 1.0).classify().taylor, -1);
  EXPECT_EQ(Hyperbola(pi / 6, 1.0).classify().taylor, 1);
}

TEST(Hyperbola, CaseTable) {
  EXPECT_FALSE(Hyperbola(pi / 6, 1.0).blows_up_forward());
  EXPECT_TRUE(Hyperbola(pi / 6, -1.0).blows_up_forward());
  EXPECT_TRUE(Hyperbola(pi / 3, 1.0).blows_up_forward());
  EXPECT_FALSE(Hyperbola(pi / 3, -1.0).blows_up_forward());
  EXPECT_THROW(Hyperbola(pi / 4, 1.0), InvalidInput);
}

TEST(Hyperbola, BlowupTimeSelfConvergence) {
  Hyperbola h(pi / 6, -1.0, 1.0);
  auto t1 = h.blowup_time_ode(1e-9);
  auto t2 = h.blowup_time_ode(1e-10);
  auto tq = h.blowup_time();
  ASSERT_TRUE(t1 && t2 && tq);
  EXPECT_LT(std::abs(*t1 - *t2), 1e-8);
  EXPECT_LT(std::abs(*tq - *t2), 1e-8);
  EXPECT_GT(*tq, 0.0);
}

TEST(Hyperbola, GlobalForwardGrows) {
  Hyperbola h(pi / 6, 1.0);
  auto p = h.path(50.0);
  EXPECT_NEAR(p.back().first, 50.0, 1e-12);
  EXPECT_GT(p.back().second, 10.0);
}

TEST(Hyperbola, ConicIntegratorStallsAtBlowup) {
  Hyperbola h(pi / 6, -1.0);
  const double T = *h.blowup_time();
  auto tr = integrate_conic(h.conic(), 2.0 * T, {1e-10, 1e-12});
  EXPECT_FALSE(tr.completed);
  EXPECT_NEAR(tr.samples.back().t, T, 1e-3);
}

TEST(Gravity, Sphere) {
  auto g = gravity_alpha(Vec3(1, 1, 1));
  EXPECT_NEAR(g.alpha0, 2.0, 1e-12);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(g.alpha[i], 2.0 / 3.0, 1e-12);
}

TEST(Gravity, ScalingAndCarlsonOracle) {
  const Vec3 a(1.3, 0.8, 0.55);
  auto g = gravity_alpha(a);
  auto g2 = gravity_alpha(2.5 * a);
  EXPECT_NEAR(g2.alpha0, g.alpha0 / 2.5, 1e-12 * g.alpha0);
  const double x = a[0] * a[0], y = a[1] * a[1], z = a[2] * a[2];
  EXPECT_NEAR(g.alpha0, 2.0 * boost::math::ellint_rf(x, y, z), 1e-12);
  EXPECT_NEAR(g.alpha[0], 2.0 / 3.0 * boost::math::ellint_rd(y, z, x), 1e-12);
  EXPECT_NEAR(g.alpha[1], 2.0 / 3.0 * boost::math::ellint_rd(x, z, y), 1e-12);
  EXPECT_NEAR(g.alpha[2], 2.0 / 3.0 * boost::math::ellint_rd(x, y, z), 1e-12);
  EXPECT_NEAR(g.alpha.sum(), 2.0 / a.prod(), 1e-12);
  EXPECT_NEAR((a.array().square() * g.alpha.array()).sum(), g.alpha0, 1e-12);
}

TEST(Ellipsoid, StaticSphereBalanced) {
  auto acc = ellipsoid_rhs(Mat3::Identity(), Mat3::Zero(), 1.7);
  EXPECT_LT(acc.Pddot.norm(), 1e-12);
  EXPECT_NEAR(acc.beta, 1.7 * 2.0 / 3.0, 1e-12);
}

TEST(Ellipsoid, NoGravityMatchesConic) {
  Mat3 P = Vec3(1.2, 0.9, 1 / 1.08).asDiagonal();
  Mat3 Pd = Vec3(0.3, -0.1, 0.0).asDiagonal();
  Pd(2, 2) = -P(2, 2) * (0.3 / 1.2 - 0.1 / 0.9);
  auto acc = ellipsoid_rhs(P, Pd, 0.0);
  ConicState s{{P(0, 0), P(1, 1), P(2, 2)}, {Pd(0, 0), Pd(1, 1), Pd(2, 2)}, {1, 1, 1}, 1, 0.0};
  auto ca = conic_accel(s);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(acc.Pddot(i, i), ca[i], 1e-13);
  EXPECT_LT((acc.Pddot - Mat3(acc.Pddot.diagonal().asDiagonal())).norm(), 1e-13);
}

TEST(Ellipsoid, TransposeCovariance) {
  Mat3 P;
  P << 1.1, 0.2, -0.1, 0.05, 0.9, 0.3, 0.0, -0.2, 1.0;
  Mat3 Pd;
  Pd << 0.1, -0.3, 0.2, 0.4, 0.0, -0.1, 0.1, 0.2, -0.05;
  auto a = ellipsoid_rhs(P, Pd, 0.8);
  auto b = ellipsoid_rhs(P.transpose(), Pd.transpose(), 0.8);
  EXPECT_LT((a.Pddot.transpose() - b.Pddot).norm(), 1e-12);
  EXPECT_NEAR(a.beta, b.beta, 1e-12);
}

TEST(Ellipsoid, DeterminantAndDedekind) {
  EllipsoidState s;
  s.P << 1.1, 0.2, -0.1, 0.05, 0.9, 0.3, 0.0, -0.2, 1.0;
  s.Pdot << 0.1, -0.3, 0.2, 0.4, 0.0, -0.1, 0.1, 0.2, -0.05;
  // make the initial velocity tangent to the determinant constraint
  const Mat3 M = s.P.inverse() * s.Pdot;
  s.Pdot -= (M.trace() / 3.0) * s.P;
  s.gamma0 = 0.8;
  const double tol = 1e-11;
  std::vector<double> times = {0.5, 1.0, 1.5, 2.0};
  auto tr = integrate_ellipsoid(s, 2.0, {tol, tol * 1e-2}, times);
  ASSERT_TRUE(tr.completed);
  EllipsoidState st = s;
  st.P = s.P.transpose();
  st.Pdot = s.Pdot.transpose();
  auto trt = integrate_ellipsoid(st, 2.0, {tol, tol * 1e-2}, times);
  ASSERT_TRUE(trt.completed);
  const double det0 = s.P.determinant();
  for (std::size_t k = 0; k < tr.samples.size(); ++k) {
    EXPECT_LT(std::abs(tr.samples[k].P.determinant() - det0) / std::abs(det0), 1e-10);
    EXPECT_LT((tr.samples[k].P.transpose() - trt.samples[k].P).norm(), 10 * tol);
  }
}

TEST(Ballistic, CuspShape) {
  EXPECT_LT(std::abs(cusp_point(0.0, -1.0) - cplx(0, -1)), 1e-15);
  EXPECT_NEAR(cusp_dxdu(0.0, -1.0), 0.0, 1e-15);
  for (double u = -20; u <= 20; u += 0.01) EXPECT_LT(cusp_dxdu(u, -4.0), 0.0);
  EXPECT_NEAR(cusp_local_exponent(-1.0), 2.0 / 3.0, 0.02);
}

TEST(Ballistic, CavitySingularTime) {
  EXPECT_NEAR((Cavity{0.2, 1.2}).singularity_time(), -5.01176, 1e-4);
  EXPECT_NEAR((Cavity{-0.2, 1.2}).singularity_time(), 5.01176, 1e-4);
  EXPECT_NEAR((Cavity{1e-9, 1.2}).singularity_time(), 0.0, 1e-7);
  EXPECT_THROW(Cavity({0.2, 1.0}).singularity_time(), InvalidInput);
}

TEST(Ballistic, CavitySplashBeforeMinusOne) {
  auto t = cavity_splash_time({-0.2, 1.2}, -3.0, -0.5);
  ASSERT_TRUE(t.has_value());
  EXPECT_LT(*t, -1.0);
  EXPECT_GT(*t, -1.1);
  EXPECT_FALSE(geometry::self_intersection(cavity_boundary({-0.2, 1.2}, -2.0, 4096)));
}
