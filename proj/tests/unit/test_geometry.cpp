#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "slipflow/error.hpp"
#include "slipflow/geometry.hpp"

using namespace slipflow;
constexpr double pi = std::numbers::pi;

namespace {

DomainSpec annulus(Vec2 c = Vec2::Zero(), bool reverse_outer = false, bool reverse_inner = false) {
  return DomainSpec({Curve::circle(c, 2.0, reverse_outer), Curve::circle(c, 1.0, reverse_inner)});
}

std::vector<Vec2> ellipse_points(int m, double a, double b, Vec2 c = Vec2::Zero()) {
  std::vector<Vec2> p;
  for (int i = 0; i < m; ++i) {
    const double th = 2 * pi * i / m;
    p.push_back(c + Vec2(a * std::cos(th), b * std::sin(th)));
  }
  return p;
}

}  // namespace

TEST(Geometry, OuterCircleCurvatureIsMinusInverseRadius) {
  DomainSpec d = annulus();
  for (double t : {0.0, 0.1, 0.37, 0.5, 0.93}) {
    BoundaryFrame f = frame_at(d, 0, t);
    EXPECT_NEAR(f.kappa, -0.5, 1e-14);
    EXPECT_NEAR(f.n.dot(f.point / 2.0), 1.0, 1e-14);
  }
}

TEST(Geometry, HoleCurvatureIsPlusInverseRadius) {
  DomainSpec d = annulus();
  for (double t : {0.0, 0.25, 0.61}) {
    BoundaryFrame f = frame_at(d, 1, t);
    EXPECT_NEAR(f.kappa, 1.0, 1e-14);
    // normal points into the hole, i.e. toward the center
    EXPECT_NEAR(f.n.dot(-f.point), 1.0, 1e-14);
  }
}

TEST(Geometry, FrameInvariants) {
  DomainSpec d({Curve::spline(ellipse_points(24, 3.0, 2.0)), Curve::circle(Vec2(0.5, 0.2), 0.4)});
  for (int j = 0; j < 2; ++j) {
    for (int i = 0; i < 50; ++i) {
      BoundaryFrame f = frame_at(d, j, i / 50.0 + 0.003);
      EXPECT_NEAR(f.n.norm(), 1.0, 1e-12);
      EXPECT_NEAR(f.tau.norm(), 1.0, 1e-12);
      EXPECT_NEAR(f.n.dot(f.tau), 0.0, 1e-12);
      EXPECT_NEAR(f.tau.x(), f.n.y(), 0.0);
      EXPECT_NEAR(f.tau.y(), -f.n.x(), 0.0);
      EXPECT_LT((f.W * f.n).norm(), 1e-15);
      EXPECT_EQ(f.W(0, 1), f.W(1, 0));
      Eigen::SelfAdjointEigenSolver<Mat2> es(f.W);
      const double lo = std::min(f.kappa, 0.0), hi = std::max(f.kappa, 0.0);
      EXPECT_NEAR(es.eigenvalues()(0), lo, 1e-12);
      EXPECT_NEAR(es.eigenvalues()(1), hi, 1e-12);
      for (Vec2 u : {Vec2(1.0, 0.0), Vec2(-0.3, 2.0)}) EXPECT_NEAR((f.W * u).dot(f.n), 0.0, 1e-14);
    }
  }
}

TEST(Geometry, CurvatureIsOrientationEven) {
  DomainSpec a({Curve::spline(ellipse_points(20, 3.0, 2.0)), Curve::spline(ellipse_points(12, 0.5, 0.8))});
  DomainSpec b({Curve::spline(ellipse_points(20, 3.0, 2.0), true),
                Curve::spline(ellipse_points(12, 0.5, 0.8), true)});
  for (int j = 0; j < 2; ++j) {
    for (int i = 0; i < 40; ++i) {
      const double t = (i + 0.3) / 40.0;
      BoundaryFrame fa = frame_at(a, j, t);
      BoundaryFrame fb = frame_at(b, j, 1.0 - t);
      EXPECT_LT((fa.point - fb.point).norm(), 1e-12);
      EXPECT_NEAR(fa.kappa, fb.kappa, 1e-10);
      EXPECT_LT((fa.n - fb.n).norm(), 1e-12);
    }
  }
  DomainSpec c = annulus(Vec2::Zero(), true, true);
  EXPECT_NEAR(frame_at(c, 0, 0.3).kappa, -0.5, 1e-14);
  EXPECT_NEAR(frame_at(c, 1, 0.3).kappa, 1.0, 1e-14);
}

TEST(Geometry, SplineOfEllipseMatchesAnalyticCurvature) {
  // Curvature of the ellipse (3 cos, 2 sin) at theta = 0 is a / b^2.
  DomainSpec d({Curve::spline(ellipse_points(256, 3.0, 2.0))});
  BoundaryFrame f = frame_at(d, 0, 0.0);
  EXPECT_NEAR(f.kappa, -3.0 / 4.0, 1e-4);
  EXPECT_NEAR(f.point.x(), 3.0, 1e-14);
}

TEST(Geometry, FlatSegmentHasZeroCurvature) {
  // Middle of the long flat side of a spline stadium; the corner influence decays geometrically.
  std::vector<Vec2> p;
  for (int i = 0; i <= 20; ++i) p.emplace_back(-10.0 + i, -1.0);
  for (int i = 20; i >= 0; --i) p.emplace_back(-10.0 + i, 1.0);
  DomainSpec d({Curve::spline(p)});
  const int n = static_cast<int>(p.size());
  BoundaryFrame f = frame_at(d, 0, 10.5 / n);
  EXPECT_NEAR(f.kappa, 0.0, 1e-4);
}

TEST(Geometry, BoundaryIntegralHamelFluxes) {
  DomainSpec d = annulus();
  EXPECT_NEAR(boundary_integral(d, 0, [](const BoundaryFrame&) { return -1.5; }), -6 * pi, 1e-12);
  EXPECT_NEAR(boundary_integral(d, 1, [](const BoundaryFrame&) { return 3.0; }), 6 * pi, 1e-12);
  EXPECT_EQ(boundary_integral(d, 1, [](const BoundaryFrame&) { return 0.0; }), 0.0);
}

TEST(Geometry, CircleLengthAndTrigPolynomialsExact) {
  for (double R : {0.5, 1.0, 3.7}) {
    DomainSpec d({Curve::circle(Vec2(1.0, -2.0), R)});
    EXPECT_NEAR(boundary_length(d, 0) / (2 * pi * R), 1.0, 1e-12);
    const double I = boundary_integral(d, 0, [&](const BoundaryFrame& f) {
      const Vec2 x = f.point - Vec2(1.0, -2.0);
      return std::pow(x.x() / R, 4);
    });
    EXPECT_NEAR(I, 2 * pi * R * 3.0 / 8.0, 1e-12);
  }
}

TEST(Geometry, ClassifySymmetry) {
  SymmetryInfo s = classify_symmetry(annulus());
  EXPECT_TRUE(s.admissible_x1);
  ASSERT_TRUE(s.circular_center.has_value());
  EXPECT_LT(s.circular_center->norm(), 1e-15);

  SymmetryInfo off = classify_symmetry(DomainSpec({Curve::circle(Vec2::Zero(), 1.0), Curve::circle(Vec2(0.2, 0.4), 0.2)}));
  EXPECT_FALSE(off.admissible_x1);
  EXPECT_FALSE(off.circular_center.has_value());

  SymmetryInfo shifted = classify_symmetry(annulus(Vec2(5.0, 0.0)));
  EXPECT_TRUE(shifted.admissible_x1);
  ASSERT_TRUE(shifted.circular_center.has_value());
  EXPECT_LT((*shifted.circular_center - Vec2(5.0, 0.0)).norm(), 1e-15);

  SymmetryInfo ell = classify_symmetry(DomainSpec({Curve::spline(ellipse_points(16, 3.0, 2.0))}));
  EXPECT_TRUE(ell.admissible_x1);
  SymmetryInfo tilted = classify_symmetry(DomainSpec({Curve::spline(ellipse_points(16, 3.0, 2.0, Vec2(0.0, 0.5)))}));
  EXPECT_FALSE(tilted.admissible_x1);
}

TEST(Geometry, InvalidDomainsRejected) {
  EXPECT_THROW(Curve::circle(Vec2::Zero(), -1.0), Error);
  EXPECT_THROW(DomainSpec({Curve::circle(Vec2::Zero(), 1.0), Curve::circle(Vec2(0.9, 0.0), 0.5)}), Error);
  EXPECT_THROW(DomainSpec({Curve::circle(Vec2::Zero(), 2.0), Curve::circle(Vec2(0.5, 0.0), 0.5),
                           Curve::circle(Vec2(-0.2, 0.0), 0.5)}),
               Error);
}

TEST(Geometry, ProjectionRecoversParameter) {
  Curve s = Curve::spline(ellipse_points(30, 3.0, 2.0));
  for (double t : {0.01, 0.4, 0.77}) {
    double dist = 1.0;
    const double tp = s.project(s.point(t) + 1e-3 * Vec2(0.3, -0.1), &dist);
    EXPECT_NEAR(tp, t, 1e-3);
    EXPECT_LT(dist, 1e-3);
  }
  Curve c = Curve::circle(Vec2(1, 1), 2.0, true);
  EXPECT_NEAR(c.project(c.point(0.3)), 0.3, 1e-14);
}
