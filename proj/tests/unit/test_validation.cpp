#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "slipflow/error.hpp"
#include "slipflow/validation.hpp"

using namespace slipflow;
constexpr double pi = std::numbers::pi;

namespace {

// Closed form from integrating the radial balance by hand.
double hamel_pressure_closed(double k, double r) {
  const double ut = k * (3 * r - 2) / (r * r);
  const double u2 = 9.0 / (r * r) + ut * ut;
  return -0.5 * u2 - 2 * k * k / std::pow(r, 3) + k * k / std::pow(r, 4);
}

}  // namespace

TEST(Hamel, PointValues) {
  const auto ex = hamel(1.0);
  const Vec2 u = ex.velocity(Vec2(1.0, 0.0));
  EXPECT_NEAR(u.x(), -3.0, 1e-15);
  EXPECT_NEAR(u.y(), 1.0, 1e-15);
  const Vec2 u0 = hamel(0.0).velocity(Vec2(0.0, 2.0));
  EXPECT_NEAR(u0.y(), -1.5, 1e-15);
}

TEST(Hamel, ResidualOraclesAcrossFamily) {
  for (double k : {0.0, 1.0, -2.0}) {
    const auto res = exact_residuals(hamel(k));
    EXPECT_LE(res.momentum, 1e-6) << k;
    EXPECT_LE(res.continuity, 1e-8) << k;
    EXPECT_LE(res.slip, 1e-9) << k;
    EXPECT_LE(res.normal, 1e-12) << k;
  }
}

TEST(Hamel, PressureMatchesHandIntegration) {
  for (double k : {0.0, 1.0, -2.0}) {
    const auto ex = hamel(k);
    const double c = ex.pressure(Vec2(1.0, 0.0)) - hamel_pressure_closed(k, 1.0);
    for (double r : {1.1, 1.5, 1.9, 2.0}) {
      const Vec2 x = r * Vec2(std::cos(0.3), std::sin(0.3));
      EXPECT_NEAR(ex.pressure(x) - hamel_pressure_closed(k, r), c, 1e-12);
    }
  }
}

TEST(Hamel, PrintedPressureFailsMomentumForNonzeroSwirl) {
  auto ex = hamel(1.0);
  ex.fields.pressure = [u = ex.fields.velocity](const Vec2& x) { return -0.5 * u(x).squaredNorm(); };
  EXPECT_GT(exact_residuals(ex).momentum, 1e-2);
  auto ex0 = hamel(0.0);
  ex0.fields.pressure = [u = ex0.fields.velocity](const Vec2& x) { return -0.5 * u(x).squaredNorm(); };
  EXPECT_LE(exact_residuals(ex0).momentum, 1e-6);
}

TEST(Hamel, DataIndependentOfK) {
  const DomainSpec dom = hamel(0.0).domain();
  const auto a = hamel(0.0), b = hamel(1.0), c = hamel(-2.0);
  for (int j = 0; j < 2; ++j) {
    for (double t : {0.0, 0.3, 0.7}) {
      const auto fr = frame_at(dom, j, t);
      EXPECT_EQ(a.data.a_star[j](fr), b.data.a_star[j](fr));
      EXPECT_EQ(a.data.a_star[j](fr), c.data.a_star[j](fr));
      EXPECT_EQ(a.data.beta[j](fr), c.data.beta[j](fr));
      EXPECT_EQ(a.data.b_tau[j](fr), c.data.b_tau[j](fr));
    }
  }
  EXPECT_EQ(a.data.nu, c.data.nu);
}

TEST(Hamel, TangentialStressOnOuterCircle) {
  // nu S_r_theta = nu k (-6/r^2 + 6/r^3) is -3k/4 at r = 2.
  const auto ex = hamel(1.0);
  const Vec2 x(0.0, 2.0);
  const Mat2 G = ex.fields.gradient(x);
  const Vec2 er(0, 1), et(-1, 0);
  EXPECT_NEAR(er.dot((G + G.transpose()) * et), -0.75, 1e-14);
}

TEST(Couette, ResidualsAndSlip) {
  for (double amp : {0.0, 1.0}) {
    const auto ex = couette(1.0, 0.5, 2.0, 1.0, -0.5, 1.0, 2.0, amp);
    const auto res = exact_residuals(ex);
    EXPECT_LE(res.momentum, 1e-6);
    EXPECT_LE(res.continuity, 1e-8);
    EXPECT_LE(res.slip, 1e-9);
    EXPECT_LE(res.normal, 1e-12);
  }
}

TEST(Couette, SingularSystemRejected) {
  // beta = 0 on both circles: only B is determined.
  EXPECT_THROW(couette(1.0, 0.0, 0.0, 1.0, 1.0), Error);
}

TEST(RigidRotation, ZeroDataSolution) {
  const auto ex = rigid_rotation_solution(1.0);
  const auto res = exact_residuals(ex);
  EXPECT_LE(res.momentum, 1e-6);
  EXPECT_LE(res.slip, 1e-9);
  EXPECT_LE(res.normal, 1e-14);
  // (u . grad) u = -x b^2 and grad p = x b^2.
  const Vec2 x(1.2, -0.4);
  EXPECT_NEAR((ex.fields.gradient(x) * ex.velocity(x) + x).norm(), 0.0, 1e-14);
  const auto z = rigid_rotation_solution(0.0);
  EXPECT_EQ(z.velocity(x).norm(), 0.0);
}

TEST(Mms, RecoversHamelData) {
  const auto ex = hamel(1.0);
  const DomainSpec dom = ex.domain();
  const auto data = mms_generate(ex.fields, dom, 1.0, ex.data.beta);
  for (const Vec2& x : {Vec2(1.3, 0.2), Vec2(-0.4, 1.7), Vec2(0.9, -1.1)})
    EXPECT_LE(data.force.pointwise()(x).norm(), 1e-9);
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 16; ++i) {
      const auto fr = frame_at(dom, j, i / 16.0);
      EXPECT_NEAR(data.b_tau[j](fr), 0.0, 1e-9);
      EXPECT_NEAR(data.a_star[j](fr), ex.data.a_star[j](fr), 1e-12);
    }
}

TEST(Mms, RigidRotationWithFriction) {
  const auto ex = rigid_rotation_solution(1.0);
  const DomainSpec dom = ex.domain();
  const auto data = mms_generate(ex.fields, dom, 1.0, {constant_scalar(2.0), constant_scalar(2.0)});
  EXPECT_LE(data.force.pointwise()(Vec2(1.5, 0.1)).norm(), 1e-9);
  for (int j = 0; j < 2; ++j) {
    const auto fr = frame_at(dom, j, 0.2);
    EXPECT_NEAR(data.b_tau[j](fr), 2.0 * ex.velocity(fr.point).dot(fr.tau), 1e-12);
    EXPECT_NE(data.b_tau[j](fr), 0.0);
  }
}

TEST(Mms, ZeroFieldsGiveZeroData) {
  ExactFields z{[](const Vec2&) { return Vec2(0, 0); }, [](const Vec2&) { return Mat2(Mat2::Zero()); },
                [](const Vec2&) { return 0.0; }};
  const DomainSpec dom = hamel(0).domain();
  const auto data = mms_generate(z, dom, 1.0, {constant_scalar(1.0), constant_scalar(1.0)});
  EXPECT_EQ(data.force.pointwise()(Vec2(1.5, 0)).norm(), 0.0);
  EXPECT_EQ(data.b_tau[0](frame_at(dom, 0, 0.1)), 0.0);
}

TEST(Mms, RejectsNonSolenoidal) {
  ExactFields f{[](const Vec2& x) { return x; }, [](const Vec2&) { return Mat2(Mat2::Identity()); },
                [](const Vec2&) { return 0.0; }};
  EXPECT_THROW(mms_generate(f, hamel(0).domain(), 1.0, {constant_scalar(1.0), constant_scalar(1.0)}), Error);
}

TEST(Convergence, CsvColumns) {
  const std::vector<ErrorNorms> e{{1.0, 2.0, 4.0, 0, 0}, {0.125, 0.5, 1.0, 0, 0}};
  const auto rows = convergence_table({0.1, 0.05}, e);
  EXPECT_NEAR(rows[1].order_l2_u, 3.0, 1e-14);
  EXPECT_NEAR(rows[1].order_h1_u, 2.0, 1e-14);
  const std::string csv = convergence_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "level,h,eL2_u,order,eH1_u,order,eL2_p,order");
}

TEST(Convergence, InterpolationRates) {
  const auto ex = hamel(1.0);
  std::vector<ErrorNorms> e;
  std::vector<double> h;
  for (int n : {8, 16, 32}) {
    auto m = std::make_shared<const Mesh>(mesh_annulus(1.0, 2.0, n, 2 * n));
    e.push_back(interpolation_errors(m, ex.fields));
    h.push_back(m->h_max());
  }
  const auto rows = convergence_table(h, e);
  EXPECT_NEAR(rows[2].order_l2_u, 3.0, 0.3);
  EXPECT_NEAR(rows[2].order_h1_u, 2.0, 0.3);
  EXPECT_NEAR(rows[2].order_l2_p, 2.0, 0.3);
}
