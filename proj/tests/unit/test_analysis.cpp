#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "slipflow/analysis.hpp"
#include "slipflow/error.hpp"
#include "slipflow/linear_solvers.hpp"
#include "slipflow/validation.hpp"

using namespace slipflow;
constexpr double pi = std::numbers::pi;

namespace {

std::shared_ptr<const Mesh> annulus(int n) { return std::make_shared<const Mesh>(mesh_annulus(1.0, 2.0, n, std::max(2 * n, 16))); }

DomainSpec annulus_domain() { return DomainSpec({Curve::circle(Vec2::Zero(), 2.0), Curve::circle(Vec2::Zero(), 1.0)}); }

AuditOptions no_constants() {
  AuditOptions o;
  o.constants = false;
  return o;
}

ExactFields smooth_field() {
  ExactFields f;
  f.velocity = [](const Vec2& x) { return Vec2(x.x() * x.x() + std::sin(x.y()), x.x() * x.y() - std::cos(x.x())); };
  f.gradient = [](const Vec2& x) {
    Mat2 G;
    G << 2 * x.x(), std::cos(x.y()), x.y() + std::sin(x.x()), x.x();
    return G;
  };
  f.pressure = [](const Vec2&) { return 0.0; };
  return f;
}

}  // namespace

TEST(Audit, HamelGoldenValues) {
  const ExactSolution ex = hamel(0.0);
  const AuditReport r = audit(ex.domain(), ex.data, nullptr, no_constants());
  EXPECT_NEAR(r.theorem1.component_margin[0], -0.25, 1e-12);
  EXPECT_NEAR(r.theorem1.component_margin[1], 2.0, 1e-12);
  EXPECT_NEAR(r.theorem1.margin, -0.25, 1e-12);
  EXPECT_FALSE(r.theorem1.verdict);
  EXPECT_NEAR(r.fluxes[0] / (-6 * pi), 1.0, 1e-10);
  EXPECT_NEAR(r.fluxes[1] / (6 * pi), 1.0, 1e-10);
  EXPECT_LE(std::abs(r.total_flux), 1e-10);
  EXPECT_TRUE(r.compatible);
  EXPECT_NEAR(r.theorem2.outflow, -6 * pi, 1e-9);
  EXPECT_TRUE(r.theorem2.single_hole);
  EXPECT_TRUE(r.theorem2.hole_convex);
  EXPECT_NEAR(r.theorem2.hole_min_curvature, 1.0, 1e-12);
  EXPECT_FALSE(r.theorem2.verdict);
  EXPECT_TRUE(r.theorem3.admissible);
  EXPECT_TRUE(r.theorem3.verdict);
  EXPECT_FALSE(r.theorem4.evaluable);
  EXPECT_EQ(r.theorem4.supremum, "not evaluable");
}

TEST(Audit, FrictionDominatesCurvature) {
  const DomainSpec dom = annulus_domain();
  const AuditReport r = audit(dom, ProblemData::constant(1.0, {1.0, 1.0}, {-1.5, 3.0}, {0, 0}), nullptr, no_constants());
  EXPECT_NEAR(r.theorem1.component_margin[0], 0.0, 1e-12);
  EXPECT_NEAR(r.theorem1.component_margin[1], 3.0, 1e-12);
  EXPECT_TRUE(r.theorem1.verdict);

  const AuditReport weak = audit(dom, ProblemData::constant(1.0, {0.0, 0.0}, {0, 0}, {0, 0}), nullptr, no_constants());
  EXPECT_FALSE(weak.theorem1.beta_nonzero);
  EXPECT_FALSE(weak.theorem1.verdict);
  EXPECT_FALSE(weak.theorem2.friction_ok);
}

TEST(Audit, OutflowAndIncompatibility) {
  const DomainSpec dom = annulus_domain();
  const AuditReport out = audit(dom, ProblemData::constant(1.0, {1.0, 1.0}, {1.5, -3.0}, {0, 0}), nullptr, no_constants());
  EXPECT_GT(out.theorem2.outflow, 0.0);
  EXPECT_TRUE(out.theorem2.verdict);

  const AuditReport bad = audit(dom, ProblemData::constant(1.0, {1.0, 1.0}, {0.5, 0.0}, {0, 0}), nullptr, no_constants());
  EXPECT_NEAR(bad.total_flux, 2 * pi, 1e-10);
  EXPECT_FALSE(bad.compatible);
  EXPECT_FALSE(bad.theorem1.verdict);
  EXPECT_FALSE(bad.theorem2.verdict);
}

TEST(Audit, MarginScalingInvariance) {
  const DomainSpec dom = annulus_domain();
  const AuditReport base = audit(dom, ProblemData::constant(1.0, {0.75, 0.2}, {0, 0}, {0, 0}), nullptr, no_constants());
  for (double s : {0.5, 2.0, 3.0, 4.0}) {
    const AuditReport r =
        audit(dom, ProblemData::constant(s * 1.0, {s * 0.75, s * 0.2}, {0, 0}, {0, 0}), nullptr, no_constants());
    EXPECT_EQ(r.theorem1.margin, base.theorem1.margin);
    EXPECT_EQ(r.theorem1.component_margin, base.theorem1.component_margin);
  }
}

TEST(Audit, VerdictsRecomputable) {
  const ExactSolution ex = hamel(1.0);
  AuditReport r = audit(ex.domain(), ex.data, annulus(4));
  const AuditReport copy = r;
  recompute_verdicts(r);
  EXPECT_EQ(r.theorem1.verdict, copy.theorem1.verdict);
  EXPECT_EQ(r.theorem2.verdict, copy.theorem2.verdict);
  EXPECT_EQ(r.theorem3.verdict, copy.theorem3.verdict);
  EXPECT_EQ(r.theorem4.verdict, copy.theorem4.verdict);
  EXPECT_EQ(r.theorem4.verdict, r.theorem4.lhs < r.theorem4.rhs);
}

TEST(Audit, SymmetryBranch) {
  const DomainSpec dom({Curve::circle(Vec2::Zero(), 3.0), Curve::circle(Vec2(-1.2, 0.0), 0.5),
                        Curve::circle(Vec2(1.2, 0.0), 0.4)});
  auto m = std::make_shared<const Mesh>(mesh_disk_with_holes(dom, 0.3));
  ProblemData even = ProblemData::constant(1.0, {1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0});
  const AuditReport ok = audit(dom, even, m, no_constants());
  EXPECT_TRUE(ok.theorem3.admissible);
  ASSERT_TRUE(ok.theorem3.data_asymmetry.has_value());
  EXPECT_LT(*ok.theorem3.data_asymmetry, 1e-12);
  EXPECT_TRUE(ok.theorem3.verdict);
  EXPECT_FALSE(ok.theorem2.single_hole);
  EXPECT_FALSE(ok.theorem2.verdict);

  ProblemData odd = even;
  odd.b_tau[0] = [](const BoundaryFrame& f) { return f.point.x(); };  // even tangential density
  const AuditReport bad = audit(dom, odd, m, no_constants());
  EXPECT_FALSE(bad.theorem3.verdict);

  const DomainSpec off({Curve::circle(Vec2::Zero(), 3.0), Curve::circle(Vec2(0.2, 0.5), 0.5)});
  EXPECT_FALSE(audit(off, ProblemData::constant(1.0, {1, 0}, {0, 0}, {0, 0}), nullptr, no_constants()).theorem3.admissible);
}

TEST(Audit, SmallFluxCorollary) {
  auto m = annulus(4);
  const DomainSpec dom = m->domain();
  const AuditReport zero = audit(dom, ProblemData::constant(1.0, {1.0, 1.0}, {0, 0}, {0, 0}), m);
  ASSERT_TRUE(zero.theorem4.evaluable);
  EXPECT_EQ(zero.theorem4.lhs, 0.0);
  EXPECT_GT(zero.theorem4.rhs, 0.0);
  EXPECT_TRUE(zero.theorem4.verdict);
  EXPECT_FALSE(zero.theorem4.rigorous);

  const AuditReport big = audit(dom, ProblemData::constant(1.0, {1.0, 1.0}, {-150.0, 300.0}, {0, 0}), m);
  ASSERT_TRUE(big.theorem4.evaluable);
  EXPECT_GT(big.theorem4.lhs, big.theorem4.rhs);
  EXPECT_FALSE(big.theorem4.verdict);
  EXPECT_NEAR(big.theorem4.r, 4.0, 0.0);
  EXPECT_NEAR(big.theorem4.K, zero.theorem4.K, 1e-12 * zero.theorem4.K);

  // Flux scaling is linear in h.
  const AuditReport half = audit(dom, ProblemData::constant(1.0, {1.0, 1.0}, {-75.0, 150.0}, {0, 0}), m);
  EXPECT_NEAR(half.theorem4.h_norm, 0.5 * big.theorem4.h_norm, 1e-9 * big.theorem4.h_norm);

  const AuditReport frictionless = audit(dom, ProblemData::constant(1.0, {0.0, 0.0}, {0, 0}, {0, 0}), m);
  EXPECT_FALSE(frictionless.theorem4.evaluable);
  EXPECT_FALSE(frictionless.theorem4.verdict);
}

TEST(Bernoulli, RigidRotationAnalytic) {
  const double b = 0.7;
  const ExactSolution ex = rigid_rotation_solution(b);
  const BernoulliReport r = bernoulli_audit(ex.fields, ex.domain());
  ASSERT_EQ(r.components.size(), 2u);
  EXPECT_NEAR(r.components[1].mean, b * b, 1e-13);
  EXPECT_NEAR(r.components[0].mean, 4 * b * b, 1e-13);
  EXPECT_LT(r.max_deviation(), 1e-10);
  EXPECT_NEAR(r.consistency, 0.0, 1e-12);
}

TEST(Bernoulli, FrameInvariance) {
  const double b = 1.3;
  const Vec2 c(0.4, -0.3);
  const double a = 0.9;
  Mat2 R;
  R << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  const ExactSolution e1 = rigid_rotation_solution(b, c);
  const ExactSolution e2 = rigid_rotation_solution(b, R * c);
  // Same field expressed in rotated coordinates.
  ExactFields rotated;
  rotated.velocity = [&](const Vec2& y) { return Vec2(R * e1.fields.velocity(R.transpose() * y)); };
  rotated.pressure = [&](const Vec2& y) { return e1.fields.pressure(R.transpose() * y); };
  const BernoulliReport r1 = bernoulli_audit(e1.fields, e1.domain());
  const BernoulliReport r2 = bernoulli_audit(rotated, e2.domain());
  for (int j = 0; j < 2; ++j) {
    EXPECT_NEAR(r1.components[j].mean, r2.components[j].mean, 1e-10);
    EXPECT_NEAR(r1.components[j].deviation, r2.components[j].deviation, 1e-10);
  }
}

TEST(Bernoulli, PotentialFlowCancels) {
  ExactFields f;
  f.velocity = [](const Vec2& x) { return Vec2(x / x.squaredNorm()); };
  f.pressure = [](const Vec2& x) { return -0.5 / x.squaredNorm(); };
  const BernoulliReport r = bernoulli_audit(f, annulus_domain());
  for (const auto& c : r.components) {
    EXPECT_NEAR(c.mean, 0.0, 1e-14);
    EXPECT_LT(c.deviation, 1e-14);
  }
}

TEST(Bernoulli, DiscreteRotationAndZeroFlow) {
  const double b = 0.5;
  auto m = annulus(8);
  const ExactSolution ex = rigid_rotation_solution(b);
  const FlowState s = interpolate_exact(m, ex.fields, 1.0);
  const BernoulliReport r = bernoulli_audit(s);
  // Interpolated pressure is shifted to zero mean; the jump between components is preserved.
  EXPECT_NEAR(r.components[0].mean - r.components[1].mean, 3 * b * b, 1e-4);
  EXPECT_LT(r.max_deviation(), 1e-4);

  const FlowState z = solve_stokes(m, ProblemData::constant(1.0, {0, 0}, {0, 0}, {0, 0}));
  EXPECT_LT(bernoulli_audit(z).max_deviation(), 1e-14);
}

TEST(Weingarten, RigidRotationBalances) {
  // Only the isoparametric boundary (O(h^3) off the circle) leaves a residual.
  const ExactSolution ex = rigid_rotation_solution(1.0);
  double prev = 0.0;
  for (int n : {16, 32, 64}) {
    auto m = std::make_shared<const Mesh>(mesh_annulus(1.0, 2.0, 4, n));
    const WeingartenResidual r = weingarten_identity_check(*m, interpolate_exact(m, ex.fields, 1.0).velocity);
    if (prev > 0.0) EXPECT_GE(std::log2(prev / r.l2), 3.0);
    prev = r.l2;
  }
  EXPECT_LT(prev, 2e-6);
  auto m = annulus(4);
  EXPECT_EQ(weingarten_identity_check(*m, VectorXd::Zero(2 * m->num_nodes())).l2, 0.0);
}

TEST(Weingarten, CurvatureSignMatters) {
  // Flipping the Weingarten term leaves a residual 4 kappa u_tau on the boundary.
  auto m = annulus(4);
  const ExactSolution ex = rigid_rotation_solution(1.0);
  const FlowState s = interpolate_exact(m, ex.fields, 1.0);
  double flipped = 0.0;
  for_each_boundary_point(*m, [&](const BoundaryQuadPoint& q) {
    const Vec2 u = ex.fields.velocity(q.values.x);
    flipped = std::max(flipped, (4.0 * q.frame.W.transpose() * u).norm());
  });
  EXPECT_GT(flipped, 3.9);
}

TEST(Weingarten, SmoothFieldsConverge) {
  std::vector<double> err;
  for (int n : {4, 8, 16}) {
    auto m = std::make_shared<const Mesh>(mesh_annulus(1.0, 2.0, n, 4 * n));
    err.push_back(weingarten_identity_check(*m, interpolate_exact(m, smooth_field(), 1.0).velocity).l2);
  }
  for (size_t i = 1; i < err.size(); ++i) EXPECT_GE(std::log2(err[i - 1] / err[i]), 1.0);

  // Normal field x: u.tau = 0 on the circles, so only the 2 grad_tau(u.n) term is active.
  ExactFields radial;
  radial.velocity = [](const Vec2& x) { return x; };
  radial.gradient = [](const Vec2&) { return Mat2(Mat2::Identity()); };
  radial.pressure = [](const Vec2&) { return 0.0; };
  double prev = 0.0;
  for (int n : {16, 32, 64}) {
    auto m = std::make_shared<const Mesh>(mesh_annulus(1.0, 2.0, 4, n));
    const double r = weingarten_identity_check(*m, interpolate_exact(m, radial, 1.0).velocity).l2;
    if (prev > 0.0) EXPECT_GE(std::log2(prev / r), 1.0);
    prev = r;
  }
}

TEST(HeadPressure, InterpolatedHamelConverges) {
  for (double k : {0.0, 1.0}) {
    const ExactSolution ex = hamel(k);
    std::vector<double> res;
    for (int n : {8, 16, 32}) {
      auto m = std::make_shared<const Mesh>(mesh_annulus(1.0, 2.0, n, 2 * n));
      res.push_back(head_pressure_residual(interpolate_exact(m, ex.fields, 1.0), ex.data).norm);
    }
    for (size_t i = 1; i < res.size(); ++i) EXPECT_GE(std::log2(res[i - 1] / res[i]), 1.0) << "k = " << k;
  }
}

TEST(HeadPressure, StokesSolutionFailsIdentity) {
  const ExactSolution ex = hamel(0.0);
  std::vector<double> ns, stokes;
  for (int n : {16, 32}) {
    auto m = std::make_shared<const Mesh>(mesh_annulus(1.0, 2.0, n, 2 * n));
    ns.push_back(head_pressure_residual(interpolate_exact(m, ex.fields, 1.0), ex.data).norm);
    stokes.push_back(head_pressure_residual(solve_stokes(m, ex.data), ex.data).norm);
  }
  EXPECT_LT(ns[1], 0.55 * ns[0]);
  EXPECT_GT(stokes[1], 0.9 * stokes[0]);
  EXPECT_GT(stokes[1], 4 * ns[1]);
  auto m = annulus(4);
  const FlowState z = solve_stokes(m, ProblemData::constant(1.0, {0, 0}, {0, 0}, {0, 0}));
  EXPECT_EQ(head_pressure_residual(z, ProblemData::constant(1.0, {0, 0}, {0, 0}, {0, 0})).norm, 0.0);
}

TEST(StreamFunction, RigidRotation) {
  const double b = 0.8;
  auto m = annulus(8);
  const ScalarField psi = stream_function(interpolate_exact(m, rigid_rotation_solution(b).fields, 1.0));
  // -b r^2 / 2 shifted to zero mean: mean of r^2 over 1 < r < 2 is 5/2.
  double err = 0.0;
  for (int i = 0; i < m->num_nodes(); ++i) {
    const double exact = -0.5 * b * (m->nodes[i].squaredNorm() - 2.5);
    err = std::max(err, std::abs(psi.values(i) - exact));
  }
  EXPECT_LT(err, 1e-3);

  const ScalarField zero = stream_function(interpolate_exact(m, rigid_rotation_solution(0.0).fields, 1.0));
  EXPECT_EQ(zero.values.lpNorm<Eigen::Infinity>(), 0.0);
}

TEST(StreamFunction, NetFluxIsMultivalued) {
  auto m = annulus(4);
  try {
    stream_function(interpolate_exact(m, hamel(0.0).fields, 1.0));
    FAIL() << "expected a multivalued-stream error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::multivalued_stream);
  }
}

TEST(Diagnostics, FieldsOnRotation) {
  const double b = 0.6;
  auto m = annulus(4);
  const DiagnosticsFields d = diagnostics_fields(interpolate_exact(m, rigid_rotation_solution(b).fields, 1.0));
  // omega = d2 u1 - d1 u2 = -2b
  for (int i = 0; i < m->num_nodes(); ++i) EXPECT_NEAR(d.omega.values(i), -2 * b, 1e-10);
  EXPECT_TRUE(d.psi.has_value());
  EXPECT_EQ(d.bernoulli.components.size(), 2u);
}
