#include "slipflow/validation.hpp"

#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>
#include <type_traits>

#include "slipflow/error.hpp"
#include "slipflow/quadrature.hpp"

namespace slipflow {

namespace {

constexpr double pi = 3.14159265358979323846;

// Fourth-order centred first derivative of a vector function along e_d.
template <class F, class R = std::decay_t<std::invoke_result_t<const F&, const Vec2&>>>
R fd4(const F& f, const Vec2& x, int d, double h) {
  Vec2 e = Vec2::Zero();
  e(d) = h;
  return R(-f(x + 2 * e) + 8.0 * f(x + e) - 8.0 * f(x - e) + f(x - 2 * e)) / (12.0 * h);
}

template <class F, class R = std::decay_t<std::invoke_result_t<const F&, const Vec2&>>>
R fd4_second(const F& f, const Vec2& x, int d, double h) {
  Vec2 e = Vec2::Zero();
  e(d) = h;
  return R(-f(x + 2 * e) + 16.0 * f(x + e) - 30.0 * f(x) + 16.0 * f(x - e) - f(x - 2 * e)) / (12.0 * h * h);
}

Mat2 fd_gradient(const std::function<Vec2(const Vec2&)>& u, const Vec2& x, double h) {
  Mat2 G;
  for (int d = 0; d < 2; ++d) G.col(d) = fd4(u, x, d, h);
  return G;
}

}  // namespace

DomainSpec ExactSolution::domain() const {
  return DomainSpec({Curve::circle(center, r_out), Curve::circle(center, r_in)}, {"outer", "inner"});
}

ExactSolution hamel(double k) {
  ExactSolution ex;
  ex.name = "hamel";
  ex.parameters["k"] = k;
  ex.fields.velocity = [k](const Vec2& x) {
    const double r = x.norm();
    return Vec2(-3.0 * x / (r * r) + k * (3.0 * r - 2.0) / (r * r * r) * perp(x));
  };
  ex.fields.gradient = [k](const Vec2& x) {
    const double r2 = x.squaredNorm(), r = std::sqrt(r2);
    // -3x/r^2
    Mat2 G = -3.0 * (Mat2::Identity() / r2 - 2.0 * x * x.transpose() / (r2 * r2));
    // phi(r) x_perp with phi = k (3r - 2) / r^3
    const double phi = k * (3.0 * r - 2.0) / (r2 * r);
    const double dphi = k * (-6.0 * r + 6.0) / (r2 * r2);  // d phi / dr
    Mat2 Jp;
    Jp << 0.0, -1.0, 1.0, 0.0;
    G += phi * Jp + perp(x) * (dphi * x / r).transpose();
    return G;
  };
  // p(r) = int_1^r (u_theta^2 / s - u_r u_r') ds by Gauss quadrature, shifted to zero mean.
  auto radial = [k](double r) {
    const Rule1D& g = gauss_legendre(24);
    double s = 0.0;
    for (size_t q = 0; q < g.x.size(); ++q) {
      const double t = 1.0 + (r - 1.0) * g.x[q];
      const double ut = k * (3.0 * t - 2.0) / (t * t);
      const double ur = -3.0 / t, dur = 3.0 / (t * t);
      s += g.w[q] * (r - 1.0) * (ut * ut / t - ur * dur);
    }
    return s;
  };
  double mean = 0.0;
  {
    const Rule1D& g = gauss_legendre(24);
    for (size_t q = 0; q < g.x.size(); ++q) {
      const double r = 1.0 + g.x[q];
      mean += g.w[q] * radial(r) * 2.0 * pi * r;
    }
    mean /= 3.0 * pi;
  }
  ex.fields.pressure = [radial, mean](const Vec2& x) { return radial(x.norm()) - mean; };
  ex.data = ProblemData::constant(1.0, {0.75, 0.0}, {-1.5, 3.0}, {0.0, 0.0});
  return ex;
}

ExactSolution couette(double nu, double beta0, double beta1, double g0, double g1, double r_in, double r_out,
                      double pressure_amplitude) {
  // Outer: 2 nu B / R0^2 - beta0 (A R0 + B / R0) = g0; inner: 2 nu B / R1^2 + beta1 (A R1 + B / R1) = g1.
  Eigen::Matrix2d M;
  M << -beta0 * r_out, 2.0 * nu / (r_out * r_out) - beta0 / r_out, beta1 * r_in,
      2.0 * nu / (r_in * r_in) + beta1 / r_in;
  const Eigen::Vector2d rhs(g0, g1);
  if (std::abs(M.determinant()) < 1e-14)
    throw Error(ErrorKind::data, "Couette slip system is singular for these friction coefficients");
  const Eigen::Vector2d ab = M.fullPivLu().solve(rhs);
  const double A = ab(0), B = ab(1);
  ExactSolution ex;
  ex.name = "couette";
  ex.parameters = {{"A", A}, {"B", B}, {"nu", nu}, {"beta0", beta0}, {"beta1", beta1}, {"g0", g0}, {"g1", g1}};
  ex.r_in = r_in;
  ex.r_out = r_out;
  ex.navier_stokes = false;
  ex.fields.velocity = [A, B](const Vec2& x) { return Vec2((A + B / x.squaredNorm()) * perp(x)); };
  ex.fields.gradient = [A, B](const Vec2& x) {
    const double r2 = x.squaredNorm();
    Mat2 Jp;
    Jp << 0.0, -1.0, 1.0, 0.0;
    return Mat2((A + B / r2) * Jp + perp(x) * (-2.0 * B / (r2 * r2) * x).transpose());
  };
  const double c = pressure_amplitude;
  ex.parameters["pressure_amplitude"] = c;
  ex.fields.pressure = [c](const Vec2& x) { return c * x.y() * std::sin(x.x()); };
  ex.data = ProblemData::constant(nu, {beta0, beta1}, {0.0, 0.0}, {g0, g1});
  if (c != 0.0)
    ex.data.force = ForceField::analytic([c](const Vec2& x) { return Vec2(c * x.y() * std::cos(x.x()), c * std::sin(x.x())); });
  return ex;
}

ExactSolution rigid_rotation_solution(double b, const Vec2& center, double r_in, double r_out, double nu) {
  ExactSolution ex;
  ex.name = "rigid_rotation";
  ex.parameters = {{"b", b}};
  ex.r_in = r_in;
  ex.r_out = r_out;
  ex.center = center;
  ex.fields.velocity = [b, center](const Vec2& x) { return Vec2(b * perp(x - center)); };
  ex.fields.gradient = [b](const Vec2&) {
    Mat2 G;
    G << 0.0, -b, b, 0.0;
    return G;
  };
  ex.fields.pressure = [b, center](const Vec2& x) { return 0.5 * b * b * (x - center).squaredNorm(); };
  ex.data = ProblemData::constant(nu, {0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0});
  return ex;
}

ProblemData mms_generate(const ExactFields& fields, const DomainSpec& domain, double nu,
                         const std::vector<BoundaryScalar>& beta, bool navier_stokes) {
  if (static_cast<int>(beta.size()) != domain.num_components())
    throw Error(ErrorKind::configuration, "beta needs one entry per boundary component");
  const double diam = domain.diameter();
  const double h1 = 1e-5 * diam;
  // Solenoidality check on a deterministic sample.
  std::mt19937 rng(11);
  Vec2 lo = Vec2::Constant(1e300), hi = Vec2::Constant(-1e300);
  for (const Vec2& p : domain.curve(0).sample(256)) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  std::uniform_real_distribution<double> ux(lo.x(), hi.x()), uy(lo.y(), hi.y());
  double max_div = 0.0, max_grad = 0.0;
  for (int found = 0, tries = 0; found < 64 && tries < 100000; ++tries) {
    const Vec2 x(ux(rng), uy(rng));
    if (!domain.contains(x)) continue;
    ++found;
    const Mat2 G = fields.gradient(x);
    max_div = std::max(max_div, std::abs(G.trace()));
    max_grad = std::max(max_grad, G.norm());
  }
  if (max_div > 1e-8 * std::max(1.0, max_grad))
    throw Error(ErrorKind::data, "manufactured velocity is not divergence-free (max |div u| = " + std::to_string(max_div) + ")");

  ProblemData data;
  data.nu = nu;
  data.beta = beta;
  const double h2 = 1e-4 * diam;  // differentiates the analytic gradient once
  auto u = fields.velocity;
  auto grad = fields.gradient;
  auto p = fields.pressure;
  data.force = ForceField::analytic([u, grad, p, nu, h1, h2, navier_stokes](const Vec2& x) {
    // div of the gradient gives the Laplacian; the gradient is differentiated numerically.
    Vec2 lap = Vec2::Zero();
    for (int d = 0; d < 2; ++d) lap += fd4([&](const Vec2& y) { return Vec2(grad(y).col(d)); }, x, d, h2);
    Vec2 gp;
    for (int d = 0; d < 2; ++d) gp(d) = fd4(p, x, d, h1);
    Vec2 f = -nu * lap + gp;
    if (navier_stokes) f += grad(x) * u(x);
    return f;
  });
  for (int j = 0; j < domain.num_components(); ++j) {
    data.a_star.push_back([u](const BoundaryFrame& fr) { return u(fr.point).dot(fr.n); });
    const BoundaryScalar bj = beta[j];
    data.b_tau.push_back([u, grad, nu, bj](const BoundaryFrame& fr) {
      const Mat2 G = grad(fr.point);
      const Mat2 S = G + G.transpose();
      return nu * (S * fr.n).dot(fr.tau) + bj(fr) * u(fr.point).dot(fr.tau);
    });
  }
  return data;
}

ExactResiduals exact_residuals(const ExactSolution& ex, int interior_points, int boundary_points, unsigned seed) {
  const DomainSpec dom = ex.domain();
  const double diam = dom.diameter();
  const double h1 = 1e-5 * diam, h2 = 1e-3 * diam;
  const auto& u = ex.fields.velocity;
  const auto& p = ex.fields.pressure;
  const double nu = ex.data.nu;
  ExactResiduals res;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> rr(ex.r_in, ex.r_out), th(0.0, 2.0 * pi);
  for (int i = 0; i < interior_points; ++i) {
    const double r = rr(rng), t = th(rng);
    const Vec2 x = ex.center + r * Vec2(std::cos(t), std::sin(t));
    const Mat2 G = fd_gradient(u, x, h1);
    Vec2 lap = fd4_second(u, x, 0, h2) + fd4_second(u, x, 1, h2);
    Vec2 gp(fd4(p, x, 0, h1), fd4(p, x, 1, h1));
    Vec2 f = ex.data.force.has_pointwise() ? ex.data.force.pointwise()(x) : Vec2::Zero();
    Vec2 m = -nu * lap + gp - f;
    if (ex.navier_stokes) m += G * u(x);
    res.momentum = std::max(res.momentum, m.norm());
    res.continuity = std::max(res.continuity, std::abs(G.trace()));
  }
  for (int j = 0; j < dom.num_components(); ++j) {
    for (int i = 0; i < boundary_points; ++i) {
      const BoundaryFrame fr = frame_at(dom, j, (i + 0.5) / boundary_points);
      const Mat2 G = fd_gradient(u, fr.point, h1);
      const Mat2 S = G + G.transpose();
      const Vec2 uv = u(fr.point);
      const double slip = nu * (S * fr.n).dot(fr.tau) + ex.data.beta[j](fr) * uv.dot(fr.tau) - ex.data.b_tau[j](fr);
      res.slip = std::max(res.slip, std::abs(slip));
      res.normal = std::max(res.normal, std::abs(uv.dot(fr.n) - ex.data.a_star[j](fr)));
    }
  }
  return res;
}

namespace {

ErrorNorms errors_impl(const Mesh& mesh, const std::function<Vec2(int, const PointValues&)>& uh,
                       const std::function<Mat2(int, const PointValues&)>& Guh,
                       const std::function<double(int, const PointValues&)>& ph, const ExactFields& ex) {
  const RuleTri& rule = triangle_rule_collapsed(5);
  double area = 0.0, mean_h = 0.0, mean_e = 0.0;
  for_each_volume_point(
      mesh,
      [&](const Element& el, const PointValues& v, double w) {
        area += w;
        mean_h += w * ph(el.tri(), v);
        mean_e += w * ex.pressure(v.x);
      },
      rule);
  mean_h /= area;
  mean_e /= area;
  ErrorNorms e;
  for_each_volume_point(
      mesh,
      [&](const Element& el, const PointValues& v, double w) {
        const Vec2 ue = ex.velocity(v.x);
        const Mat2 Ge = ex.gradient(v.x);
        const double pe = ex.pressure(v.x) - mean_e;
        e.l2_u += w * (uh(el.tri(), v) - ue).squaredNorm();
        e.h1_u += w * (Guh(el.tri(), v) - Ge).squaredNorm();
        e.l2_p += w * std::pow(ph(el.tri(), v) - mean_h - pe, 2);
        e.norm_u += w * ue.squaredNorm();
        e.norm_p += w * pe * pe;
      },
      rule);
  e.l2_u = std::sqrt(e.l2_u);
  e.h1_u = std::sqrt(e.h1_u);
  e.l2_p = std::sqrt(e.l2_p);
  e.norm_u = std::sqrt(e.norm_u);
  e.norm_p = std::sqrt(e.norm_p);
  return e;
}

}  // namespace

ErrorNorms compute_errors(const FlowState& flow, const ExactFields& exact) {
  return errors_impl(
      *flow.mesh, [&](int t, const PointValues& v) { return flow.velocity_at(t, v); },
      [&](int t, const PointValues& v) { return flow.gradient_at(t, v); },
      [&](int t, const PointValues& v) { return flow.pressure_at(t, v); }, exact);
}

FlowState interpolate_exact(std::shared_ptr<const Mesh> mesh, const ExactFields& exact, double nu) {
  FlowState s;
  s.mesh = mesh;
  s.nu = nu;
  s.problem = "interpolant";
  s.velocity.resize(2 * mesh->num_nodes());
  for (int i = 0; i < mesh->num_nodes(); ++i) s.velocity.segment<2>(2 * i) = exact.velocity(mesh->nodes[i]);
  s.pressure.resize(mesh->num_vertices());
  for (int i = 0; i < mesh->num_vertices(); ++i) s.pressure(i) = exact.pressure(mesh->vertices[i]);
  return s;
}

ErrorNorms interpolation_errors(std::shared_ptr<const Mesh> mesh, const ExactFields& exact) {
  return compute_errors(interpolate_exact(std::move(mesh), exact, 1.0), exact);
}

std::vector<ConvergenceRow> convergence_table(const std::vector<double>& h, const std::vector<ErrorNorms>& errors) {
  std::vector<ConvergenceRow> rows;
  auto order = [](double a, double b) { return (a > 0.0 && b > 0.0) ? std::log2(a / b) : 0.0; };
  for (size_t i = 0; i < errors.size(); ++i) {
    ConvergenceRow r;
    r.level = static_cast<int>(i);
    r.h = h[i];
    r.e_l2_u = errors[i].l2_u;
    r.e_h1_u = errors[i].h1_u;
    r.e_l2_p = errors[i].l2_p;
    if (i > 0) {
      // Nested levels halve h.
      r.order_l2_u = order(errors[i - 1].l2_u, errors[i].l2_u);
      r.order_h1_u = order(errors[i - 1].h1_u, errors[i].h1_u);
      r.order_l2_p = order(errors[i - 1].l2_p, errors[i].l2_p);
    }
    rows.push_back(r);
  }
  return rows;
}

std::string convergence_csv(const std::vector<ConvergenceRow>& rows, const std::string& header_comment) {
  std::ostringstream os;
  if (!header_comment.empty()) os << header_comment;
  os << "level,h,eL2_u,order,eH1_u,order,eL2_p,order\n";
  os << std::setprecision(10);
  for (const auto& r : rows) {
    os << r.level << ',' << r.h << ',' << r.e_l2_u << ',';
    if (r.level > 0) os << r.order_l2_u;
    os << ',' << r.e_h1_u << ',';
    if (r.level > 0) os << r.order_h1_u;
    os << ',' << r.e_l2_p << ',';
    if (r.level > 0) os << r.order_l2_p;
    os << '\n';
  }
  return os.str();
}

}  // namespace slipflow
