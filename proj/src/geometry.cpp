#include "slipflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "slipflow/error.hpp"
#include "slipflow/quadrature.hpp"

namespace slipflow {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double wrap01(double t) {
  t -= std::floor(t);
  return t >= 1.0 ? 0.0 : t;
}

}  // namespace

Curve Curve::circle(const Vec2& center, double radius, bool reversed) {
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw Error(ErrorKind::geometry, "circle radius must be positive");
  Curve c;
  c.kind_ = Kind::circle;
  c.center_ = center;
  c.radius_ = radius;
  c.reversed_ = reversed;
  return c;
}

Curve Curve::spline(std::vector<Vec2> points, bool reversed) {
  const int m = static_cast<int>(points.size());
  if (m < 4) throw Error(ErrorKind::geometry, "spline needs at least 4 control points");
  if ((points.front() - points.back()).norm() == 0.0) {
    points.pop_back();
  }
  for (int i = 0; i < static_cast<int>(points.size()); ++i) {
    const Vec2& a = points[i];
    const Vec2& b = points[(i + 1) % points.size()];
    if ((a - b).norm() == 0.0) throw Error(ErrorKind::geometry, "repeated spline control point");
  }
  Curve c;
  c.kind_ = Kind::spline;
  c.reversed_ = reversed;
  c.points_ = std::move(points);
  const int n = static_cast<int>(c.points_.size());
  // Periodic cubic spline, unit knot spacing: M[i-1] + 4 M[i] + M[i+1] = 6 (P[i+1] - 2 P[i] + P[i-1]).
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd rhs(n, 2);
  for (int i = 0; i < n; ++i) {
    A(i, i) = 4.0;
    A(i, (i + 1) % n) += 1.0;
    A(i, (i + n - 1) % n) += 1.0;
    const Vec2 d = c.points_[(i + 1) % n] - 2.0 * c.points_[i] + c.points_[(i + n - 1) % n];
    rhs.row(i) = 6.0 * d.transpose();
  }
  const Eigen::MatrixXd M = A.partialPivLu().solve(rhs);
  c.second_.resize(n);
  for (int i = 0; i < n; ++i) c.second_[i] = M.row(i).transpose();
  return c;
}

void Curve::spline_eval(double t, Vec2* p, Vec2* dp, Vec2* ddp) const {
  const int n = static_cast<int>(points_.size());
  const double u = wrap01(t) * n;
  int i = static_cast<int>(std::floor(u));
  if (i >= n) i = n - 1;
  const double s = u - i;
  const Vec2& P0 = points_[i];
  const Vec2& P1 = points_[(i + 1) % n];
  const Vec2& M0 = second_[i];
  const Vec2& M1 = second_[(i + 1) % n];
  const double r = 1.0 - s;
  if (p) *p = r * P0 + s * P1 + ((r * r * r - r) * M0 + (s * s * s - s) * M1) / 6.0;
  if (dp) *dp = n * ((P1 - P0) + ((1.0 - 3.0 * r * r) * M0 + (3.0 * s * s - 1.0) * M1) / 6.0);
  if (ddp) *ddp = double(n) * n * (r * M0 + s * M1);
}

Vec2 Curve::point(double t) const {
  if (kind_ == Kind::circle) {
    const double th = (reversed_ ? -two_pi : two_pi) * t;
    return center_ + radius_ * Vec2(std::cos(th), std::sin(th));
  }
  Vec2 p;
  spline_eval(reversed_ ? 1.0 - t : t, &p, nullptr, nullptr);
  return p;
}

Vec2 Curve::d1(double t) const {
  if (kind_ == Kind::circle) {
    const double w = reversed_ ? -two_pi : two_pi;
    const double th = w * t;
    return w * radius_ * Vec2(-std::sin(th), std::cos(th));
  }
  Vec2 d;
  spline_eval(reversed_ ? 1.0 - t : t, nullptr, &d, nullptr);
  return reversed_ ? Vec2(-d) : d;
}

Vec2 Curve::d2(double t) const {
  if (kind_ == Kind::circle) {
    const double w = reversed_ ? -two_pi : two_pi;
    const double th = w * t;
    return -w * w * radius_ * Vec2(std::cos(th), std::sin(th));
  }
  Vec2 d;
  spline_eval(reversed_ ? 1.0 - t : t, nullptr, nullptr, &d);
  return d;
}

Curve Curve::reversed_copy() const {
  Curve c = *this;
  c.reversed_ = !reversed_;
  return c;
}

std::vector<Vec2> Curve::sample(int n) const {
  std::vector<Vec2> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(point(double(i) / n));
  return out;
}

double Curve::project(const Vec2& x, double* distance) const {
  if (kind_ == Kind::circle) {
    const Vec2 d = x - center_;
    double th = std::atan2(d.y(), d.x());
    double t = th / two_pi;
    if (reversed_) t = -t;
    t = wrap01(t);
    if (distance) *distance = std::abs(d.norm() - radius_);
    return t;
  }
  const int ns = 16 * static_cast<int>(points_.size());
  double best_t = 0.0, best_d = 1e300;
  for (int i = 0; i < ns; ++i) {
    const double t = double(i) / ns;
    const double d = (point(t) - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best_t = t;
    }
  }
  double t = best_t;
  for (int it = 0; it < 50; ++it) {
    const Vec2 r = point(t) - x;
    const Vec2 g1 = d1(t);
    const Vec2 g2 = d2(t);
    const double f = r.dot(g1);
    const double df = g1.squaredNorm() + r.dot(g2);
    if (df <= 0.0) break;
    double step = f / df;
    const double max_step = 0.5 / ns;
    step = std::clamp(step, -max_step, max_step);
    t -= step;
    if (std::abs(step) < 1e-15) break;
  }
  t = wrap01(t);
  if (distance) *distance = (point(t) - x).norm();
  return t;
}

double Curve::signed_area() const {
  if (kind_ == Kind::circle) {
    const double a = std::numbers::pi * radius_ * radius_;
    return reversed_ ? -a : a;
  }
  const Rule1D& g = gauss_legendre(8);
  const int panels = 4 * static_cast<int>(points_.size());
  double area = 0.0;
  for (int p = 0; p < panels; ++p) {
    for (size_t q = 0; q < g.x.size(); ++q) {
      const double t = (p + g.x[q]) / panels;
      area += 0.5 * cross(point(t), d1(t)) * g.w[q] / panels;
    }
  }
  return area;
}

bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& x) {
  bool inside = false;
  const size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y() > x.y()) != (b.y() > x.y())) {
      const double xc = a.x() + (x.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (x.x() < xc) inside = !inside;
    }
  }
  return inside;
}

DomainSpec::DomainSpec(std::vector<Curve> curves, std::vector<std::string> labels)
    : curves_(std::move(curves)), labels_(std::move(labels)) {
  if (curves_.empty()) throw Error(ErrorKind::geometry, "domain needs an outer curve");
  if (labels_.empty()) {
    for (int j = 0; j < num_components(); ++j)
      labels_.push_back(j == 0 ? "outer" : "hole" + std::to_string(j));
  }
  if (labels_.size() != curves_.size())
    throw Error(ErrorKind::geometry, "label count does not match curve count");

  const int ns = 512;
  for (const Curve& c : curves_) polygons_.push_back(c.sample(ns));

  double diam = 0.0;
  for (const Vec2& a : polygons_[0])
    for (const Vec2& b : polygons_[0]) diam = std::max(diam, (a - b).norm());
  diameter_ = diam;

  for (int j = 0; j < num_components(); ++j) {
    const Curve& c = curves_[j];
    if ((c.point(0.0) - c.point(1.0 - 1e-15)).norm() > 1e-12 * diameter_ + 1e-13)
      throw Error(ErrorKind::geometry, "curve " + labels_[j] + " is not closed");
    for (int i = 0; i < 4 * ns; ++i) {
      if (c.d1((i + 0.5) / (4 * ns)).norm() < 1e-14 * diameter_)
        throw Error(ErrorKind::geometry, "curve " + labels_[j] + " has a degenerate tangent");
    }
    const double area = c.signed_area();
    // Outer: outward normal points away from the enclosed region, i.e. to the right of a
    // counterclockwise traversal. Holes: outward normal of the domain points into the hole.
    const double ccw = area > 0.0 ? 1.0 : -1.0;
    normal_sign_.push_back(j == 0 ? -ccw : ccw);
  }

  for (int j = 1; j < num_components(); ++j) {
    for (const Vec2& x : polygons_[j]) {
      if (!point_in_polygon(polygons_[0], x))
        throw Error(ErrorKind::geometry, "hole " + labels_[j] + " is not inside the outer curve");
      for (int k = 1; k < num_components(); ++k) {
        if (k != j && point_in_polygon(polygons_[k], x))
          throw Error(ErrorKind::geometry, "holes " + labels_[j] + " and " + labels_[k] + " overlap");
      }
    }
  }
}

bool DomainSpec::contains(const Vec2& x) const {
  if (!point_in_polygon(polygons_[0], x)) return false;
  for (int j = 1; j < num_components(); ++j)
    if (point_in_polygon(polygons_[j], x)) return false;
  return true;
}

BoundaryFrame frame_at(const DomainSpec& domain, int component, double t) {
  if (component < 0 || component >= domain.num_components())
    throw Error(ErrorKind::geometry, "component index out of range");
  const Curve& c = domain.curve(component);
  const Vec2 g1 = c.d1(t);
  const Vec2 g2 = c.d2(t);
  const double speed = g1.norm();
  if (speed < 1e-14 * domain.diameter())
    throw Error(ErrorKind::geometry, "degenerate tangent on curve " + domain.label(component));
  const Vec2 T = g1 / speed;
  const Vec2 left(-T.y(), T.x());
  const double s = domain.normal_sign(component);
  BoundaryFrame f;
  f.component = component;
  f.t = t;
  f.point = c.point(t);
  f.speed = speed;
  f.n = s * left;
  f.tau = Vec2(f.n.y(), -f.n.x());
  // Signed curvature w.r.t. the left normal, converted to the outward normal.
  const double k_left = cross(g1, g2) / (speed * speed * speed);
  f.kappa = k_left * s;
  const double wxy = f.kappa * f.tau.x() * f.tau.y();
  f.W << f.kappa * f.tau.x() * f.tau.x(), wxy, wxy, f.kappa * f.tau.y() * f.tau.y();
  return f;
}

double boundary_integral(const DomainSpec& domain, int component, const BoundaryIntegrand& g) {
  const Rule1D& rule = gauss_legendre(domain.quadrature.nodes);
  const int panels = domain.quadrature.panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    double panel_sum = 0.0;
    for (size_t q = 0; q < rule.x.size(); ++q) {
      const double t = (p + rule.x[q]) / panels;
      const BoundaryFrame f = frame_at(domain, component, t);
      panel_sum += g(f) * f.speed * rule.w[q];
    }
    sum += panel_sum / panels;
  }
  return sum;
}

double boundary_length(const DomainSpec& domain, int component) {
  return boundary_integral(domain, component, [](const BoundaryFrame&) { return 1.0; });
}

SymmetryInfo classify_symmetry(const DomainSpec& domain) {
  SymmetryInfo info;
  const double tol = 1e-10 * domain.diameter();

  bool all_circles = true;
  for (const Curve& c : domain.curves()) all_circles = all_circles && c.kind() == Curve::Kind::circle;
  if (all_circles) {
    const Vec2 c0 = domain.curve(0).center();
    bool same = true;
    for (const Curve& c : domain.curves()) same = same && (c.center() - c0).norm() <= tol;
    if (same) info.circular_center = c0;
  }

  bool admissible = true;
  for (const Curve& c : domain.curves()) {
    if (c.kind() == Curve::Kind::circle) {
      admissible = admissible && std::abs(c.center().y()) <= tol;
      continue;
    }
    const int ns = 256;
    bool above = false, below = false;
    for (int i = 0; i < ns && admissible; ++i) {
      const Vec2 x = c.point(double(i) / ns);
      above = above || x.y() >= -tol;
      below = below || x.y() <= tol;
      double d = 0.0;
      c.project(Vec2(x.x(), -x.y()), &d);
      if (d > tol) admissible = false;
    }
    admissible = admissible && above && below;
  }
  info.admissible_x1 = admissible;
  return info;
}

}  // namespace slipflow
