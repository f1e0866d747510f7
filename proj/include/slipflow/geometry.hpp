#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace slipflow {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline Vec2 perp(const Vec2& v) { return Vec2(-v.y(), v.x()); }
inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Closed parametric curve on t in [0, 1).
class Curve {
 public:
  enum class Kind { circle, spline };

  static Curve circle(const Vec2& center, double radius, bool reversed = false);
  // Periodic cubic spline through the control points, uniform parametrization.
  static Curve spline(std::vector<Vec2> points, bool reversed = false);

  Kind kind() const { return kind_; }
  bool reversed() const { return reversed_; }
  const Vec2& center() const { return center_; }
  double radius() const { return radius_; }
  const std::vector<Vec2>& control_points() const { return points_; }

  Vec2 point(double t) const;
  Vec2 d1(double t) const;
  Vec2 d2(double t) const;

  Curve reversed_copy() const;

  // Nearest parameter to x; writes the distance if requested.
  double project(const Vec2& x, double* distance = nullptr) const;
  // Shoelace integral; positive for counterclockwise traversal.
  double signed_area() const;
  std::vector<Vec2> sample(int n) const;

 private:
  Curve() = default;
  void spline_eval(double t, Vec2* p, Vec2* dp, Vec2* ddp) const;

  Kind kind_ = Kind::circle;
  bool reversed_ = false;
  Vec2 center_ = Vec2::Zero();
  double radius_ = 0.0;
  std::vector<Vec2> points_;
  std::vector<Vec2> second_;  // spline second derivatives at knots
};

struct BoundaryFrame {
  int component = 0;
  double t = 0.0;
  Vec2 point = Vec2::Zero();
  Vec2 n = Vec2::Zero();    // outward normal of the domain
  Vec2 tau = Vec2::Zero();  // (n2, -n1)
  double kappa = 0.0;       // d tau / ds . n
  Mat2 W = Mat2::Zero();    // kappa tau tau^T
  double speed = 0.0;       // |d gamma / dt|
};

struct QuadratureSettings {
  int panels = 32;
  int nodes = 8;
};

// Curve 0 is the outer boundary, curves 1..N the holes.
class DomainSpec {
 public:
  DomainSpec(std::vector<Curve> curves, std::vector<std::string> labels = {});

  int num_components() const { return static_cast<int>(curves_.size()); }
  int num_holes() const { return num_components() - 1; }
  const Curve& curve(int j) const { return curves_.at(j); }
  const std::vector<Curve>& curves() const { return curves_; }
  const std::string& label(int j) const { return labels_.at(j); }
  double diameter() const { return diameter_; }
  // Sign s such that the outward normal of the domain is s * left normal of the traversal.
  double normal_sign(int j) const { return normal_sign_.at(j); }
  bool contains(const Vec2& x) const;

  QuadratureSettings quadrature;

 private:
  std::vector<Curve> curves_;
  std::vector<std::string> labels_;
  std::vector<double> normal_sign_;
  std::vector<std::vector<Vec2>> polygons_;
  double diameter_ = 0.0;
};

BoundaryFrame frame_at(const DomainSpec& domain, int component, double t);

using BoundaryIntegrand = std::function<double(const BoundaryFrame&)>;

double boundary_integral(const DomainSpec& domain, int component, const BoundaryIntegrand& g);
double boundary_length(const DomainSpec& domain, int component);

struct SymmetryInfo {
  bool admissible_x1 = false;
  std::optional<Vec2> circular_center;
};

SymmetryInfo classify_symmetry(const DomainSpec& domain);

bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& x);

}  // namespace slipflow
