#pragma once

#include <functional>
#include <vector>

#include "slipflow/fe.hpp"
#include "slipflow/geometry.hpp"

namespace slipflow {

// Boundary data are evaluated on the exact curve; the frame carries component, t and the point.
using BoundaryScalar = std::function<double(const BoundaryFrame&)>;

BoundaryScalar constant_scalar(double c);

// Volumetric force: analytic, per-P2-node values, or an element-level callback.
class ForceField {
 public:
  using Pointwise = std::function<Vec2(const Vec2&)>;
  using ElementWise = std::function<Vec2(const PointValues&, int tri)>;

  ForceField() = default;
  static ForceField analytic(Pointwise f);
  static ForceField nodal(std::vector<Vec2> values);
  static ForceField element(ElementWise f);

  bool is_zero() const { return !pointwise_ && !element_ && nodal_.empty(); }
  bool has_pointwise() const { return static_cast<bool>(pointwise_); }
  const Pointwise& pointwise() const { return pointwise_; }
  const std::vector<Vec2>& nodal_values() const { return nodal_; }
  bool is_nodal() const { return !nodal_.empty(); }

  Vec2 eval(const Element& el, const PointValues& v) const;

 private:
  Pointwise pointwise_;
  ElementWise element_;
  std::vector<Vec2> nodal_;
};

struct ProblemData {
  double nu = 1.0;
  ForceField force;
  std::vector<BoundaryScalar> beta;    // per component, >= 0
  std::vector<BoundaryScalar> a_star;  // normal velocity
  std::vector<BoundaryScalar> b_tau;   // tangential density of b_*

  static ProblemData constant(double nu, const std::vector<double>& beta, const std::vector<double>& a_star,
                              const std::vector<double>& b_tau);

  // Component counts and beta >= 0 at the boundary quadrature points.
  void validate(const DomainSpec& domain) const;
  // Exact-geometry fluxes of a_* per component.
  std::vector<double> fluxes(const DomainSpec& domain) const;
  // beta vanishes at every boundary quadrature point.
  bool beta_vanishes(const DomainSpec& domain) const;
};

}  // namespace slipflow
