#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>

#include "slipflow/mesh.hpp"
#include "slipflow/quadrature.hpp"

namespace slipflow {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat62 = Eigen::Matrix<double, 6, 2>;
using Mat32 = Eigen::Matrix<double, 3, 2>;

// Values of the isoparametric P2 map and the P2/P1 bases at one reference point.
struct PointValues {
  Vec2 ref = Vec2::Zero();
  Vec2 x = Vec2::Zero();
  Mat2 J = Mat2::Zero();
  double detJ = 0.0;
  Vec6 N = Vec6::Zero();
  Mat62 dN = Mat62::Zero();  // physical gradients, one row per node
  Eigen::Vector3d L = Eigen::Vector3d::Zero();
  Mat32 dL = Mat32::Zero();
};

class Element {
 public:
  Element(const Mesh& mesh, int tri);

  void eval(const Vec2& ref, PointValues& v) const;
  PointValues eval(const Vec2& ref) const {
    PointValues v;
    eval(ref, v);
    return v;
  }

  int tri() const { return tri_; }
  const std::array<int, 6>& nodes() const { return nodes_; }
  const std::array<Vec2, 6>& coords() const { return X_; }

 private:
  int tri_;
  std::array<int, 6> nodes_;
  std::array<Vec2, 6> X_;
};

// Reference point on local edge e at fraction s from its first vertex, and d(ref)/ds.
Vec2 edge_ref_point(int local_edge, double s);
Vec2 edge_ref_tangent(int local_edge);

struct BoundaryQuadPoint {
  const BoundaryEdge* edge = nullptr;
  PointValues values;
  BoundaryFrame frame;  // exact curve frame at the mapped parameter
  double weight = 0.0;  // includes the arclength element
};

// Gauss-Legendre points along every boundary edge (isoparametric arclength).
void for_each_boundary_point(const Mesh& mesh, const std::function<void(const BoundaryQuadPoint&)>& fn,
                             int points_per_edge = 6);

// fn(element, values, weight) at every volume quadrature point; weight includes det J.
template <class F>
void for_each_volume_point(const Mesh& mesh, F&& fn, const RuleTri& rule = triangle_rule_deg5()) {
  PointValues v;
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    const Element el(mesh, k);
    for (size_t q = 0; q < rule.x.size(); ++q) {
      el.eval(rule.x[q], v);
      fn(el, v, rule.w[q] * v.detJ);
    }
  }
}

}  // namespace slipflow
