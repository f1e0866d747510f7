#include "slipflow/fe.hpp"

#include <cmath>

#include "slipflow/quadrature.hpp"

namespace slipflow {

Element::Element(const Mesh& mesh, int tri) : tri_(tri), nodes_(mesh.tri_nodes[tri]) {
  for (int a = 0; a < 6; ++a) X_[a] = mesh.nodes[nodes_[a]];
}

void Element::eval(const Vec2& ref, PointValues& v) const {
  const double xi = ref.x(), eta = ref.y();
  const double l0 = 1.0 - xi - eta, l1 = xi, l2 = eta;
  v.ref = ref;
  v.N << l0 * (2 * l0 - 1), l1 * (2 * l1 - 1), l2 * (2 * l2 - 1), 4 * l0 * l1, 4 * l1 * l2, 4 * l2 * l0;
  Mat62 dr;
  dr << -(4 * l0 - 1), -(4 * l0 - 1),  //
      4 * l1 - 1, 0.0,                 //
      0.0, 4 * l2 - 1,                 //
      4 * (l0 - l1), -4 * l1,          //
      4 * l2, 4 * l1,                  //
      -4 * l2, 4 * (l0 - l2);
  v.x.setZero();
  v.J.setZero();
  for (int a = 0; a < 6; ++a) {
    v.x += v.N(a) * X_[a];
    v.J += X_[a] * dr.row(a);
  }
  v.detJ = v.J.determinant();
  const Mat2 Jinv = v.J.inverse();
  v.dN = dr * Jinv;
  v.L << l0, l1, l2;
  Mat32 dlr;
  dlr << -1, -1, 1, 0, 0, 1;
  v.dL = dlr * Jinv;
}

Vec2 edge_ref_point(int local_edge, double s) {
  switch (local_edge) {
    case 0: return Vec2(s, 0.0);
    case 1: return Vec2(1.0 - s, s);
    default: return Vec2(0.0, 1.0 - s);
  }
}

Vec2 edge_ref_tangent(int local_edge) {
  switch (local_edge) {
    case 0: return Vec2(1.0, 0.0);
    case 1: return Vec2(-1.0, 1.0);
    default: return Vec2(0.0, -1.0);
  }
}

void for_each_boundary_point(const Mesh& mesh, const std::function<void(const BoundaryQuadPoint&)>& fn,
                             int points_per_edge) {
  const Rule1D& rule = gauss_legendre(points_per_edge);
  BoundaryQuadPoint qp;
  for (const BoundaryEdge& be : mesh.boundary_edges) {
    const Element el(mesh, be.tri);
    qp.edge = &be;
    const Vec2 dref = edge_ref_tangent(be.local_edge);
    for (size_t q = 0; q < rule.x.size(); ++q) {
      const double s = rule.x[q];
      el.eval(edge_ref_point(be.local_edge, s), qp.values);
      double t = be.t0 + s * (be.t1 - be.t0);
      t -= std::floor(t);
      if (t >= 1.0) t = 0.0;
      qp.frame = frame_at(mesh.domain(), be.component, t);
      qp.weight = rule.w[q] * (qp.values.J * dref).norm();
      fn(qp);
    }
  }
}

}  // namespace slipflow
