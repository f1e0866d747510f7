#include "slipflow/assembly.hpp"

#include <cmath>

#include "slipflow/error.hpp"
#include "slipflow/quadrature.hpp"

namespace slipflow {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

SpMat from_triplets(int rows, int cols, const Triplets& t) {
  SpMat m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.prune(0.0);
  return m;
}

Vec2 velocity_at(const Element& el, const PointValues& v, const VectorXd& w) {
  Vec2 u = Vec2::Zero();
  for (int a = 0; a < 6; ++a) u += v.N(a) * Vec2(w(2 * el.nodes()[a]), w(2 * el.nodes()[a] + 1));
  return u;
}

// G(c, d) = d u_c / d x_d
Mat2 gradient_at(const Element& el, const PointValues& v, const VectorXd& w) {
  Mat2 G = Mat2::Zero();
  for (int a = 0; a < 6; ++a) G += Vec2(w(2 * el.nodes()[a]), w(2 * el.nodes()[a] + 1)) * v.dN.row(a);
  return G;
}

}  // namespace

VectorXd DofMap::to_frame(const VectorXd& u) const {
  VectorXd r = u;
  for (int i : mesh_->boundary_nodes) {
    const BoundaryFrame& f = mesh_->node_frame[i];
    const Vec2 ui(u(2 * i), u(2 * i + 1));
    r(2 * i) = ui.dot(f.n);
    r(2 * i + 1) = ui.dot(f.tau);
  }
  return r;
}

VectorXd DofMap::from_frame(const VectorXd& v) const {
  VectorXd r = v;
  for (int i : mesh_->boundary_nodes) {
    const BoundaryFrame& f = mesh_->node_frame[i];
    const Vec2 ui = v(2 * i) * f.n + v(2 * i + 1) * f.tau;
    r(2 * i) = ui.x();
    r(2 * i + 1) = ui.y();
  }
  return r;
}

VectorXd ConstrainedSpace::coordinates(const VectorXd& u) const {
  return (P.transpose() * (u - g)).cwiseQuotient(column_norm2);
}

std::vector<double> interpolate_normal_data(const Mesh& mesh, const std::vector<BoundaryScalar>& a_star) {
  std::vector<double> a(mesh.num_nodes(), 0.0);
  for (int i : mesh.boundary_nodes) a[i] = a_star.at(mesh.node_component[i])(mesh.node_frame[i]);
  return a;
}

ConstrainedSpace normal_trace_space(const Mesh& mesh, const std::vector<double>& normal_values,
                                    const std::vector<int>* mirror) {
  const int nn = mesh.num_nodes();
  ConstrainedSpace s;
  s.g = VectorXd::Zero(2 * nn);
  Triplets t;
  std::vector<double> norms;
  int col = 0;
  auto add_col = [&](std::initializer_list<std::pair<int, double>> entries) {
    double n2 = 0.0;
    for (auto [row, val] : entries) {
      t.emplace_back(row, col, val);
      n2 += val * val;
    }
    norms.push_back(n2);
    ++col;
  };
  for (int i = 0; i < nn; ++i) {
    const int m = mirror ? (*mirror)[i] : i;
    if (mirror && m < i) continue;  // handled with its representative
    const bool bnd = mesh.is_boundary_node(i);
    if (!mirror || m == i) {
      if (!bnd) {
        add_col({{2 * i, 1.0}});
        if (!mirror) add_col({{2 * i + 1, 1.0}});
      } else {
        const BoundaryFrame& f = mesh.node_frame[i];
        const Vec2 gi = normal_values[i] * f.n;
        s.g(2 * i) = gi.x();
        s.g(2 * i + 1) = mirror ? 0.0 : gi.y();
        if (!mirror) add_col({{2 * i, f.tau.x()}, {2 * i + 1, f.tau.y()}});
      }
      continue;
    }
    // Mirror pair (i, m): u(m) = R u(i).
    if (!bnd) {
      add_col({{2 * i, 1.0}, {2 * m, 1.0}});
      add_col({{2 * i + 1, 1.0}, {2 * m + 1, -1.0}});
    } else {
      const BoundaryFrame& f = mesh.node_frame[i];
      const Vec2 gi = normal_values[i] * f.n;
      s.g(2 * i) = gi.x();
      s.g(2 * i + 1) = gi.y();
      s.g(2 * m) = gi.x();
      s.g(2 * m + 1) = -gi.y();
      add_col({{2 * i, f.tau.x()}, {2 * i + 1, f.tau.y()}, {2 * m, f.tau.x()}, {2 * m + 1, -f.tau.y()}});
    }
  }
  s.P = from_triplets(2 * nn, col, t);
  s.column_norm2 = Eigen::Map<VectorXd>(norms.data(), static_cast<Eigen::Index>(norms.size()));
  return s;
}

ConstrainedSpace apply_normal_trace(const Mesh& mesh, const DofMap&, const ProblemData& data,
                                    const std::vector<int>* mirror) {
  const DomainSpec& dom = mesh.domain();
  double total = 0.0, sup = 0.0, length = 0.0;
  for (int j = 0; j < dom.num_components(); ++j) {
    total += boundary_integral(dom, j, data.a_star.at(j));
    length += boundary_length(dom, j);
    boundary_integral(dom, j, [&](const BoundaryFrame& f) {
      sup = std::max(sup, std::abs(data.a_star[j](f)));
      return 0.0;
    });
  }
  if (std::abs(total) > 1e-8 * sup * length)
    throw Error(ErrorKind::compatibility, "total boundary flux of a_* is " + std::to_string(total) + ", expected 0");
  return normal_trace_space(mesh, interpolate_normal_data(mesh, data.a_star), mirror);
}

SpMat pressure_space(const Mesh& mesh, const std::vector<int>* vertex_mirror) {
  const int nv = mesh.num_vertices();
  Triplets t;
  int col = 0;
  for (int i = 0; i < nv; ++i) {
    const int m = vertex_mirror ? (*vertex_mirror)[i] : i;
    if (m < i) continue;
    t.emplace_back(i, col, 1.0);
    if (m != i) t.emplace_back(m, col, 1.0);
    ++col;
  }
  return from_triplets(nv, col, t);
}

SpMat assemble_viscous(const Mesh& mesh, const DofMap& dofs, double nu) {
  Triplets t;
  t.reserve(static_cast<size_t>(mesh.num_triangles()) * 144 * 7);
  for_each_volume_point(mesh, [&](const Element& el, const PointValues& v, double w) {
    const auto& nodes = el.nodes();
    for (int a = 0; a < 6; ++a) {
      for (int b = 0; b < 6; ++b) {
        const double gg = v.dN.row(a).dot(v.dN.row(b));
        for (int c = 0; c < 2; ++c) {
          for (int d = 0; d < 2; ++d) {
            const double val = nu * w * ((c == d ? gg : 0.0) + v.dN(b, c) * v.dN(a, d));
            t.emplace_back(2 * nodes[a] + c, 2 * nodes[b] + d, val);
          }
        }
      }
    }
  });
  return from_triplets(dofs.num_velocity(), dofs.num_velocity(), t);
}

SpMat assemble_friction(const Mesh& mesh, const DofMap& dofs, const std::vector<BoundaryScalar>& beta) {
  Triplets t;
  for_each_boundary_point(mesh, [&](const BoundaryQuadPoint& qp) {
    const double b = beta.at(qp.frame.component)(qp.frame);
    if (!(b >= 0.0)) throw Error(ErrorKind::data, "negative friction coefficient at a boundary quadrature point");
    if (b == 0.0) return;
    const auto& nodes = mesh.tri_nodes[qp.edge->tri];
    const Vec2& tau = qp.frame.tau;
    for (int a = 0; a < 6; ++a) {
      if (qp.values.N(a) == 0.0) continue;
      for (int c = 0; c < 6; ++c) {
        if (qp.values.N(c) == 0.0) continue;
        const double s = b * qp.weight * qp.values.N(a) * qp.values.N(c);
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) t.emplace_back(2 * nodes[a] + i, 2 * nodes[c] + j, s * tau(i) * tau(j));
      }
    }
  });
  return from_triplets(dofs.num_velocity(), dofs.num_velocity(), t);
}

SpMat assemble_divergence(const Mesh& mesh, const DofMap& dofs) {
  Triplets t;
  for_each_volume_point(mesh, [&](const Element& el, const PointValues& v, double w) {
    const auto& nodes = el.nodes();
    const auto& tri = mesh.triangles[el.tri()];
    for (int q = 0; q < 3; ++q)
      for (int b = 0; b < 6; ++b)
        for (int d = 0; d < 2; ++d) t.emplace_back(tri[q], 2 * nodes[b] + d, w * v.L(q) * v.dN(b, d));
  });
  return from_triplets(dofs.num_pressure(), dofs.num_velocity(), t);
}

SpMat assemble_convection(const Mesh& mesh, const DofMap& dofs, const VectorXd& w) {
  Triplets t;
  for_each_volume_point(mesh, [&](const Element& el, const PointValues& v, double wq) {
    const Vec2 wv = velocity_at(el, v, w);
    const auto& nodes = el.nodes();
    for (int a = 0; a < 6; ++a) {
      for (int b = 0; b < 6; ++b) {
        const double val = wq * v.N(a) * (wv.x() * v.dN(b, 0) + wv.y() * v.dN(b, 1));
        t.emplace_back(2 * nodes[a], 2 * nodes[b], val);
        t.emplace_back(2 * nodes[a] + 1, 2 * nodes[b] + 1, val);
      }
    }
  });
  return from_triplets(dofs.num_velocity(), dofs.num_velocity(), t);
}

VectorXd convection_vector(const Mesh& mesh, const DofMap& dofs, const VectorXd& w) {
  VectorXd r = VectorXd::Zero(dofs.num_velocity());
  for_each_volume_point(mesh, [&](const Element& el, const PointValues& v, double wq) {
    const Vec2 wv = velocity_at(el, v, w);
    const Vec2 conv = gradient_at(el, v, w) * wv;
    for (int a = 0; a < 6; ++a) {
      r(2 * el.nodes()[a]) += wq * v.N(a) * conv.x();
      r(2 * el.nodes()[a] + 1) += wq * v.N(a) * conv.y();
    }
  });
  return r;
}

SpMat assemble_convection_jacobian(const Mesh& mesh, const DofMap& dofs, const VectorXd& w) {
  Triplets t;
  for_each_volume_point(mesh, [&](const Element& el, const PointValues& v, double wq) {
    const Mat2 G = gradient_at(el, v, w);
    const auto& nodes = el.nodes();
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) {
        const double s = wq * v.N(a) * v.N(b);
        for (int c = 0; c < 2; ++c)
          for (int d = 0; d < 2; ++d) t.emplace_back(2 * nodes[a] + c, 2 * nodes[b] + d, s * G(c, d));
      }
  });
  return from_triplets(dofs.num_velocity(), dofs.num_velocity(), t);
}

VectorXd assemble_load(const Mesh& mesh, const DofMap& dofs, const ProblemData& data) {
  VectorXd r = VectorXd::Zero(dofs.num_velocity());
  if (!data.force.is_zero()) {
    for_each_volume_point(mesh, [&](const Element& el, const PointValues& v, double w) {
      const Vec2 f = data.force.eval(el, v);
      for (int a = 0; a < 6; ++a) {
        r(2 * el.nodes()[a]) += w * v.N(a) * f.x();
        r(2 * el.nodes()[a] + 1) += w * v.N(a) * f.y();
      }
    });
  }
  for_each_boundary_point(mesh, [&](const BoundaryQuadPoint& qp) {
    const double b = data.b_tau.at(qp.frame.component)(qp.frame);
    if (b == 0.0) return;
    const auto& nodes = mesh.tri_nodes[qp.edge->tri];
    for (int a = 0; a < 6; ++a) {
      const double s = qp.weight * b * qp.values.N(a);
      r(2 * nodes[a]) += s * qp.frame.tau.x();
      r(2 * nodes[a] + 1) += s * qp.frame.tau.y();
    }
  });
  return r;
}

SpMat assemble_vector_mass(const Mesh& mesh, const DofMap& dofs) {
  Triplets t;
  for_each_volume_point(mesh, [&](const Element& el, const PointValues& v, double w) {
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) {
        const double val = w * v.N(a) * v.N(b);
        t.emplace_back(2 * el.nodes()[a], 2 * el.nodes()[b], val);
        t.emplace_back(2 * el.nodes()[a] + 1, 2 * el.nodes()[b] + 1, val);
      }
  });
  return from_triplets(dofs.num_velocity(), dofs.num_velocity(), t);
}

SpMat assemble_vector_h1(const Mesh& mesh, const DofMap& dofs) {
  Triplets t;
  for_each_volume_point(mesh, [&](const Element& el, const PointValues& v, double w) {
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) {
        const double val = w * (v.N(a) * v.N(b) + v.dN.row(a).dot(v.dN.row(b)));
        t.emplace_back(2 * el.nodes()[a], 2 * el.nodes()[b], val);
        t.emplace_back(2 * el.nodes()[a] + 1, 2 * el.nodes()[b] + 1, val);
      }
  });
  return from_triplets(dofs.num_velocity(), dofs.num_velocity(), t);
}

VectorXd pressure_mean_vector(const Mesh& mesh) {
  VectorXd m = VectorXd::Zero(mesh.num_vertices());
  for_each_volume_point(mesh, [&](const Element& el, const PointValues& v, double w) {
    for (int q = 0; q < 3; ++q) m(mesh.triangles[el.tri()][q]) += w * v.L(q);
  });
  return m;
}

VectorXd circulation_functional(const Mesh& mesh, int component) {
  VectorXd c = VectorXd::Zero(2 * mesh.num_nodes());
  for_each_boundary_point(mesh, [&](const BoundaryQuadPoint& qp) {
    if (qp.frame.component != component) return;
    const auto& nodes = mesh.tri_nodes[qp.edge->tri];
    for (int a = 0; a < 6; ++a) {
      c(2 * nodes[a]) += qp.weight * qp.values.N(a) * qp.frame.tau.x();
      c(2 * nodes[a] + 1) += qp.weight * qp.values.N(a) * qp.frame.tau.y();
    }
  });
  return c;
}

VectorXd rigid_rotation(const Mesh& mesh, const Vec2& center, double b) {
  VectorXd u(2 * mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    const Vec2 r = mesh.nodes[i] - center;
    u(2 * i) = -b * r.y();
    u(2 * i + 1) = b * r.x();
  }
  return u;
}

SpMat assemble_scalar_stiffness(const Mesh& mesh) {
  Triplets t;
  for_each_volume_point(mesh, [&](const Element& el, const PointValues& v, double w) {
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) t.emplace_back(el.nodes()[a], el.nodes()[b], w * v.dN.row(a).dot(v.dN.row(b)));
  });
  return from_triplets(mesh.num_nodes(), mesh.num_nodes(), t);
}

SpMat assemble_scalar_mass(const Mesh& mesh) {
  Triplets t;
  for_each_volume_point(mesh, [&](const Element& el, const PointValues& v, double w) {
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) t.emplace_back(el.nodes()[a], el.nodes()[b], w * v.N(a) * v.N(b));
  });
  return from_triplets(mesh.num_nodes(), mesh.num_nodes(), t);
}

VectorXd assemble_scalar_boundary_load(const Mesh& mesh, const std::vector<BoundaryScalar>& g) {
  VectorXd r = VectorXd::Zero(mesh.num_nodes());
  for_each_boundary_point(mesh, [&](const BoundaryQuadPoint& qp) {
    const double gv = g.at(qp.frame.component)(qp.frame);
    const auto& nodes = mesh.tri_nodes[qp.edge->tri];
    for (int a = 0; a < 6; ++a) r(nodes[a]) += qp.weight * gv * qp.values.N(a);
  });
  return r;
}

}  // namespace slipflow
