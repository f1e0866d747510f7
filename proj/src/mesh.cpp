#include "slipflow/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <unordered_map>

#include "slipflow/error.hpp"
#include "slipflow/quadrature.hpp"

namespace slipflow {

namespace {

double tri_area(const Vec2& a, const Vec2& b, const Vec2& c) { return 0.5 * cross(b - a, c - a); }

// Jacobian determinant of the quadratic map of a triangle at a reference point.
double iso_det(const std::array<Vec2, 6>& X, double xi, double eta) {
  const double l0 = 1.0 - xi - eta, l1 = xi, l2 = eta;
  const Vec2 d0(-1, -1), d1(1, 0), d2(0, 1);
  const std::array<Vec2, 6> dN = {(4 * l0 - 1) * d0, (4 * l1 - 1) * d1, (4 * l2 - 1) * d2,
                                  4 * (l1 * d0 + l0 * d1), 4 * (l2 * d1 + l1 * d2), 4 * (l0 * d2 + l2 * d0)};
  Mat2 J = Mat2::Zero();
  for (int a = 0; a < 6; ++a) J += X[a] * dN[a].transpose();
  return J.determinant();
}

}  // namespace

double Mesh::h_max() const {
  double h = 0.0;
  for (const auto& e : edges) h = std::max(h, (vertices[e[0]] - vertices[e[1]]).norm());
  return h;
}

double Mesh::polygonal_area() const {
  double a = 0.0;
  for (const auto& t : triangles) a += tri_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
  return a;
}

double Mesh::min_angle_degrees() const {
  double m = 180.0;
  for (const auto& t : triangles) {
    for (int k = 0; k < 3; ++k) {
      const Vec2 a = vertices[t[(k + 1) % 3]] - vertices[t[k]];
      const Vec2 b = vertices[t[(k + 2) % 3]] - vertices[t[k]];
      const double ang = std::atan2(std::abs(cross(a, b)), a.dot(b)) * 180.0 / std::numbers::pi;
      m = std::min(m, ang);
    }
  }
  return m;
}

Mesh build_mesh(DomainSpec domain, std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
                const std::vector<int>& vertex_component, const std::vector<double>& vertex_param, ErrorKind kind) {
  const int nv = static_cast<int>(vertices.size());
  if (static_cast<int>(vertex_component.size()) != nv || static_cast<int>(vertex_param.size()) != nv)
    throw Error(kind, "vertex tag arrays do not match the vertex count");
  Mesh mesh(std::move(domain));
  const DomainSpec& dom = mesh.domain();

  for (int i = 0; i < nv; ++i) {
    const int c = vertex_component[i];
    if (c >= dom.num_components()) throw Error(kind, "vertex " + std::to_string(i) + " has an invalid component");
    if (c >= 0) vertices[i] = dom.curve(c).point(vertex_param[i]);
  }

  for (size_t k = 0; k < triangles.size(); ++k) {
    auto& t = triangles[k];
    for (int v : t)
      if (v < 0 || v >= nv) throw Error(kind, "triangle " + std::to_string(k) + " references a missing vertex");
    const double a = tri_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
    if (a == 0.0) throw Error(kind, "triangle " + std::to_string(k) + " is degenerate");
    if (a < 0.0) std::swap(t[1], t[2]);
  }

  mesh.vertices = std::move(vertices);
  mesh.triangles = std::move(triangles);
  const int nt = mesh.num_triangles();

  std::unordered_map<long long, int> edge_id;
  std::vector<int> edge_count;
  std::vector<std::pair<int, int>> edge_owner;  // first (triangle, local edge)
  mesh.tri_edges.resize(nt);
  for (int k = 0; k < nt; ++k) {
    const auto& t = mesh.triangles[k];
    for (int e = 0; e < 3; ++e) {
      const int a = t[e], b = t[(e + 1) % 3];
      const long long key = static_cast<long long>(std::min(a, b)) * nv + std::max(a, b);
      auto it = edge_id.find(key);
      int id;
      if (it == edge_id.end()) {
        id = static_cast<int>(mesh.edges.size());
        edge_id.emplace(key, id);
        mesh.edges.push_back({std::min(a, b), std::max(a, b)});
        edge_count.push_back(0);
        edge_owner.emplace_back(k, e);
      } else {
        id = it->second;
      }
      if (++edge_count[id] > 2)
        throw Error(kind, "non-conforming mesh: edge (" + std::to_string(a) + "," + std::to_string(b) +
                              ") shared by more than two triangles");
      mesh.tri_edges[k][e] = id;
    }
  }

  const int ne = mesh.num_edges();
  mesh.nodes.resize(nv + ne);
  mesh.node_component.assign(nv + ne, -1);
  mesh.node_param.assign(nv + ne, 0.0);
  mesh.node_frame.assign(nv + ne, BoundaryFrame{});
  for (int i = 0; i < nv; ++i) mesh.nodes[i] = mesh.vertices[i];
  for (int e = 0; e < ne; ++e) mesh.nodes[nv + e] = 0.5 * (mesh.vertices[mesh.edges[e][0]] + mesh.vertices[mesh.edges[e][1]]);

  std::vector<int> boundary_degree(nv, 0);
  for (int e = 0; e < ne; ++e) {
    if (edge_count[e] != 1) continue;
    const auto [k, le] = edge_owner[e];
    const int v0 = mesh.triangles[k][le], v1 = mesh.triangles[k][(le + 1) % 3];
    const int c0 = vertex_component[v0], c1 = vertex_component[v1];
    if (c0 < 0 || c1 < 0 || c0 != c1)
      throw Error(kind, "boundary edge (" + std::to_string(v0) + "," + std::to_string(v1) +
                            ") is not matched to a domain curve");
    BoundaryEdge be;
    be.tri = k;
    be.local_edge = le;
    be.edge = e;
    be.v0 = v0;
    be.v1 = v1;
    be.component = c0;
    be.t0 = vertex_param[v0];
    be.t1 = vertex_param[v1];
    if (be.t1 - be.t0 > 0.5) be.t1 -= 1.0;
    if (be.t1 - be.t0 < -0.5) be.t1 += 1.0;
    double tm = 0.5 * (be.t0 + be.t1);
    tm -= std::floor(tm);
    if (tm >= 1.0) tm = 0.0;
    const int node = nv + e;
    mesh.nodes[node] = dom.curve(c0).point(tm);
    mesh.node_component[node] = c0;
    mesh.node_param[node] = tm;
    mesh.boundary_edges.push_back(be);
    ++boundary_degree[v0];
    ++boundary_degree[v1];
  }

  for (int i = 0; i < nv; ++i) {
    if (boundary_degree[i] == 0) continue;
    if (boundary_degree[i] != 2)
      throw Error(kind, "boundary vertex " + std::to_string(i) + " does not lie on a simple boundary loop");
    mesh.node_component[i] = vertex_component[i];
    double t = vertex_param[i];
    t -= std::floor(t);
    mesh.node_param[i] = t >= 1.0 ? 0.0 : t;
  }

  // One closed loop per component.
  std::vector<std::vector<int>> adj(nv);
  for (const auto& be : mesh.boundary_edges) {
    adj[be.v0].push_back(be.v1);
    adj[be.v1].push_back(be.v0);
  }
  std::vector<int> loops(dom.num_components(), 0);
  std::vector<char> seen(nv, 0);
  for (const auto& be : mesh.boundary_edges) {
    if (seen[be.v0]) continue;
    ++loops[be.component];
    int prev = -1, cur = be.v0;
    while (!seen[cur]) {
      seen[cur] = 1;
      const int next = adj[cur][0] != prev ? adj[cur][0] : adj[cur][1];
      prev = cur;
      cur = next;
    }
  }
  for (int c = 0; c < dom.num_components(); ++c) {
    if (loops[c] != 1)
      throw Error(kind, "component " + dom.label(c) + " has " + std::to_string(loops[c]) +
                            " boundary loops, expected 1");
  }

  mesh.tri_nodes.resize(nt);
  for (int k = 0; k < nt; ++k) {
    const auto& t = mesh.triangles[k];
    mesh.tri_nodes[k] = {t[0], t[1], t[2], nv + mesh.tri_edges[k][0], nv + mesh.tri_edges[k][1],
                         nv + mesh.tri_edges[k][2]};
  }

  for (int i = 0; i < nv + ne; ++i) {
    if (mesh.node_component[i] < 0) continue;
    mesh.boundary_nodes.push_back(i);
    mesh.node_frame[i] = frame_at(dom, mesh.node_component[i], mesh.node_param[i]);
  }

  // Curved triangles must keep a positive Jacobian at the quadrature points.
  for (const auto& be : mesh.boundary_edges) {
    std::array<Vec2, 6> X;
    for (int a = 0; a < 6; ++a) X[a] = mesh.nodes[mesh.tri_nodes[be.tri][a]];
    for (const Vec2& q : triangle_rule_collapsed(4).x) {
      if (iso_det(X, q.x(), q.y()) <= 0.0)
        throw Error(kind, "curved triangle " + std::to_string(be.tri) + " is inverted; refine the mesh");
    }
  }
  return mesh;
}

Mesh mesh_annulus(double r_in, double r_out, int n_radial, int n_angular, const Vec2& center) {
  if (!(r_in > 0.0) || !(r_out > r_in))
    throw Error(ErrorKind::configuration, "annulus needs 0 < r_in < r_out");
  if (n_radial < 2 || n_angular < 8)
    throw Error(ErrorKind::configuration, "annulus needs n_radial >= 2 and n_angular >= 8");
  DomainSpec domain({Curve::circle(center, r_out), Curve::circle(center, r_in)}, {"outer", "inner"});
  const int nr = n_radial, na = n_angular;
  std::vector<Vec2> v;
  std::vector<int> comp;
  std::vector<double> param;
  for (int i = 0; i <= nr; ++i) {
    const double r = r_in + (r_out - r_in) * i / nr;
    for (int j = 0; j < na; ++j) {
      const double th = 2.0 * std::numbers::pi * j / na;
      v.push_back(center + r * Vec2(std::cos(th), std::sin(th)));
      comp.push_back(i == nr ? 0 : (i == 0 ? 1 : -1));
      param.push_back(double(j) / na);
    }
  }
  auto id = [&](int i, int j) { return i * na + (j % na); };
  std::vector<std::array<int, 3>> tris;
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < na; ++j) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      // Diagonal direction flips at theta = pi so the grid is mirror-symmetric about x1.
      if (2 * j < na) {
        tris.push_back({a, b, c});
        tris.push_back({a, c, d});
      } else {
        tris.push_back({a, b, d});
        tris.push_back({b, c, d});
      }
    }
  }
  return build_mesh(std::move(domain), std::move(v), std::move(tris), comp, param);
}

namespace {

std::vector<int> mirror_map(const std::vector<Vec2>& pts, double scale) {
  const double tol = 1e-9 * scale;
  std::vector<int> order(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return pts[a].x() < pts[b].x(); });
  std::vector<int> map(pts.size(), -1);
  for (size_t i = 0; i < pts.size(); ++i) {
    const Vec2 target(pts[i].x(), -pts[i].y());
    auto lo = std::lower_bound(order.begin(), order.end(), target.x() - tol,
                               [&](int a, double x) { return pts[a].x() < x; });
    for (auto it = lo; it != order.end() && pts[*it].x() <= target.x() + tol; ++it) {
      if ((pts[*it] - target).norm() <= tol) {
        map[i] = *it;
        break;
      }
    }
    if (map[i] < 0) throw Error(ErrorKind::meshing, "mesh is not mirror-symmetric about the x1-axis");
  }
  return map;
}

}  // namespace

std::vector<int> mirror_node_map(const Mesh& mesh) { return mirror_map(mesh.nodes, mesh.domain().diameter()); }
std::vector<int> mirror_vertex_map(const Mesh& mesh) { return mirror_map(mesh.vertices, mesh.domain().diameter()); }

}  // namespace slipflow
