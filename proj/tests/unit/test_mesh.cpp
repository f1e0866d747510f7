#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "slipflow/error.hpp"
#include "slipflow/mesh.hpp"

using namespace slipflow;
namespace fs = std::filesystem;
constexpr double pi = std::numbers::pi;

namespace {

void check_invariants(const Mesh& m) {
  const DomainSpec& d = m.domain();
  for (const auto& t : m.triangles) {
    const Vec2 a = m.vertices[t[0]], b = m.vertices[t[1]], c = m.vertices[t[2]];
    EXPECT_GT(cross(b - a, c - a), 0.0);
  }
  std::vector<int> per_component(d.num_components(), 0);
  for (const auto& be : m.boundary_edges) ++per_component[be.component];
  for (int c = 0; c < d.num_components(); ++c) EXPECT_GT(per_component[c], 2);
  for (int i : m.boundary_nodes) {
    double dist = 1.0;
    d.curve(m.node_component[i]).project(m.nodes[i], &dist);
    EXPECT_LT(dist, 1e-10 * d.diameter());
  }
  // outward normals point away from the nearest triangle centroid
  std::vector<Vec2> centroids;
  for (const auto& t : m.triangles) centroids.push_back((m.vertices[t[0]] + m.vertices[t[1]] + m.vertices[t[2]]) / 3.0);
  for (int i : m.boundary_nodes) {
    const Vec2& x = m.nodes[i];
    Vec2 g = centroids[0];
    for (const Vec2& c : centroids)
      if ((c - x).norm() < (g - x).norm()) g = c;
    EXPECT_GT(m.node_frame[i].n.dot(x - g), 0.0);
  }
}

fs::path temp_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("slipflow_" + name);
  fs::create_directories(p);
  return p;
}

DomainSpec annulus_domain() { return DomainSpec({Curve::circle(Vec2::Zero(), 2.0), Curve::circle(Vec2::Zero(), 1.0)}); }

}  // namespace

TEST(MeshAnnulus, Counts) {
  Mesh m = mesh_annulus(1.0, 2.0, 4, 16);
  EXPECT_EQ(m.num_vertices(), 80);
  EXPECT_EQ(m.num_triangles(), 128);
  int outer = 0, inner = 0;
  for (const auto& be : m.boundary_edges) (be.component == 0 ? outer : inner)++;
  EXPECT_EQ(outer, 16);
  EXPECT_EQ(inner, 16);
  EXPECT_EQ(m.num_nodes(), m.num_vertices() + m.num_edges());
  check_invariants(m);
}

TEST(MeshAnnulus, DiameterHalvesUnderRefinement) {
  double prev = 0.0;
  for (int n : {8, 16, 32, 64}) {
    Mesh m = mesh_annulus(1.0, 2.0, n, 2 * n);
    if (prev > 0.0) EXPECT_NEAR(prev / m.h_max(), 2.0, 0.1);
    prev = m.h_max();
  }
}

TEST(MeshAnnulus, InvertedCurvedTriangleRejected) {
  // 8 angular cells over 4 thin rings: the snapped inner edge folds the curved triangles.
  EXPECT_THROW(mesh_annulus(1.0, 2.0, 4, 8), Error);
}

TEST(MeshAnnulus, InvalidArgumentsRejected) {
  EXPECT_THROW(mesh_annulus(2.0, 1.0, 4, 16), Error);
  EXPECT_THROW(mesh_annulus(1.0, 2.0, 1, 16), Error);
  EXPECT_THROW(mesh_annulus(1.0, 2.0, 4, 6), Error);
}

TEST(MeshAnnulus, PolygonalAreaConvergesQuadratically) {
  const double exact = 3 * pi;
  std::vector<double> err;
  for (int n : {4, 8, 16}) err.push_back(std::abs(mesh_annulus(1.0, 2.0, n, 4 * n).polygonal_area() - exact));
  EXPECT_GT(err[0], err[1]);
  EXPECT_GT(err[1], err[2]);
  EXPECT_NEAR(std::log2(err[1] / err[2]), 2.0, 0.1);
}

TEST(MeshAnnulus, MirrorSymmetric) {
  Mesh m = mesh_annulus(1.0, 2.0, 3, 12);
  std::vector<int> mv = mirror_node_map(m);
  for (int i = 0; i < m.num_nodes(); ++i) EXPECT_EQ(mv[mv[i]], i);
}

TEST(MeshIO, RoundTrip) {
  Mesh m = mesh_annulus(1.0, 2.0, 3, 12);
  fs::path dir = temp_dir("roundtrip");
  export_mesh(m, (dir / "a").string());
  Mesh r = import_mesh((dir / "a.node").string(), (dir / "a.ele").string(), m.domain(), (dir / "a.bnd").string());
  ASSERT_EQ(r.num_vertices(), m.num_vertices());
  ASSERT_EQ(r.num_triangles(), m.num_triangles());
  for (int k = 0; k < m.num_triangles(); ++k) EXPECT_EQ(r.triangles[k], m.triangles[k]);
  for (int i = 0; i < m.num_nodes(); ++i) {
    EXPECT_EQ(r.node_component[i], m.node_component[i]);
    EXPECT_LT((r.nodes[i] - m.nodes[i]).norm(), 1e-13);
  }
  check_invariants(r);
}

TEST(MeshIO, ClockwiseTriangleReoriented) {
  fs::path dir = temp_dir("cw");
  Mesh m = mesh_annulus(1.0, 2.0, 3, 16);
  export_mesh(m, (dir / "a").string());
  // Rewrite the element file with the first triangle listed clockwise.
  std::ofstream ele(dir / "a.ele");
  ele << m.num_triangles() << " 3 0\n";
  for (int k = 0; k < m.num_triangles(); ++k) {
    auto t = m.triangles[k];
    if (k == 0) std::swap(t[1], t[2]);
    ele << k + 1 << ' ' << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
  ele.close();
  Mesh r = import_mesh((dir / "a.node").string(), (dir / "a.ele").string(), m.domain());
  check_invariants(r);
}

TEST(MeshIO, OffCurveBoundaryVertexRejected) {
  fs::path dir = temp_dir("off");
  Mesh m = mesh_annulus(1.0, 2.0, 2, 8);
  std::vector<Vec2> v = m.vertices;
  const int outer_vertex = 2 * 8;  // ring i = 2, j = 0
  const double len = (v[outer_vertex] - v[outer_vertex + 1]).norm();
  v[outer_vertex] *= 1.0 + 0.5 * len / 2.0;
  std::ofstream node(dir / "a.node");
  node.precision(17);
  node << v.size() << " 2 0 0\n";
  for (size_t i = 0; i < v.size(); ++i) node << i + 1 << ' ' << v[i].x() << ' ' << v[i].y() << '\n';
  node.close();
  export_mesh(m, (dir / "b").string());
  try {
    import_mesh((dir / "a.node").string(), (dir / "b.ele").string(), m.domain());
    FAIL() << "expected import error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::import);
  }
}

TEST(MeshIO, NonConformingRejected) {
  fs::path dir = temp_dir("nc");
  Mesh m = mesh_annulus(1.0, 2.0, 2, 8);
  export_mesh(m, (dir / "a").string());
  std::ofstream ele(dir / "a.ele");
  ele << m.num_triangles() + 1 << " 3 0\n";
  for (int k = 0; k < m.num_triangles(); ++k) {
    const auto& t = m.triangles[k];
    ele << k + 1 << ' ' << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
  const auto& t = m.triangles[0];
  ele << m.num_triangles() + 1 << ' ' << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  ele.close();
  EXPECT_THROW(import_mesh((dir / "a.node").string(), (dir / "a.ele").string(), m.domain()), Error);
}

TEST(MeshDelaunay, DiskArea) {
  DomainSpec disk({Curve::circle(Vec2::Zero(), 1.0)});
  Mesh m = mesh_disk_with_holes(disk, 0.1);
  check_invariants(m);
  EXPECT_NEAR(m.polygonal_area(), pi, 0.01 * pi);
  EXPECT_GE(m.min_angle_degrees(), 20.0);
}

TEST(MeshDelaunay, AnnulusMatchesStructured) {
  for (double h : {0.2, 0.1}) {
    Mesh m = mesh_disk_with_holes(annulus_domain(), h);
    check_invariants(m);
    EXPECT_GE(m.min_angle_degrees(), 20.0);
    EXPECT_LT(std::abs(m.polygonal_area() - 3 * pi), 0.02 * h * 3 * pi);
    std::vector<int> mv = mirror_node_map(m);
    EXPECT_EQ(static_cast<int>(mv.size()), m.num_nodes());
  }
  Mesh s = mesh_annulus(1.0, 2.0, 8, 64);
  EXPECT_LT(std::abs(s.polygonal_area() - 3 * pi), 0.02 * 0.1 * 3 * pi);
}

TEST(MeshDelaunay, AreaErrorDecreases) {
  DomainSpec d({Curve::circle(Vec2::Zero(), 3.0), Curve::circle(Vec2(1.2, 0.0), 0.6),
                Curve::circle(Vec2(-1.0, 0.0), 0.5)});
  const double exact = pi * (9.0 - 0.36 - 0.25);
  double prev = 1e300;
  for (double h : {0.3, 0.15, 0.075}) {
    Mesh m = mesh_disk_with_holes(d, h);
    check_invariants(m);
    EXPECT_GE(m.min_angle_degrees(), 20.0);
    const double e = std::abs(m.polygonal_area() - exact);
    EXPECT_LT(e, prev);
    prev = e;
  }
}

TEST(MeshDelaunay, OffAxisHoleNotMirrored) {
  DomainSpec d({Curve::circle(Vec2::Zero(), 2.0), Curve::circle(Vec2(0.3, 0.6), 0.5)});
  Mesh m = mesh_disk_with_holes(d, 0.15);
  check_invariants(m);
  EXPECT_GE(m.min_angle_degrees(), 20.0);
}

TEST(MeshDelaunay, HolesTooCloseRejected) {
  DomainSpec d({Curve::circle(Vec2::Zero(), 3.0), Curve::circle(Vec2(-0.505, 0.0), 0.5),
                Curve::circle(Vec2(0.505, 0.0), 0.5)});
  EXPECT_THROW(mesh_disk_with_holes(d, 0.1), Error);
}
