#pragma once

#include <array>
#include <string>
#include <vector>

#include "slipflow/error.hpp"
#include "slipflow/geometry.hpp"

namespace slipflow {

// Local P2 node order: vertices 0,1,2, then midpoints of edges (0,1), (1,2), (2,0).
struct BoundaryEdge {
  int tri = -1;
  int local_edge = -1;  // 0: (0,1), 1: (1,2), 2: (2,0)
  int edge = -1;
  int v0 = -1, v1 = -1;  // in the triangle's local order
  int component = -1;
  double t0 = 0.0, t1 = 0.0;  // curve parameters at v0, v1; t1 unwrapped so |t1 - t0| < 1/2
};

class Mesh {
 public:
  Mesh(DomainSpec domain) : domain_(std::move(domain)) {}

  const DomainSpec& domain() const { return domain_; }

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }
  int num_nodes() const { return static_cast<int>(nodes.size()); }
  bool is_boundary_node(int i) const { return node_component[i] >= 0; }

  double h_max() const;
  double polygonal_area() const;
  double min_angle_degrees() const;

  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::array<int, 2>> edges;
  std::vector<std::array<int, 3>> tri_edges;
  std::vector<std::array<int, 6>> tri_nodes;
  std::vector<Vec2> nodes;  // vertices followed by edge midpoints (boundary ones on the curve)
  std::vector<BoundaryEdge> boundary_edges;
  std::vector<int> node_component;  // -1 for interior nodes
  std::vector<double> node_param;
  std::vector<BoundaryFrame> node_frame;  // meaningful on boundary nodes only
  std::vector<int> boundary_nodes;

 private:
  DomainSpec domain_;
};

// Completes connectivity, snaps boundary vertices (component >= 0) to the curve at the
// given parameter, places P2 nodes and checks the mesh invariants.
Mesh build_mesh(DomainSpec domain, std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
                const std::vector<int>& vertex_component, const std::vector<double>& vertex_param,
                ErrorKind kind = ErrorKind::meshing);

// Structured polar grid; component 0 is the outer circle, 1 the inner one.
Mesh mesh_annulus(double r_in, double r_out, int n_radial, int n_angular, const Vec2& center = Vec2::Zero());

struct DelaunayOptions {
  double min_angle_degrees = 20.0;
  int max_points = 2000000;
};

// Delaunay refinement of a circle configuration. Domains that are admissible for the
// x1-mirror are meshed on the upper half and reflected, giving a mirror-symmetric mesh.
Mesh mesh_disk_with_holes(const DomainSpec& domain, double target_h, const DelaunayOptions& options = {});

// Triangle-compatible .node/.ele plus .bnd; base path without extension.
void export_mesh(const Mesh& mesh, const std::string& base);
Mesh import_mesh(const std::string& node_file, const std::string& ele_file, const DomainSpec& domain,
                 const std::string& bnd_file = "");

// Index of the node at the mirror image (x1, -x2) of every node; throws if absent.
std::vector<int> mirror_node_map(const Mesh& mesh);
std::vector<int> mirror_vertex_map(const Mesh& mesh);

}  // namespace slipflow
