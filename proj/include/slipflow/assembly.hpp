#pragma once

#include <Eigen/Sparse>
#include <vector>

#include "slipflow/fe.hpp"
#include "slipflow/mesh.hpp"
#include "slipflow/problem.hpp"

namespace slipflow {

using SpMat = Eigen::SparseMatrix<double>;
using Eigen::VectorXd;

// Velocity dofs are interleaved Cartesian components, 2 * node + c; pressure dofs are vertices.
class DofMap {
 public:
  explicit DofMap(const Mesh& mesh) : mesh_(&mesh) {}

  const Mesh& mesh() const { return *mesh_; }
  int num_nodes() const { return mesh_->num_nodes(); }
  int num_velocity() const { return 2 * mesh_->num_nodes(); }
  int num_pressure() const { return mesh_->num_vertices(); }
  static int vdof(int node, int c) { return 2 * node + c; }

  // (u1, u2) -> (u.n, u.tau) at boundary nodes; interior nodes untouched.
  VectorXd to_frame(const VectorXd& u) const;
  VectorXd from_frame(const VectorXd& v) const;

 private:
  const Mesh* mesh_;
};

// Affine parametrisation u = P z + g of the velocities whose normal trace is fixed at the
// boundary nodes; z holds interior components and boundary tangential components.
struct ConstrainedSpace {
  SpMat P;
  VectorXd g;
  VectorXd column_norm2;  // diagonal of P^T P (columns have disjoint supports)

  int num_free() const { return static_cast<int>(P.cols()); }
  VectorXd expand(const VectorXd& z) const { return P * z + g; }
  // Coordinates of the closest member (exact for members of the space).
  VectorXd coordinates(const VectorXd& u) const;
};

// Normal-trace values a_*(x_i) at boundary nodes (zero elsewhere).
std::vector<double> interpolate_normal_data(const Mesh& mesh, const std::vector<BoundaryScalar>& a_star);

// With a mirror map the space is restricted to fields with u(Rx) = R u(x), R = diag(1, -1).
ConstrainedSpace normal_trace_space(const Mesh& mesh, const std::vector<double>& normal_values,
                                    const std::vector<int>* mirror = nullptr);

// Checks the total flux, then fixes the normal trace to a_*.
ConstrainedSpace apply_normal_trace(const Mesh& mesh, const DofMap& dofs, const ProblemData& data,
                                    const std::vector<int>* mirror = nullptr);

// Pressure coordinates; with a vertex mirror map, restricted to even fields.
SpMat pressure_space(const Mesh& mesh, const std::vector<int>* vertex_mirror = nullptr);

SpMat assemble_viscous(const Mesh& mesh, const DofMap& dofs, double nu);
SpMat assemble_friction(const Mesh& mesh, const DofMap& dofs, const std::vector<BoundaryScalar>& beta);
SpMat assemble_divergence(const Mesh& mesh, const DofMap& dofs);
SpMat assemble_convection(const Mesh& mesh, const DofMap& dofs, const VectorXd& w);
VectorXd convection_vector(const Mesh& mesh, const DofMap& dofs, const VectorXd& w);
// Newton part: D(w)[u, phi] = int (u . grad) w . phi.
SpMat assemble_convection_jacobian(const Mesh& mesh, const DofMap& dofs, const VectorXd& w);

// int f . phi + int b_tau (tau . phi) ds
VectorXd assemble_load(const Mesh& mesh, const DofMap& dofs, const ProblemData& data);

SpMat assemble_vector_mass(const Mesh& mesh, const DofMap& dofs);
// L2 mass plus gradient stiffness: the W^{1,2} Gram matrix.
SpMat assemble_vector_h1(const Mesh& mesh, const DofMap& dofs);

VectorXd pressure_mean_vector(const Mesh& mesh);
// Row c with c . u = circulation of u along component j (tau orientation).
VectorXd circulation_functional(const Mesh& mesh, int component);
VectorXd rigid_rotation(const Mesh& mesh, const Vec2& center, double b = 1.0);

SpMat assemble_scalar_stiffness(const Mesh& mesh);
SpMat assemble_scalar_mass(const Mesh& mesh);
VectorXd assemble_scalar_boundary_load(const Mesh& mesh, const std::vector<BoundaryScalar>& g);

}  // namespace slipflow
