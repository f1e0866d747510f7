#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "slipflow/assembly.hpp"

namespace slipflow {

// Sparse LU factorisation of a square system.
class SparseDirect {
 public:
  SparseDirect() = default;
  explicit SparseDirect(const SpMat& A) { factorize(A); }
  void factorize(const SpMat& A);
  VectorXd solve(const VectorXd& b) const;

 private:
  std::shared_ptr<void> impl_;
};

struct IterationRecord {
  int iteration = 0;
  std::string kind;  // "stokes", "picard", "newton"
  double residual = 0.0;
  double energy = 0.0;
  double damping = 1.0;
};

struct IterationTrace {
  std::vector<IterationRecord> records;
  bool converged = false;
};

struct FlowState {
  std::shared_ptr<const Mesh> mesh;
  VectorXd velocity;  // interleaved nodal components
  VectorXd pressure;  // vertex values, zero mean
  double nu = 1.0;
  std::string problem;
  bool rotation_constraint = false;
  double rotation_compatibility = 0.0;
  double divergence_multiplier = 0.0;
  std::map<int, double> pin_multipliers;
  double lambda = 1.0;
  double relative_residual = 0.0;
  IterationTrace trace;

  Vec2 velocity_at(int tri, const PointValues& v) const;
  Mat2 gradient_at(int tri, const PointValues& v) const;  // G(c, d) = d u_c / d x_d
  double pressure_at(int tri, const PointValues& v) const;
  Vec2 pressure_gradient_at(int tri, const PointValues& v) const;
  Vec2 node_velocity(int node) const { return Vec2(velocity(2 * node), velocity(2 * node + 1)); }
};

struct FlowOptions {
  std::map<int, double> pins;  // component -> circulation of u along tau
  bool symmetric = false;
  enum class Rotation { automatic, off, on } rotation = Rotation::automatic;
};

// Bordered saddle-point system on the constrained velocity space:
// unknowns (z, p, mean multiplier, extra multipliers), u = P z + g.
class FlowSystem {
 public:
  FlowSystem(std::shared_ptr<const Mesh> mesh, const ProblemData& data, const FlowOptions& options);

  int size() const { return nz_ + np_ + 1 + ne_; }
  VectorXd velocity(const VectorXd& x) const { return space_.expand(x.head(nz_)); }
  VectorXd pressure(const VectorXd& x) const { return Q_ * x.segment(nz_, np_); }
  VectorXd pack(const VectorXd& u) const;

  // Full residual with convection scaled by lambda; an optional extra load is subtracted.
  VectorXd residual(const VectorXd& x, double lambda, const VectorXd* extra_load = nullptr) const;
  // Jacobian (newton = true) or frozen-convection (Oseen) matrix at x.
  SpMat matrix(const VectorXd& x, double lambda, bool newton) const;
  SpMat bordered(const SpMat& momentum_cartesian) const;

  double residual_scale(double lambda, const VectorXd* extra_load = nullptr) const;
  // (nu/2) int S(u):S(u) + int beta |u_tau|^2
  double energy(const VectorXd& u) const { return u.dot(A_ * u); }

  FlowState make_state(const VectorXd& x, const std::string& problem) const;

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  const DofMap& dofs() const { return dofs_; }
  const ProblemData& data() const { return data_; }
  const ConstrainedSpace& space() const { return space_; }
  const SpMat& viscous_friction() const { return A_; }
  const SpMat& divergence() const { return B_; }
  const VectorXd& load() const { return F_; }
  bool rotation_constraint() const { return rotation_; }
  double rotation_compatibility() const { return rotation_compat_; }

 private:
  std::shared_ptr<const Mesh> mesh_;
  DofMap dofs_;
  ProblemData data_;
  FlowOptions options_;
  ConstrainedSpace space_;
  SpMat Q_;
  SpMat A_, B_;
  SpMat PtBtQ_;  // P^T B^T Q
  VectorXd F_, mQ_;
  Eigen::MatrixXd E_;  // extra constraint rows (Cartesian)
  VectorXd e_;
  std::vector<int> pin_components_;
  bool rotation_ = false;
  double rotation_compat_ = 0.0;
  int nz_ = 0, np_ = 0, ne_ = 0;
};

}  // namespace slipflow
