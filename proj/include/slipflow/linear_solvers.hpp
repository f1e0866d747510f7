#pragma once

#include <memory>
#include <string>
#include <vector>

#include "slipflow/flow.hpp"

namespace slipflow {

// P2 scalar field on the mesh nodes.
struct ScalarField {
  std::shared_ptr<const Mesh> mesh;
  VectorXd values;

  double value_at(int tri, const PointValues& v) const;
  Vec2 gradient_at(int tri, const PointValues& v) const;
};

struct DirichletResult {
  ScalarField field;
  double boundary_min = 0.0;
  double boundary_max = 0.0;
  bool within_bounds = true;  // discrete maximum principle, 1e-8 slack
};

// q = values[j] on component j, -Laplace q = 0.
DirichletResult solve_laplace_dirichlet(std::shared_ptr<const Mesh> mesh, const std::vector<BoundaryScalar>& values);

// Zero-mean q with dq/dn = a_* weakly; throws on incompatible total flux.
ScalarField solve_laplace_neumann(std::shared_ptr<const Mesh> mesh, const std::vector<BoundaryScalar>& a_star);

FlowState solve_stokes(std::shared_ptr<const Mesh> mesh, const ProblemData& data, const FlowOptions& options = {});

struct KornOptions {
  bool project_rotation = false;
  int block = 4;
  int max_iterations = 400;
  double tolerance = 1e-10;
  double shift = -1e-2;
};

struct KornResult {
  double lambda_min = 0.0;
  double K = 0.0;          // 1 / lambda_min, a lower bound for the continuum constant
  VectorXd mode;           // Cartesian velocity, unit W^{1,2} norm
  double rotation_cosine = 0.0;
  bool circular = false;
  bool rotation_projected = false;
  int iterations = 0;
  double residual = 0.0;
};

// min over u.n = 0 of (int S:S + int weight |u_tau|^2) / ||u||^2_{W^{1,2}}.
KornResult korn_constant(const Mesh& mesh, const std::vector<BoundaryScalar>& weight, const KornOptions& options = {});

struct SobolevResult {
  double r = 4.0;
  double C = 0.0;  // lower bound for the best constant
  VectorXd maximizer;
  int starts = 0;
  bool stagnated = false;
};

SobolevResult sobolev_constant(const Mesh& mesh, double r, int max_iterations = 500, double tolerance = 1e-10);

}  // namespace slipflow
