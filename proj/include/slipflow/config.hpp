#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "slipflow/analysis.hpp"
#include "slipflow/expression.hpp"
#include "slipflow/navier_stokes.hpp"

namespace slipflow {

struct MeshConfig {
  enum class Kind { annulus, delaunay, file } kind = Kind::annulus;
  int n_radial = 16, n_angular = 32;
  double h = 0.1;
  double min_angle = 20.0;
  std::string node, ele, bnd;  // resolved against the config directory
};

struct CouetteConfig {
  double nu = 1.0;
  double beta0 = 1.0, beta1 = 0.5;
  double g0 = 0.3, g1 = -0.2;
  double pressure_amplitude = 1.0;
};

struct ValidationConfig {
  double k = 0.0;
  std::vector<int> levels{8, 16, 32};
  int angular_factor = 2;  // annulus meshes: n_angular = factor * level
  CouetteConfig couette;
  std::string mms_field = "trig";
};

struct KornConfig {
  bool project_rotation = false;
  double sobolev_r = 4.0;
};

struct OutputConfig {
  std::string directory = "out";
  bool vtk = true;
  bool boundary_csv = true;
};

struct RunConfig {
  std::string path;
  std::string text;  // raw file contents
  std::string description;
  DomainSpec domain{{Curve::circle(Vec2::Zero(), 1.0)}};
  MeshConfig mesh;
  double nu = 1.0;
  std::vector<Expression> beta, a_star, b_tau;
  std::optional<std::array<Expression, 2>> force;
  SolverConfig solver;
  AuditOptions audit;
  KornConfig korn;
  ValidationConfig validation;
  OutputConfig output;
  unsigned seed = 7;

  ProblemData problem_data() const;
  std::shared_ptr<const Mesh> build_mesh() const;
  // Annulus: n_radial = level, n_angular = max(factor * level, 16). Delaunay: h scaled by 8 / level.
  std::shared_ptr<const Mesh> build_mesh_level(int level) const;
};

RunConfig parse_config(const std::string& text, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

BoundaryScalar boundary_expression(const Expression& e);

}  // namespace slipflow
