#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slipflow/flow.hpp"

namespace slipflow {

struct ExactFields {
  std::function<Vec2(const Vec2&)> velocity;
  std::function<Mat2(const Vec2&)> gradient;  // G(c, d) = d u_c / d x_d
  std::function<double(const Vec2&)> pressure;
};

// Analytic pair on the annulus r_in < |x - center| < r_out together with the data it solves.
struct ExactSolution {
  std::string name;
  std::map<std::string, double> parameters;
  ExactFields fields;
  double r_in = 1.0;
  double r_out = 2.0;
  Vec2 center = Vec2::Zero();
  bool navier_stokes = true;  // convection included in the momentum balance
  ProblemData data;

  DomainSpec domain() const;
  Vec2 velocity(const Vec2& x) const { return fields.velocity(x); }
  double pressure(const Vec2& x) const { return fields.pressure(x); }
};

// Annulus 1 < r < 2 family u_k = -3x/r^2 + k(3r - 2)/r^3 x_perp; pressure from the radial momentum balance.
ExactSolution hamel(double k);
// Stokes slip Couette u_theta = A r + B / r with tangential loads g0 (outer), g1 (inner).
// A nonzero amplitude adds the pressure pi = amplitude * x2 sin(x1), balanced by f = grad pi.
ExactSolution couette(double nu, double beta0, double beta1, double g0, double g1, double r_in = 1.0,
                      double r_out = 2.0, double pressure_amplitude = 0.0);
// u = b (x - c)_perp, p = |u|^2 / 2, all data zero.
ExactSolution rigid_rotation_solution(double b, const Vec2& center = Vec2::Zero(), double r_in = 1.0,
                                      double r_out = 2.0, double nu = 1.0);

// Data (f, a_*, b_tau) reproducing the given fields; convection optional.
ProblemData mms_generate(const ExactFields& fields, const DomainSpec& domain, double nu,
                         const std::vector<BoundaryScalar>& beta, bool navier_stokes = true);

struct ExactResiduals {
  double momentum = 0.0;    // max over interior samples
  double continuity = 0.0;
  double slip = 0.0;        // max over boundary samples, tangential condition
  double normal = 0.0;      // max |u.n - a_*|
};

// Finite-difference residuals from velocity and pressure only.
ExactResiduals exact_residuals(const ExactSolution& ex, int interior_points = 100, int boundary_points = 64,
                               unsigned seed = 7);

struct ErrorNorms {
  double l2_u = 0.0, h1_u = 0.0, l2_p = 0.0;
  double norm_u = 0.0, norm_p = 0.0;  // exact-field norms (pressure mean-free)
};

// Pressure means are removed from both fields on the discrete domain.
ErrorNorms compute_errors(const FlowState& flow, const ExactFields& exact);
// Same for the nodal interpolant of the exact fields (velocity P2, pressure P1).
ErrorNorms interpolation_errors(std::shared_ptr<const Mesh> mesh, const ExactFields& exact);
FlowState interpolate_exact(std::shared_ptr<const Mesh> mesh, const ExactFields& exact, double nu);

struct ConvergenceRow {
  int level = 0;
  double h = 0.0;
  double e_l2_u = 0.0, order_l2_u = 0.0;
  double e_h1_u = 0.0, order_h1_u = 0.0;
  double e_l2_p = 0.0, order_l2_p = 0.0;
};

std::vector<ConvergenceRow> convergence_table(const std::vector<double>& h, const std::vector<ErrorNorms>& errors);
std::string convergence_csv(const std::vector<ConvergenceRow>& rows, const std::string& header_comment = "");

}  // namespace slipflow
