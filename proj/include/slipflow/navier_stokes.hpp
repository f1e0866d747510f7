#pragma once

#include <map>
#include <memory>
#include <vector>

#include "slipflow/error.hpp"
#include "slipflow/flow.hpp"

namespace slipflow {

struct SolverConfig {
  enum class Mode { picard, newton, picard_then_newton };
  Mode mode = Mode::picard_then_newton;
  std::vector<double> lambda_schedule{1.0};
  double tolerance = 1e-10;
  int max_iterations = 200;
  std::map<int, double> pins;
  bool symmetric = false;
  double damping = 1.0;
  // Picard steps: frozen-convection (Oseen) solve, or the explicit map with convection as a load.
  bool explicit_picard = false;
  double newton_switch = 1e-4;  // relative residual at which picard-then-newton switches

  void validate() const;
};

// Thrown on divergence or iteration exhaustion; carries the last iterate.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& msg, FlowState partial)
      : Error(ErrorKind::non_convergence, msg), partial_(std::move(partial)) {}
  const FlowState& partial() const { return partial_; }

 private:
  FlowState partial_;
};

FlowState solve_navier_stokes(std::shared_ptr<const Mesh> mesh, const ProblemData& data, const SolverConfig& config);

// Restricted to u1 even, u2 odd in x2; needs an admissible domain, symmetric data and a mirror-symmetric mesh.
FlowState solve_symmetric(std::shared_ptr<const Mesh> mesh, const ProblemData& data, SolverConfig config);

// max |data - mirrored data| over boundary quadrature points and mesh nodes.
double data_asymmetry(const Mesh& mesh, const ProblemData& data);

struct ContinuationPoint {
  double lambda = 0.0;
  double w_norm = 0.0;  // J-norm of u - U, U the Stokes lift
  FlowState state;
};

std::vector<ContinuationPoint> continuation_sweep(std::shared_ptr<const Mesh> mesh, const ProblemData& data,
                                                  const std::vector<double>& lambdas, const SolverConfig& config);

// One application of the explicit map: Stokes solve with the extra load lambda (u.grad)u at u = velocity(x).
VectorXd fixed_point_map(const FlowSystem& system, const VectorXd& x, double lambda);

}  // namespace slipflow
