#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "slipflow/linear_solvers.hpp"
#include "slipflow/validation.hpp"

namespace slipflow {

struct AuditOptions {
  double q = 4.0;
  bool constants = true;  // theorem-4 branch (Korn, Sobolev, harmonic part)
  double margin_tolerance = 1e-12;
  double convexity_tolerance = 1e-10;
  double flux_tolerance = 1e-10;
  double symmetry_tolerance = 1e-10;
};

struct Theorem1Audit {
  double margin = 0.0;                  // min over the boundary of beta/nu + 2 kappa
  std::vector<double> component_margin;
  bool beta_nonzero = false;
  bool verdict = false;
};

struct Theorem2Audit {
  bool single_hole = false;
  double hole_min_curvature = 0.0;  // NaN when there is no hole
  bool hole_convex = false;
  double outflow = 0.0;             // int_{Gamma_0} a_*
  bool circular = false;
  bool beta_nonzero = false;
  bool friction_ok = false;         // beta not identically 0 if circularly symmetric
  bool verdict = false;
};

struct Theorem3Audit {
  bool admissible = false;
  std::optional<double> data_asymmetry;  // empty when not evaluable
  bool data_symmetric = false;
  bool verdict = false;
};

struct Theorem4Audit {
  bool evaluable = false;
  std::string status;  // reason when not evaluable
  double q = 4.0, r = 4.0;
  double K = 0.0, C_r = 0.0, h_norm = 0.0;
  double lhs = 0.0, rhs = 0.0;
  bool verdict = false;
  bool rigorous = false;
  std::string rigor;
  std::string supremum = "not evaluable";
};

struct AuditReport {
  std::vector<double> fluxes;  // per component
  double total_flux = 0.0;
  bool compatible = false;
  double nu = 1.0;
  double margin_tolerance = 1e-12;
  double convexity_tolerance = 1e-10;
  double flux_tolerance = 1e-10;
  double symmetry_tolerance = 1e-10;
  Theorem1Audit theorem1;
  Theorem2Audit theorem2;
  Theorem3Audit theorem3;
  Theorem4Audit theorem4;
  std::vector<std::string> notes;
};

// The mesh is used for the theorem-4 constants and the volume-force symmetry check only.
AuditReport audit(const DomainSpec& domain, const ProblemData& data, std::shared_ptr<const Mesh> mesh,
                  const AuditOptions& options = {});

// Re-evaluates every verdict from the stored numbers.
void recompute_verdicts(AuditReport& report);

struct BernoulliComponent {
  int component = 0;
  double mean = 0.0;       // arclength mean of Phi = p + |u|^2 / 2
  double deviation = 0.0;  // max |Phi - mean|
  double flux = 0.0;
};

struct BernoulliReport {
  std::vector<BernoulliComponent> components;
  double consistency = 0.0;  // sum_j mean_j flux_j
  double max_deviation() const;
};

// Fluxes from the data when given, from u.n otherwise.
BernoulliReport bernoulli_audit(const FlowState& flow, const ProblemData* data = nullptr);
BernoulliReport bernoulli_audit(const ExactFields& fields, const DomainSpec& domain);

struct HeadPressureResidual {
  double norm = 0.0;  // H^{-1} norm over interior P2 test functions
  int test_functions = 0;
};

HeadPressureResidual head_pressure_residual(const FlowState& flow, const ProblemData& data);

struct WeingartenResidual {
  double l2 = 0.0;
  double max = 0.0;
};

// The tangential derivative of u.n is taken from the boundary trace.
WeingartenResidual weingarten_identity_check(const Mesh& mesh, const VectorXd& velocity);

ScalarField stream_function(const FlowState& flow, double flux_tolerance = 1e-8);

// Nodal fields averaged over the elements sharing each node.
struct DiagnosticsFields {
  ScalarField omega;  // d2 u1 - d1 u2
  ScalarField phi;    // p + |u|^2 / 2
  std::optional<ScalarField> psi;
  BernoulliReport bernoulli;
};

DiagnosticsFields diagnostics_fields(const FlowState& flow, const ProblemData* data = nullptr);

}  // namespace slipflow
