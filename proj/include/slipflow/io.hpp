#pragma once

#include <string>

#include "json.hpp"
#include "slipflow/analysis.hpp"
#include "slipflow/linear_solvers.hpp"

namespace slipflow {

inline constexpr const char* kVersion = "0.1.0";

struct Provenance {
  std::string config_hash;  // fnv1a64 of the config bytes and command-line overrides
  std::string command;
  bool deterministic = true;

  nlohmann::json to_json() const;
  // "# slipflow 0.1.0 command=... config=..."
  std::string comment_line() const;
};

// Unstructured grid: P2 nodes as points, each triangle split into 4. Point data u, p, omega, Phi.
std::string vtk_legacy(const FlowState& flow, const DiagnosticsFields& diag, const std::string& title);

// component,arclength,u_n,u_tau,phi,kappa,friction_margin at boundary nodes, sorted by arclength.
std::string boundary_csv(const FlowState& flow, const DiagnosticsFields& diag, const ProblemData& data);

// Iteration trace as CSV: iteration,kind,residual,energy,damping.
std::string trace_csv(const IterationTrace& trace);

nlohmann::json audit_json(const AuditReport& r);
nlohmann::json bernoulli_json(const BernoulliReport& r);
nlohmann::json flow_summary_json(const FlowState& flow);
nlohmann::json korn_json(const KornResult& k);
nlohmann::json sobolev_json(const SobolevResult& s);

// Creates parent directories; throws an io error on failure.
void write_text(const std::string& path, const std::string& text);

}  // namespace slipflow
