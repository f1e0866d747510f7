#include "slipflow/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace slipflow {

using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Arclength from t = 0 to t along component j.
double arclength(const DomainSpec& dom, int j, double t) {
  if (t <= 0.0) return 0.0;
  const Rule1D& g = gauss_legendre(8);
  const int panels = std::max(1, static_cast<int>(std::ceil(64 * t)));
  const double dt = t / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p)
    for (size_t q = 0; q < g.x.size(); ++q) s += g.w[q] * dt * frame_at(dom, j, (p + g.x[q]) * dt).speed;
  return s;
}

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json Provenance::to_json() const {
  json j;
  j["tool"] = "slipflow";
  j["version"] = kVersion;
  j["command"] = command;
  j["config_hash"] = config_hash;
  j["deterministic"] = deterministic;
  return j;
}

std::string Provenance::comment_line() const {
  return std::string("# slipflow ") + kVersion + " command=" + command + " config=" + config_hash;
}

std::string vtk_legacy(const FlowState& flow, const DiagnosticsFields& diag, const std::string& title) {
  const Mesh& m = *flow.mesh;
  const int nv = m.num_vertices();
  std::ostringstream o;
  o << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  o << "POINTS " << m.num_nodes() << " double\n";
  for (const Vec2& x : m.nodes) o << num(x.x()) << ' ' << num(x.y()) << " 0\n";
  const int nt = 4 * m.num_triangles();
  o << "CELLS " << nt << ' ' << 4 * nt << '\n';
  static const int sub[4][3] = {{0, 3, 5}, {3, 1, 4}, {5, 4, 2}, {3, 4, 5}};
  for (const auto& tn : m.tri_nodes)
    for (const auto& s : sub) o << "3 " << tn[s[0]] << ' ' << tn[s[1]] << ' ' << tn[s[2]] << '\n';
  o << "CELL_TYPES " << nt << '\n';
  for (int k = 0; k < nt; ++k) o << "5\n";
  o << "POINT_DATA " << m.num_nodes() << '\n';
  o << "VECTORS u double\n";
  for (int i = 0; i < m.num_nodes(); ++i) {
    const Vec2 u = flow.node_velocity(i);
    o << num(u.x()) << ' ' << num(u.y()) << " 0\n";
  }
  o << "SCALARS p double 1\nLOOKUP_TABLE default\n";
  for (int i = 0; i < m.num_nodes(); ++i) {
    double p;
    if (i < nv) {
      p = flow.pressure(i);
    } else {
      const auto& e = m.edges[i - nv];
      p = 0.5 * (flow.pressure(e[0]) + flow.pressure(e[1]));
    }
    o << num(p) << '\n';
  }
  o << "SCALARS omega double 1\nLOOKUP_TABLE default\n";
  for (int i = 0; i < m.num_nodes(); ++i) o << num(diag.omega.values(i)) << '\n';
  o << "SCALARS Phi double 1\nLOOKUP_TABLE default\n";
  for (int i = 0; i < m.num_nodes(); ++i) o << num(diag.phi.values(i)) << '\n';
  return o.str();
}

std::string boundary_csv(const FlowState& flow, const DiagnosticsFields& diag, const ProblemData& data) {
  const Mesh& m = *flow.mesh;
  const DomainSpec& dom = m.domain();
  std::ostringstream o;
  o << "component,arclength,u_n,u_tau,phi,kappa,friction_margin\n";
  for (int j = 0; j < dom.num_components(); ++j) {
    std::vector<int> nodes;
    for (int i : m.boundary_nodes)
      if (m.node_component[i] == j) nodes.push_back(i);
    std::sort(nodes.begin(), nodes.end(), [&](int a, int b) { return m.node_param[a] < m.node_param[b]; });
    for (int i : nodes) {
      const BoundaryFrame& f = m.node_frame[i];
      const Vec2 u = flow.node_velocity(i);
      o << j << ',' << num(arclength(dom, j, m.node_param[i])) << ',' << num(u.dot(f.n)) << ',' << num(u.dot(f.tau))
        << ',' << num(diag.phi.values(i)) << ',' << num(f.kappa) << ',' << num(data.beta[j](f) / data.nu + 2 * f.kappa)
        << '\n';
    }
  }
  return o.str();
}

std::string trace_csv(const IterationTrace& trace) {
  std::ostringstream o;
  o << "iteration,kind,residual,energy,damping\n";
  for (const auto& r : trace.records)
    o << r.iteration << ',' << r.kind << ',' << num(r.residual) << ',' << num(r.energy) << ',' << num(r.damping)
      << '\n';
  return o.str();
}

json audit_json(const AuditReport& r) {
  json j;
  j["fluxes"] = r.fluxes;
  j["total_flux"] = r.total_flux;
  j["compatible"] = r.compatible;
  j["nu"] = r.nu;
  j["tolerances"] = {{"margin", r.margin_tolerance},
                     {"convexity", r.convexity_tolerance},
                     {"flux", r.flux_tolerance},
                     {"symmetry", r.symmetry_tolerance}};
  j["theorem1"] = {{"margin", r.theorem1.margin},
                   {"component_margin", r.theorem1.component_margin},
                   {"beta_nonzero", r.theorem1.beta_nonzero},
                   {"verdict", r.theorem1.verdict}};
  const auto& t2 = r.theorem2;
  j["theorem2"] = {{"single_hole", t2.single_hole},       {"hole_min_curvature", nullable(t2.hole_min_curvature)},
                   {"hole_convex", t2.hole_convex},       {"outflow", t2.outflow},
                   {"circular", t2.circular},             {"beta_nonzero", t2.beta_nonzero},
                   {"friction_ok", t2.friction_ok},       {"verdict", t2.verdict}};
  const auto& t3 = r.theorem3;
  j["theorem3"] = {{"admissible", t3.admissible},
                   {"data_asymmetry", t3.data_asymmetry ? json(*t3.data_asymmetry) : json("not evaluable")},
                   {"data_symmetric", t3.data_symmetric},
                   {"verdict", t3.verdict}};
  const auto& t4 = r.theorem4;
  j["theorem4"] = {{"evaluable", t4.evaluable}, {"status", t4.status}, {"q", t4.q},       {"r", t4.r},
                   {"K", t4.K},                 {"C_r", t4.C_r},       {"h_norm", t4.h_norm}, {"lhs", t4.lhs},
                   {"rhs", t4.rhs},             {"verdict", t4.verdict}, {"rigorous", t4.rigorous},
                   {"rigor", t4.rigor},         {"supremum", t4.supremum}};
  j["notes"] = r.notes;
  return j;
}

json bernoulli_json(const BernoulliReport& r) {
  json j;
  j["components"] = json::array();
  for (const auto& c : r.components)
    j["components"].push_back({{"component", c.component}, {"mean", c.mean}, {"deviation", c.deviation}, {"flux", c.flux}});
  j["consistency"] = r.consistency;
  j["max_deviation"] = r.max_deviation();
  return j;
}

json flow_summary_json(const FlowState& flow) {
  json j;
  j["problem"] = flow.problem;
  j["nu"] = flow.nu;
  j["lambda"] = flow.lambda;
  j["relative_residual"] = flow.relative_residual;
  j["converged"] = flow.trace.converged;
  j["iterations"] = flow.trace.records.size();
  j["rotation_constraint"] = flow.rotation_constraint;
  j["divergence_multiplier"] = flow.divergence_multiplier;
  json pins = json::object();
  for (const auto& [c, v] : flow.pin_multipliers) pins[std::to_string(c)] = v;
  j["pin_multipliers"] = pins;
  j["mesh"] = {{"vertices", flow.mesh->num_vertices()},
               {"triangles", flow.mesh->num_triangles()},
               {"nodes", flow.mesh->num_nodes()},
               {"h_max", flow.mesh->h_max()}};
  json trace = json::array();
  for (const auto& r : flow.trace.records)
    trace.push_back({{"iteration", r.iteration},
                     {"kind", r.kind},
                     {"residual", r.residual},
                     {"energy", r.energy},
                     {"damping", r.damping}});
  j["trace"] = trace;
  return j;
}

json korn_json(const KornResult& k) {
  return {{"lambda_min", k.lambda_min},
          {"K", k.K},
          {"rotation_cosine", k.rotation_cosine},
          {"circular", k.circular},
          {"rotation_projected", k.rotation_projected},
          {"iterations", k.iterations},
          {"residual", k.residual},
          {"rigor", "K = 1/lambda_min over a discrete subspace: a lower bound for the continuum constant"}};
}

json sobolev_json(const SobolevResult& s) {
  return {{"r", s.r},
          {"C", s.C},
          {"starts", s.starts},
          {"stagnated", s.stagnated},
          {"rigor", "maximum over a discrete subspace: a lower bound for the continuum constant"}};
}

void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorKind::io, "write failed for " + path);
}

}  // namespace slipflow
