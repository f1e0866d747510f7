#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "slipflow/analysis.hpp"
#include "slipflow/config.hpp"
#include "slipflow/extensions.hpp"
#include "slipflow/io.hpp"
#include "slipflow/navier_stokes.hpp"
#include "slipflow/validation.hpp"

using namespace slipflow;
using nlohmann::json;

namespace {

struct Options {
  std::string config;
  std::string out;
  bool deterministic = false;
  std::string levels;
  std::vector<std::string> pins;
  std::string solve_kind;
  std::string family;
};

struct Run {
  RunConfig cfg;
  Options opt;
  Provenance prov;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  std::string path(const std::string& name) const { return (std::filesystem::path(opt.out) / name).string(); }

  json header() const {
    json j;
    j["provenance"] = prov.to_json();
    if (!opt.deterministic)
      j["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return j;
  }

  void write_json(const std::string& name, json body) const {
    json j = header();
    for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
    write_text(path(name), j.dump(2) + "\n");
  }

  void write_csv(const std::string& name, const std::string& body) const {
    write_text(path(name), prov.comment_line() + "\n" + body);
  }
};

std::vector<int> parse_levels(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw Error(ErrorKind::configuration, "--levels expects positive integers separated by commas, got '" + s + "'");
    }
  }
  if (out.empty()) throw Error(ErrorKind::configuration, "--levels is empty");
  return out;
}

void apply_overrides(Run& run) {
  RunConfig& c = run.cfg;
  for (const std::string& p : run.opt.pins) {
    const auto eq = p.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::configuration, "--pin expects component=value, got '" + p + "'");
    int comp = -1;
    try {
      size_t used = 0;
      comp = std::stoi(p.substr(0, eq), &used);
      if (used != eq) comp = -1;
    } catch (const std::exception&) {
    }
    if (comp < 0 || comp >= c.domain.num_components())
      throw Error(ErrorKind::configuration, "--pin names no boundary component: '" + p + "'");
    c.solver.pins[comp] = Expression::parse(p.substr(eq + 1)).eval({});
  }
  if (!run.opt.levels.empty()) c.validation.levels = parse_levels(run.opt.levels);
  if (!run.opt.out.empty()) c.output.directory = run.opt.out;
  run.opt.out = c.output.directory;
  c.solver.validate();
}

Run make_run(const Options& opt, const std::string& command) {
  Run run{load_config(opt.config), opt, {}};
  apply_overrides(run);
  std::ostringstream key;
  key << run.cfg.text << "\ncommand=" << command;
  for (const auto& [c, v] : run.cfg.solver.pins) key << "\npin " << c << '=' << std::hexfloat << v;
  key << "\nlevels";
  for (int l : run.cfg.validation.levels) key << ' ' << l;
  run.prov.config_hash = "fnv1a64:" + hex64(fnv1a64(key.str()));
  run.prov.command = command;
  run.prov.deterministic = opt.deterministic;
  return run;
}

void log(const std::string& s) { std::cerr << "slipflow: " << s << '\n'; }

void write_flow(const Run& run, const FlowState& flow, const ProblemData& data, const std::string& stem) {
  const DiagnosticsFields diag = diagnostics_fields(flow, &data);
  json body;
  body["solution"] = flow_summary_json(flow);
  body["bernoulli"] = bernoulli_json(diag.bernoulli);
  run.write_json(stem + ".json", body);
  run.write_csv("trace.csv", trace_csv(flow.trace));
  if (run.cfg.output.boundary_csv) run.write_csv("boundary.csv", boundary_csv(flow, diag, data));
  if (run.cfg.output.vtk)
    write_text(run.path(stem + ".vtk"), vtk_legacy(flow, diag, "slipflow " + std::string(kVersion) + " " + run.prov.config_hash));
}

FlowState solve(const Run& run, std::shared_ptr<const Mesh> mesh, const ProblemData& data, const std::string& kind) {
  if (kind == "stokes") {
    FlowOptions fo;
    fo.pins = run.cfg.solver.pins;
    fo.symmetric = run.cfg.solver.symmetric;
    if (fo.symmetric) {
      SolverConfig sc = run.cfg.solver;
      sc.lambda_schedule = {0.0};
      return solve_symmetric(mesh, data, sc);
    }
    return solve_stokes(mesh, data, fo);
  }
  if (run.cfg.solver.symmetric) return solve_symmetric(mesh, data, run.cfg.solver);
  return solve_navier_stokes(mesh, data, run.cfg.solver);
}

int cmd_mesh(const Run& run) {
  const auto mesh = run.cfg.build_mesh();
  std::filesystem::create_directories(run.opt.out);
  export_mesh(*mesh, run.path("mesh"));
  run.write_json("mesh.json", {{"mesh",
                                {{"vertices", mesh->num_vertices()},
                                 {"triangles", mesh->num_triangles()},
                                 {"nodes", mesh->num_nodes()},
                                 {"h_max", mesh->h_max()},
                                 {"min_angle_degrees", mesh->min_angle_degrees()}}}});
  return 0;
}

int cmd_audit(const Run& run) {
  const ProblemData data = run.cfg.problem_data();
  std::shared_ptr<const Mesh> mesh;
  if (run.cfg.audit.constants || !run.cfg.problem_data().force.is_zero()) mesh = run.cfg.build_mesh();
  const AuditReport rep = audit(run.cfg.domain, data, mesh, run.cfg.audit);
  run.write_json("audit.json", {{"audit", audit_json(rep)}});
  log(std::string("theorem1 ") + (rep.theorem1.verdict ? "holds" : "fails") + ", theorem2 " +
      (rep.theorem2.verdict ? "holds" : "fails") + ", theorem3 " + (rep.theorem3.verdict ? "holds" : "fails") +
      ", theorem4 corollary " + (rep.theorem4.verdict ? "holds" : "fails"));
  return 0;
}

int cmd_solve(const Run& run) {
  const std::string kind = run.opt.solve_kind;
  const ProblemData data = run.cfg.problem_data();
  data.validate(run.cfg.domain);
  const auto mesh = run.cfg.build_mesh();
  try {
    const FlowState flow = solve(run, mesh, data, kind);
    write_flow(run, flow, data, "solution");
    std::ostringstream msg;
    msg << "converged, relative residual " << flow.relative_residual;
    log(msg.str());
    return 0;
  } catch (const NonConvergence& e) {
    write_flow(run, e.partial(), data, "solution");
    throw;
  }
}

int cmd_diagnose(const Run& run) {
  const ProblemData data = run.cfg.problem_data();
  const auto mesh = run.cfg.build_mesh();
  FlowState flow;
  try {
    flow = solve(run, mesh, data, "ns");
  } catch (const NonConvergence& e) {
    write_flow(run, e.partial(), data, "diagnostics");
    throw;
  }
  const DiagnosticsFields diag = diagnostics_fields(flow, &data);
  json body;
  body["bernoulli"] = bernoulli_json(diag.bernoulli);
  body["head_pressure_residual"] = head_pressure_residual(flow, data).norm;
  const WeingartenResidual w = weingarten_identity_check(*mesh, flow.velocity);
  body["weingarten_residual"] = {{"l2", w.l2}, {"max", w.max}};
  body["stream_function"] = diag.psi ? "single-valued" : "multivalued (nonzero component flux)";
  body["solution"] = flow_summary_json(flow);
  run.write_json("bernoulli.json", body);
  if (run.cfg.output.boundary_csv) run.write_csv("boundary.csv", boundary_csv(flow, diag, data));
  if (run.cfg.output.vtk) write_text(run.path("diagnostics.vtk"), vtk_legacy(flow, diag, "slipflow diagnostics"));
  return 0;
}

int cmd_korn(const Run& run) {
  const ProblemData data = run.cfg.problem_data();
  data.validate(run.cfg.domain);
  std::vector<BoundaryScalar> weight;
  for (const auto& b : data.beta) {
    const double nu = data.nu;
    weight.push_back([b, nu](const BoundaryFrame& f) { return 2.0 * b(f) / nu; });
  }
  KornOptions ko;
  ko.project_rotation = run.cfg.korn.project_rotation;
  json levels = json::array();
  std::vector<std::shared_ptr<const Mesh>> meshes;
  if (run.opt.levels.empty())
    meshes.push_back(run.cfg.build_mesh());
  else
    for (int l : run.cfg.validation.levels) meshes.push_back(run.cfg.build_mesh_level(l));
  for (const auto& m : meshes) {
    const KornResult k = korn_constant(*m, weight, ko);
    const SobolevResult s = sobolev_constant(*m, run.cfg.korn.sobolev_r);
    levels.push_back({{"h", m->h_max()}, {"korn", korn_json(k)}, {"sobolev", sobolev_json(s)}});
  }
  run.write_json("constants.json", {{"weight", "2 beta / nu"}, {"levels", levels}});
  return 0;
}

ExactFields trig_field() {
  ExactFields f;
  f.velocity = [](const Vec2& x) {
    return Vec2(std::sin(x.x()) * std::cos(x.y()), -std::cos(x.x()) * std::sin(x.y()));
  };
  f.gradient = [](const Vec2& x) {
    const double s1 = std::sin(x.x()), c1 = std::cos(x.x()), s2 = std::sin(x.y()), c2 = std::cos(x.y());
    Mat2 G;
    G << c1 * c2, -s1 * s2, s1 * s2, -c1 * c2;
    return G;
  };
  f.pressure = [](const Vec2& x) { return x.x() * x.y(); };
  return f;
}

void check_annulus(const DomainSpec& dom, const ExactSolution& ex) {
  const bool ok = dom.num_components() == 2 && dom.curve(0).kind() == Curve::Kind::circle &&
                  dom.curve(1).kind() == Curve::Kind::circle && std::abs(dom.curve(0).radius() - ex.r_out) < 1e-12 &&
                  std::abs(dom.curve(1).radius() - ex.r_in) < 1e-12 && (dom.curve(0).center() - ex.center).norm() < 1e-12;
  if (!ok) throw Error(ErrorKind::configuration, ex.name + " validation needs the annulus " + std::to_string(ex.r_in) +
                                                     " < r < " + std::to_string(ex.r_out) + " as the config domain");
}

int cmd_validate(const Run& run) {
  const std::string family = run.opt.family;
  const RunConfig& c = run.cfg;
  ExactFields fields;
  ProblemData data;
  SolverConfig sc = c.solver;
  bool navier_stokes = true;
  json oracle = json::object();
  if (family == "hamel") {
    // A command-line pin on the hole selects the branch; otherwise validation.k does.
    double k = c.validation.k;
    bool pinned = false;
    for (const std::string& p : run.opt.pins)
      if (p.rfind("1=", 0) == 0) pinned = true;
    if (pinned) k = c.solver.pins.at(1) / (2.0 * std::numbers::pi);
    const ExactSolution ex = hamel(k);
    check_annulus(c.domain, ex);
    fields = ex.fields;
    data = ex.data;
    sc.pins[1] = 2.0 * std::numbers::pi * k;
    const ExactResiduals r = exact_residuals(ex, 100, 64, c.seed);
    oracle = {{"momentum", r.momentum}, {"continuity", r.continuity}, {"slip", r.slip}, {"normal", r.normal}};
  } else if (family == "couette") {
    const CouetteConfig& q = c.validation.couette;
    double r_in = 1.0, r_out = 2.0;
    if (c.domain.num_components() == 2 && c.domain.curve(1).kind() == Curve::Kind::circle &&
        c.domain.curve(0).kind() == Curve::Kind::circle) {
      r_in = c.domain.curve(1).radius();
      r_out = c.domain.curve(0).radius();
    }
    const ExactSolution ex = couette(q.nu, q.beta0, q.beta1, q.g0, q.g1, r_in, r_out, q.pressure_amplitude);
    check_annulus(c.domain, ex);
    fields = ex.fields;
    data = ex.data;
    navier_stokes = false;
    const ExactResiduals r = exact_residuals(ex, 100, 64, c.seed);
    oracle = {{"momentum", r.momentum}, {"continuity", r.continuity}, {"slip", r.slip}, {"normal", r.normal}};
  } else if (family == "mms") {
    if (c.validation.mms_field == "trig")
      fields = trig_field();
    else if (c.validation.mms_field == "hamel")
      fields = hamel(c.validation.k).fields;
    else
      throw Error(ErrorKind::configuration, "validation.mms_field must be 'trig' or 'hamel'");
    std::vector<BoundaryScalar> beta;
    for (const auto& e : c.beta) beta.push_back(boundary_expression(e));
    data = mms_generate(fields, c.domain, c.nu, beta, true);
  } else {
    throw Error(ErrorKind::configuration, "validate expects hamel, couette or mms");
  }

  std::vector<double> hs;
  std::vector<ErrorNorms> errs;
  json levels = json::array();
  for (int level : c.validation.levels) {
    const auto mesh = c.build_mesh_level(level);
    FlowState flow;
    try {
      if (navier_stokes) {
        flow = solve_navier_stokes(mesh, data, sc);
      } else {
        FlowOptions fo;
        fo.pins = sc.pins;
        flow = solve_stokes(mesh, data, fo);
      }
    } catch (const NonConvergence& e) {
      throw NonConvergence("level " + std::to_string(level) + ": " + e.message(), e.partial());
    } catch (const Error& e) {
      throw Error(e.kind(), "level " + std::to_string(level) + ": " + e.message());
    }
    const ErrorNorms en = compute_errors(flow, fields);
    hs.push_back(mesh->h_max());
    errs.push_back(en);
    levels.push_back({{"level", level},
                      {"h", mesh->h_max()},
                      {"relative_residual", flow.relative_residual},
                      {"iterations", flow.trace.records.size()},
                      {"rel_l2_u", en.l2_u / en.norm_u},
                      {"rel_l2_p", en.norm_p > 0 ? json(en.l2_p / en.norm_p) : json(nullptr)}});
    log(family + " level " + std::to_string(level) + " done");
  }
  const auto rows = convergence_table(hs, errs);
  write_text(run.path("convergence.csv"), convergence_csv(rows, run.prov.comment_line() + "\n"));
  json params = json::object();
  if (family == "hamel") params["k"] = sc.pins.at(1) / (2.0 * std::numbers::pi);
  run.write_json("validation.json",
                 {{"family", family}, {"parameters", params}, {"oracle_residuals", oracle}, {"levels", levels}});
  return 0;
}

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::data:
    case ErrorKind::compatibility: return 2;
    case ErrorKind::non_convergence: return 3;
    default: return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady Stokes/Navier-Stokes with Navier slip conditions on multiply-connected domains"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Options opt;
  auto common = [&](CLI::App* s) {
    s->add_option("--config", opt.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    s->add_option("--out", opt.out, "output directory (overrides output.directory)");
    s->add_flag("--deterministic", opt.deterministic, "omit wall-clock data from artifacts");
    s->add_option("--levels", opt.levels, "refinement levels, e.g. 8,16,32");
    s->add_option("--pin", opt.pins, "circulation pin component=value (value may be an expression)");
  };
  auto* mesh = app.add_subcommand("mesh", "generate and export the mesh");
  auto* aud = app.add_subcommand("audit", "evaluate the existence conditions");
  auto* sol = app.add_subcommand("solve", "solve the flow problem");
  sol->add_option("kind", opt.solve_kind, "stokes or ns")->required()->check(CLI::IsMember({"stokes", "ns"}));
  auto* dia = app.add_subcommand("diagnose", "solve and write Bernoulli and identity diagnostics");
  auto* kor = app.add_subcommand("korn", "Korn and Sobolev constant estimates");
  auto* val = app.add_subcommand("validate", "convergence study against an exact solution");
  val->add_option("family", opt.family, "hamel, couette or mms")->required()->check(CLI::IsMember({"hamel", "couette", "mms"}));
  for (auto* s : {mesh, aud, sol, dia, kor, val}) common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  try {
    std::string command = name;
    if (name == "solve") command += " " + opt.solve_kind;
    if (name == "validate") command += " " + opt.family;
    Run run = make_run(opt, command);
    if (name == "mesh") return cmd_mesh(run);
    if (name == "audit") return cmd_audit(run);
    if (name == "solve") return cmd_solve(run);
    if (name == "diagnose") return cmd_diagnose(run);
    if (name == "korn") return cmd_korn(run);
    return cmd_validate(run);
  } catch (const Error& e) {
    std::cerr << "slipflow: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "slipflow: " << e.what() << '\n';
    return 1;
  }
}
