#include "slipflow/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace slipflow {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::configuration, where + ": " + what);
}

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) bad(where, "expected an object");
  std::set<std::string> ok;
  for (const char* k : allowed) ok.insert(k);
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) bad(where, "unknown key '" + it.key() + "'");
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) bad(where, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) bad(where, "expected an integer");
  return j.get<int>();
}

bool boolean(const json& j, const std::string& where) {
  if (!j.is_boolean()) bad(where, "expected true or false");
  return j.get<bool>();
}

std::string string(const json& j, const std::string& where) {
  if (!j.is_string()) bad(where, "expected a string");
  return j.get<std::string>();
}

Vec2 point(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) bad(where, "expected [x1, x2]");
  return Vec2(number(j[0], where), number(j[1], where));
}

Expression expression(const json& j, const std::string& where) {
  if (j.is_number()) return Expression::constant(j.get<double>());
  if (j.is_string()) return Expression::parse(j.get<std::string>());
  bad(where, "expected a number or an expression string");
}

std::vector<Expression> per_component(const json& j, const std::string& where, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    bad(where, "expected one entry per boundary component (" + std::to_string(n) + ")");
  std::vector<Expression> out;
  for (int i = 0; i < n; ++i) out.push_back(expression(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

Curve parse_curve(const json& j, const std::string& where) {
  check_keys(j, where, {"type", "center", "radius", "points", "reversed"});
  const std::string type = string(j.at("type"), where + ".type");
  const bool reversed = j.contains("reversed") ? boolean(j["reversed"], where + ".reversed") : false;
  if (type == "circle") {
    if (!j.contains("center") || !j.contains("radius")) bad(where, "circle needs center and radius");
    return Curve::circle(point(j["center"], where + ".center"), number(j["radius"], where + ".radius"), reversed);
  }
  if (type == "spline") {
    if (!j.contains("points") || !j["points"].is_array()) bad(where, "spline needs points");
    std::vector<Vec2> pts;
    for (const auto& p : j["points"]) pts.push_back(point(p, where + ".points"));
    return Curve::spline(std::move(pts), reversed);
  }
  bad(where + ".type", "unknown curve type '" + type + "'");
}

SolverConfig::Mode parse_mode(const std::string& s) {
  if (s == "picard") return SolverConfig::Mode::picard;
  if (s == "newton") return SolverConfig::Mode::newton;
  if (s == "picard_then_newton") return SolverConfig::Mode::picard_then_newton;
  bad("solver.mode", "unknown mode '" + s + "'");
}

std::string resolve(const std::string& base, const std::string& p) {
  if (p.empty() || std::filesystem::path(p).is_absolute()) return p;
  return (std::filesystem::path(base) / p).string();
}

}  // namespace

BoundaryScalar boundary_expression(const Expression& e) {
  if (e.is_constant()) return constant_scalar(e.eval({}));
  return [e](const BoundaryFrame& f) {
    ExpressionVars v;
    v.x1 = f.point.x();
    v.x2 = f.point.y();
    v.r = f.point.norm();
    v.theta = std::atan2(v.x2, v.x1);
    v.t = f.t;
    return e.eval(v);
  };
}

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    bad("config", std::string("invalid JSON: ") + e.what());
  }
  check_keys(j, "config",
             {"description", "domain", "mesh", "physics", "boundary", "solver", "audit", "korn", "validation", "output",
              "seed"});
  RunConfig c;
  c.text = text;
  if (j.contains("description")) c.description = string(j["description"], "description");

  if (!j.contains("domain")) bad("config", "missing 'domain'");
  {
    const json& d = j["domain"];
    check_keys(d, "domain", {"curves", "labels", "quadrature"});
    if (!d.contains("curves") || !d["curves"].is_array() || d["curves"].empty()) bad("domain", "needs a curves array");
    std::vector<Curve> curves;
    for (size_t i = 0; i < d["curves"].size(); ++i)
      curves.push_back(parse_curve(d["curves"][i], "domain.curves[" + std::to_string(i) + "]"));
    std::vector<std::string> labels;
    if (d.contains("labels")) {
      if (!d["labels"].is_array()) bad("domain.labels", "expected an array");
      for (const auto& l : d["labels"]) labels.push_back(string(l, "domain.labels"));
    }
    c.domain = DomainSpec(std::move(curves), std::move(labels));
    if (d.contains("quadrature")) {
      const json& q = d["quadrature"];
      check_keys(q, "domain.quadrature", {"panels", "nodes"});
      if (q.contains("panels")) c.domain.quadrature.panels = integer(q["panels"], "domain.quadrature.panels");
      if (q.contains("nodes")) c.domain.quadrature.nodes = integer(q["nodes"], "domain.quadrature.nodes");
      if (c.domain.quadrature.panels < 1 || c.domain.quadrature.nodes < 1) bad("domain.quadrature", "must be positive");
    }
  }
  const int nc = c.domain.num_components();

  if (j.contains("mesh")) {
    const json& m = j["mesh"];
    check_keys(m, "mesh", {"type", "n_radial", "n_angular", "h", "min_angle", "node", "ele", "bnd"});
    const std::string type = m.contains("type") ? string(m["type"], "mesh.type") : "annulus";
    if (type == "annulus")
      c.mesh.kind = MeshConfig::Kind::annulus;
    else if (type == "delaunay")
      c.mesh.kind = MeshConfig::Kind::delaunay;
    else if (type == "file")
      c.mesh.kind = MeshConfig::Kind::file;
    else
      bad("mesh.type", "unknown mesh type '" + type + "'");
    if (m.contains("n_radial")) c.mesh.n_radial = integer(m["n_radial"], "mesh.n_radial");
    if (m.contains("n_angular")) c.mesh.n_angular = integer(m["n_angular"], "mesh.n_angular");
    if (m.contains("h")) c.mesh.h = number(m["h"], "mesh.h");
    if (m.contains("min_angle")) c.mesh.min_angle = number(m["min_angle"], "mesh.min_angle");
    if (m.contains("node")) c.mesh.node = resolve(base_dir, string(m["node"], "mesh.node"));
    if (m.contains("ele")) c.mesh.ele = resolve(base_dir, string(m["ele"], "mesh.ele"));
    if (m.contains("bnd")) c.mesh.bnd = resolve(base_dir, string(m["bnd"], "mesh.bnd"));
    if (c.mesh.kind == MeshConfig::Kind::file && (c.mesh.node.empty() || c.mesh.ele.empty()))
      bad("mesh", "file meshes need node and ele paths");
    if (c.mesh.n_radial < 1 || c.mesh.n_angular < 3 || !(c.mesh.h > 0.0)) bad("mesh", "sizes must be positive");
  }

  std::vector<Expression> zeros(nc, Expression::constant(0.0));
  c.beta = zeros;
  c.a_star = zeros;
  c.b_tau = zeros;
  if (j.contains("physics")) {
    const json& p = j["physics"];
    check_keys(p, "physics", {"nu", "beta", "force"});
    if (p.contains("nu")) c.nu = number(p["nu"], "physics.nu");
    if (p.contains("beta")) c.beta = per_component(p["beta"], "physics.beta", nc);
    if (p.contains("force")) {
      if (!p["force"].is_array() || p["force"].size() != 2) bad("physics.force", "expected [f1, f2]");
      c.force = std::array<Expression, 2>{expression(p["force"][0], "physics.force[0]"),
                                          expression(p["force"][1], "physics.force[1]")};
    }
  }
  if (j.contains("boundary")) {
    const json& b = j["boundary"];
    check_keys(b, "boundary", {"a_star", "b_tau"});
    if (b.contains("a_star")) c.a_star = per_component(b["a_star"], "boundary.a_star", nc);
    if (b.contains("b_tau")) c.b_tau = per_component(b["b_tau"], "boundary.b_tau", nc);
  }

  if (j.contains("solver")) {
    const json& s = j["solver"];
    check_keys(s, "solver",
               {"mode", "lambda_schedule", "tolerance", "max_iterations", "pins", "symmetric", "damping",
                "explicit_picard", "newton_switch"});
    SolverConfig& sc = c.solver;
    if (s.contains("mode")) sc.mode = parse_mode(string(s["mode"], "solver.mode"));
    if (s.contains("lambda_schedule")) {
      if (!s["lambda_schedule"].is_array()) bad("solver.lambda_schedule", "expected an array");
      sc.lambda_schedule.clear();
      for (const auto& l : s["lambda_schedule"]) sc.lambda_schedule.push_back(number(l, "solver.lambda_schedule"));
    }
    if (s.contains("tolerance")) sc.tolerance = number(s["tolerance"], "solver.tolerance");
    if (s.contains("max_iterations")) sc.max_iterations = integer(s["max_iterations"], "solver.max_iterations");
    if (s.contains("pins")) {
      if (!s["pins"].is_object()) bad("solver.pins", "expected {\"component\": circulation}");
      for (auto it = s["pins"].begin(); it != s["pins"].end(); ++it) {
        int comp = -1;
        try {
          size_t used = 0;
          comp = std::stoi(it.key(), &used);
          if (used != it.key().size()) comp = -1;
        } catch (const std::exception&) {
        }
        if (comp < 0 || comp >= nc) bad("solver.pins", "no boundary component '" + it.key() + "'");
        sc.pins[comp] = expression(it.value(), "solver.pins").eval({});
      }
    }
    if (s.contains("symmetric")) sc.symmetric = boolean(s["symmetric"], "solver.symmetric");
    if (s.contains("damping")) sc.damping = number(s["damping"], "solver.damping");
    if (s.contains("explicit_picard")) sc.explicit_picard = boolean(s["explicit_picard"], "solver.explicit_picard");
    if (s.contains("newton_switch")) sc.newton_switch = number(s["newton_switch"], "solver.newton_switch");
    sc.validate();
  }

  if (j.contains("audit")) {
    const json& a = j["audit"];
    check_keys(a, "audit", {"q", "constants"});
    if (a.contains("q")) c.audit.q = number(a["q"], "audit.q");
    if (a.contains("constants")) c.audit.constants = boolean(a["constants"], "audit.constants");
    if (!(c.audit.q > 2.0)) bad("audit.q", "must exceed 2");
  }
  if (j.contains("korn")) {
    const json& k = j["korn"];
    check_keys(k, "korn", {"project_rotation", "sobolev_r"});
    if (k.contains("project_rotation")) c.korn.project_rotation = boolean(k["project_rotation"], "korn.project_rotation");
    if (k.contains("sobolev_r")) c.korn.sobolev_r = number(k["sobolev_r"], "korn.sobolev_r");
    if (!(c.korn.sobolev_r > 2.0)) bad("korn.sobolev_r", "must exceed 2");
  }
  if (j.contains("validation")) {
    const json& v = j["validation"];
    check_keys(v, "validation", {"k", "levels", "angular_factor", "couette", "mms_field"});
    if (v.contains("k")) c.validation.k = number(v["k"], "validation.k");
    if (v.contains("levels")) {
      if (!v["levels"].is_array()) bad("validation.levels", "expected an array");
      c.validation.levels.clear();
      for (const auto& l : v["levels"]) c.validation.levels.push_back(integer(l, "validation.levels"));
    }
    if (v.contains("angular_factor")) c.validation.angular_factor = integer(v["angular_factor"], "validation.angular_factor");
    if (v.contains("couette")) {
      const json& q = v["couette"];
      check_keys(q, "validation.couette", {"nu", "beta", "g", "pressure_amplitude"});
      CouetteConfig& cc = c.validation.couette;
      if (q.contains("nu")) cc.nu = number(q["nu"], "validation.couette.nu");
      if (q.contains("beta")) {
        const Vec2 b = point(q["beta"], "validation.couette.beta");
        cc.beta0 = b.x();
        cc.beta1 = b.y();
      }
      if (q.contains("g")) {
        const Vec2 g = point(q["g"], "validation.couette.g");
        cc.g0 = g.x();
        cc.g1 = g.y();
      }
      if (q.contains("pressure_amplitude"))
        cc.pressure_amplitude = number(q["pressure_amplitude"], "validation.couette.pressure_amplitude");
    }
    if (v.contains("mms_field")) c.validation.mms_field = string(v["mms_field"], "validation.mms_field");
    for (int l : c.validation.levels)
      if (l < 1) bad("validation.levels", "levels must be positive");
    if (c.validation.angular_factor < 1) bad("validation.angular_factor", "must be positive");
  }
  if (j.contains("output")) {
    const json& o = j["output"];
    check_keys(o, "output", {"directory", "vtk", "boundary_csv"});
    if (o.contains("directory")) c.output.directory = string(o["directory"], "output.directory");
    if (o.contains("vtk")) c.output.vtk = boolean(o["vtk"], "output.vtk");
    if (o.contains("boundary_csv")) c.output.boundary_csv = boolean(o["boundary_csv"], "output.boundary_csv");
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) bad("seed", "expected a non-negative integer");
    c.seed = j["seed"].get<unsigned>();
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot read config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  RunConfig c = parse_config(ss.str(), std::filesystem::path(path).parent_path().string());
  c.path = path;
  return c;
}

ProblemData RunConfig::problem_data() const {
  ProblemData d;
  d.nu = nu;
  for (const auto& e : beta) d.beta.push_back(boundary_expression(e));
  for (const auto& e : a_star) d.a_star.push_back(boundary_expression(e));
  for (const auto& e : b_tau) d.b_tau.push_back(boundary_expression(e));
  if (force && !(force->at(0).is_constant() && force->at(1).is_constant() && force->at(0).eval({}) == 0.0 &&
                 force->at(1).eval({}) == 0.0)) {
    const auto f = *force;
    d.force = ForceField::analytic([f](const Vec2& x) {
      ExpressionVars v;
      v.x1 = x.x();
      v.x2 = x.y();
      v.r = x.norm();
      v.theta = std::atan2(x.y(), x.x());
      return Vec2(f[0].eval(v), f[1].eval(v));
    });
  }
  return d;
}

namespace {

std::shared_ptr<const Mesh> annulus_mesh(const DomainSpec& dom, int n_radial, int n_angular) {
  if (dom.num_components() != 2 || dom.curve(0).kind() != Curve::Kind::circle ||
      dom.curve(1).kind() != Curve::Kind::circle || (dom.curve(0).center() - dom.curve(1).center()).norm() > 1e-12)
    throw Error(ErrorKind::configuration, "annulus meshes need two concentric circles");
  auto m = std::make_shared<Mesh>(mesh_annulus(dom.curve(1).radius(), dom.curve(0).radius(), n_radial, n_angular,
                                               dom.curve(0).center()));
  return m;
}

}  // namespace

std::shared_ptr<const Mesh> RunConfig::build_mesh() const {
  switch (mesh.kind) {
    case MeshConfig::Kind::annulus: return annulus_mesh(domain, mesh.n_radial, mesh.n_angular);
    case MeshConfig::Kind::delaunay: {
      DelaunayOptions o;
      o.min_angle_degrees = mesh.min_angle;
      return std::make_shared<Mesh>(mesh_disk_with_holes(domain, mesh.h, o));
    }
    case MeshConfig::Kind::file: return std::make_shared<Mesh>(import_mesh(mesh.node, mesh.ele, domain, mesh.bnd));
  }
  return nullptr;
}

std::shared_ptr<const Mesh> RunConfig::build_mesh_level(int level) const {
  switch (mesh.kind) {
    case MeshConfig::Kind::annulus: return annulus_mesh(domain, level, std::max(validation.angular_factor * level, 16));
    case MeshConfig::Kind::delaunay: {
      DelaunayOptions o;
      o.min_angle_degrees = mesh.min_angle;
      return std::make_shared<Mesh>(mesh_disk_with_holes(domain, mesh.h * 8.0 / level, o));
    }
    case MeshConfig::Kind::file: throw Error(ErrorKind::configuration, "refinement levels need a generated mesh");
  }
  return nullptr;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex;
  s.width(16);
  s.fill('0');
  s << v;
  return s.str();
}

}  // namespace slipflow
