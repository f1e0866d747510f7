#include "slipflow/navier_stokes.hpp"

#include <cmath>
#include <sstream>

namespace slipflow {

void SolverConfig::validate() const {
  if (lambda_schedule.empty()) throw Error(ErrorKind::configuration, "lambda schedule is empty");
  double prev = 0.0;
  for (double l : lambda_schedule) {
    if (!(l >= 0.0 && l <= 1.0)) throw Error(ErrorKind::configuration, "lambda values must lie in [0, 1]");
    if (l < prev) throw Error(ErrorKind::configuration, "lambda schedule must be non-decreasing");
    prev = l;
  }
  if (!(tolerance > 0.0)) throw Error(ErrorKind::configuration, "tolerance must be positive");
  if (max_iterations < 1) throw Error(ErrorKind::configuration, "max_iterations must be at least 1");
  if (!(damping > 0.0 && damping <= 1.0)) throw Error(ErrorKind::configuration, "damping must lie in (0, 1]");
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

VectorXd newton_direction(const SpMat& J, const VectorXd& r) {
  const char* hint = "Newton matrix is singular: the solution set is not isolated (pin the circulation of a hole, --pin <component>=<value>)";
  SparseDirect lu;
  try {
    lu.factorize(J);
  } catch (const Error&) {
    throw Error(ErrorKind::branch_degeneracy, hint);
  }
  VectorXd dx;
  try {
    dx = -lu.solve(r);
  } catch (const Error&) {
    throw Error(ErrorKind::branch_degeneracy, hint);
  }
  if ((J * dx + r).norm() > 1e-6 * r.norm()) throw Error(ErrorKind::branch_degeneracy, hint);
  return dx;
}

// Drives the residual at one lambda below tolerance, updating x in place.
double iterate(const FlowSystem& sys, VectorXd& x, double lambda, const SolverConfig& cfg, IterationTrace& trace) {
  using Mode = SolverConfig::Mode;
  const double scale = sys.residual_scale(lambda);
  if (scale == 0.0) {
    x.setZero();
    trace.records.push_back({static_cast<int>(trace.records.size()), "picard", 0.0, 0.0, 1.0});
    return 0.0;
  }
  VectorXd r = sys.residual(x, lambda);
  double res = r.norm() / scale;
  bool newton = cfg.mode == Mode::newton;
  double theta = cfg.damping;
  int increases = 0;
  for (int it = 1;; ++it) {
    if (res <= cfg.tolerance) return res;
    if (it > cfg.max_iterations) {
      FlowState partial = sys.make_state(x, "navier-stokes");
      partial.trace = trace;
      partial.lambda = lambda;
      partial.relative_residual = res;
      throw NonConvergence("no convergence in " + std::to_string(cfg.max_iterations) +
                               " iterations, relative residual " + fmt(res),
                           std::move(partial));
    }
    if (cfg.mode == Mode::picard_then_newton && res < cfg.newton_switch) newton = true;
    VectorXd dx;
    double step = theta;
    std::string kind = "picard";
    if (newton) {
      dx = newton_direction(sys.matrix(x, lambda, true), r);
      step = 1.0;
      kind = "newton";
    } else if (cfg.explicit_picard) {
      dx = fixed_point_map(sys, x, lambda) - x;
    } else {
      dx = -SparseDirect(sys.matrix(x, lambda, false)).solve(r);
    }
    VectorXd xn = x + step * dx;
    VectorXd rn = sys.residual(xn, lambda);
    double resn = rn.norm() / scale;
    if (!std::isfinite(resn)) resn = std::numeric_limits<double>::infinity();
    if (resn > res) {
      ++increases;
      if (!newton) theta *= 0.5;
    } else {
      increases = 0;
    }
    x = std::move(xn);
    r = std::move(rn);
    res = resn;
    trace.records.push_back({static_cast<int>(trace.records.size()), kind, res, sys.energy(sys.velocity(x)), step});
    if (increases >= 5 || !std::isfinite(res)) {
      FlowState partial = sys.make_state(x, "navier-stokes");
      partial.trace = trace;
      partial.lambda = lambda;
      partial.relative_residual = res;
      throw NonConvergence("residual increased over 5 consecutive iterations (relative residual " + fmt(res) + ")",
                           std::move(partial));
    }
  }
}

VectorXd stokes_lift(const FlowSystem& sys) {
  const VectorXd x0 = VectorXd::Zero(sys.size());
  const VectorXd r0 = sys.residual(x0, 0.0);
  if (r0.norm() == 0.0) return x0;
  return -SparseDirect(sys.matrix(x0, 0.0, false)).solve(r0);
}

FlowOptions flow_options(const SolverConfig& cfg) {
  FlowOptions o;
  o.pins = cfg.pins;
  o.symmetric = cfg.symmetric;
  return o;
}

FlowState run(const FlowSystem& sys, const SolverConfig& cfg, std::vector<ContinuationPoint>* sweep) {
  IterationTrace trace;
  VectorXd x = stokes_lift(sys);
  const VectorXd U = sys.velocity(x);
  {
    const double scale = sys.residual_scale(0.0);
    const double res = scale > 0.0 ? sys.residual(x, 0.0).norm() / scale : 0.0;
    trace.records.push_back({0, "stokes", res, sys.energy(U), 1.0});
  }
  double res = 0.0;
  for (double lambda : cfg.lambda_schedule) {
    try {
      res = iterate(sys, x, lambda, cfg, trace);
    } catch (const NonConvergence& e) {
      throw NonConvergence("at lambda = " + fmt(lambda) + ": " + e.message(), e.partial());
    } catch (const Error& e) {
      throw Error(e.kind(), "at lambda = " + fmt(lambda) + ": " + e.message());
    }
    if (sweep) {
      ContinuationPoint p;
      p.lambda = lambda;
      p.state = sys.make_state(x, "navier-stokes");
      p.state.lambda = lambda;
      p.state.relative_residual = res;
      const VectorXd w = p.state.velocity - U;
      p.w_norm = std::sqrt(std::max(0.0, sys.energy(w)));
      sweep->push_back(std::move(p));
    }
  }
  trace.converged = true;
  FlowState s = sys.make_state(x, "navier-stokes");
  s.lambda = cfg.lambda_schedule.back();
  s.relative_residual = res;
  s.trace = std::move(trace);
  return s;
}

}  // namespace

VectorXd fixed_point_map(const FlowSystem& sys, const VectorXd& x, double lambda) {
  const VectorXd load = lambda * convection_vector(sys.mesh(), sys.dofs(), sys.velocity(x));
  const VectorXd x0 = VectorXd::Zero(sys.size());
  const VectorXd r0 = sys.residual(x0, 0.0, &load);
  return -SparseDirect(sys.matrix(x0, 0.0, false)).solve(r0);
}

FlowState solve_navier_stokes(std::shared_ptr<const Mesh> mesh, const ProblemData& data, const SolverConfig& config) {
  config.validate();
  if (config.symmetric) return solve_symmetric(std::move(mesh), data, config);
  const FlowSystem sys(std::move(mesh), data, flow_options(config));
  return run(sys, config, nullptr);
}

double data_asymmetry(const Mesh& mesh, const ProblemData& data) {
  const DomainSpec& dom = mesh.domain();
  double worst = 0.0;
  // Boundary data at mirrored quadrature points: a_*, beta even; b_tau odd (tau flips under reflection).
  for (int j = 0; j < dom.num_components(); ++j) {
    boundary_integral(dom, j, [&](const BoundaryFrame& f) {
      const Vec2 y(f.point.x(), -f.point.y());
      int jm = -1;
      double best = std::numeric_limits<double>::infinity(), tm = 0.0;
      for (int c = 0; c < dom.num_components(); ++c) {
        double d = 0.0;
        const double t = dom.curve(c).project(y, &d);
        if (d < best) {
          best = d;
          jm = c;
          tm = t;
        }
      }
      const BoundaryFrame g = frame_at(dom, jm, tm);
      worst = std::max(worst, std::abs(data.a_star[j](f) - data.a_star[jm](g)));
      worst = std::max(worst, std::abs(data.beta[j](f) - data.beta[jm](g)));
      worst = std::max(worst, std::abs(data.b_tau[j](f) + data.b_tau[jm](g)));
      return 0.0;
    });
  }
  if (data.force.has_pointwise()) {
    for (const Vec2& x : mesh.nodes) {
      const Vec2 fx = data.force.pointwise()(x);
      const Vec2 fy = data.force.pointwise()(Vec2(x.x(), -x.y()));
      worst = std::max(worst, (Vec2(fx.x(), -fx.y()) - fy).cwiseAbs().maxCoeff());
    }
  } else if (data.force.is_nodal()) {
    const auto map = mirror_node_map(mesh);
    const auto& f = data.force.nodal_values();
    for (size_t i = 0; i < f.size(); ++i)
      worst = std::max(worst, (Vec2(f[i].x(), -f[i].y()) - f[map[i]]).cwiseAbs().maxCoeff());
  } else if (!data.force.is_zero()) {
    throw Error(ErrorKind::data, "cannot verify the symmetry of an element-wise force");
  }
  return worst;
}

FlowState solve_symmetric(std::shared_ptr<const Mesh> mesh, const ProblemData& data, SolverConfig config) {
  config.validate();
  if (!classify_symmetry(mesh->domain()).admissible_x1)
    throw Error(ErrorKind::data, "domain is not symmetric about the x1-axis");
  data.validate(mesh->domain());
  const double asym = data_asymmetry(*mesh, data);
  if (asym >= 1e-10) throw Error(ErrorKind::data, "data are not mirror-symmetric (max deviation " + fmt(asym) + ")");
  mirror_node_map(*mesh);
  config.symmetric = true;
  const FlowSystem sys(std::move(mesh), data, flow_options(config));
  FlowState s = run(sys, config, nullptr);
  s.problem = "navier-stokes-symmetric";
  return s;
}

std::vector<ContinuationPoint> continuation_sweep(std::shared_ptr<const Mesh> mesh, const ProblemData& data,
                                                  const std::vector<double>& lambdas, const SolverConfig& config) {
  SolverConfig cfg = config;
  cfg.lambda_schedule = lambdas;
  cfg.validate();
  if (cfg.symmetric) {
    if (!classify_symmetry(mesh->domain()).admissible_x1)
      throw Error(ErrorKind::data, "domain is not symmetric about the x1-axis");
    const double asym = data_asymmetry(*mesh, data);
    if (asym >= 1e-10) throw Error(ErrorKind::data, "data are not mirror-symmetric (max deviation " + fmt(asym) + ")");
  }
  const FlowSystem sys(std::move(mesh), data, flow_options(cfg));
  std::vector<ContinuationPoint> out;
  run(sys, cfg, &out);
  return out;
}

}  // namespace slipflow
