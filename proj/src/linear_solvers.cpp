#include "slipflow/linear_solvers.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <random>
#include <sstream>

#include "slipflow/error.hpp"

namespace slipflow {

namespace {

std::string fmt_sci(double v) {
  std::ostringstream o;
  o << v;
  return o.str();
}

}  // namespace

double ScalarField::value_at(int tri, const PointValues& v) const {
  const auto& nodes = mesh->tri_nodes[tri];
  double s = 0.0;
  for (int a = 0; a < 6; ++a) s += v.N(a) * values(nodes[a]);
  return s;
}

Vec2 ScalarField::gradient_at(int tri, const PointValues& v) const {
  const auto& nodes = mesh->tri_nodes[tri];
  Vec2 g = Vec2::Zero();
  for (int a = 0; a < 6; ++a) g += values(nodes[a]) * v.dN.row(a).transpose();
  return g;
}

DirichletResult solve_laplace_dirichlet(std::shared_ptr<const Mesh> mesh, const std::vector<BoundaryScalar>& values) {
  const Mesh& m = *mesh;
  if (static_cast<int>(values.size()) != m.domain().num_components())
    throw Error(ErrorKind::configuration, "Dirichlet data needs one entry per boundary component");
  const int nn = m.num_nodes();
  VectorXd q = VectorXd::Zero(nn);
  std::vector<int> free_index(nn, -1);
  int nf = 0;
  DirichletResult res;
  res.boundary_min = std::numeric_limits<double>::infinity();
  res.boundary_max = -res.boundary_min;
  for (int i = 0; i < nn; ++i) {
    const int comp = m.node_component[i];
    if (comp < 0) {
      free_index[i] = nf++;
      continue;
    }
    q(i) = values[comp](m.node_frame[i]);
    res.boundary_min = std::min(res.boundary_min, q(i));
    res.boundary_max = std::max(res.boundary_max, q(i));
  }
  const SpMat K = assemble_scalar_stiffness(m);
  const VectorXd Kq = K * q;
  std::vector<Eigen::Triplet<double>> t;
  VectorXd rhs(nf);
  for (int i = 0; i < nn; ++i)
    if (free_index[i] >= 0) rhs(free_index[i]) = -Kq(i);
  for (int k = 0; k < K.outerSize(); ++k)
    for (SpMat::InnerIterator it(K, k); it; ++it)
      if (free_index[it.row()] >= 0 && free_index[it.col()] >= 0)
        t.emplace_back(free_index[it.row()], free_index[it.col()], it.value());
  SpMat Kf(nf, nf);
  Kf.setFromTriplets(t.begin(), t.end());
  Eigen::SimplicialLDLT<SpMat> ldlt(Kf);
  if (ldlt.info() != Eigen::Success) throw Error(ErrorKind::solver, "Dirichlet Laplace factorization failed");
  const VectorXd x = ldlt.solve(rhs);
  for (int i = 0; i < nn; ++i)
    if (free_index[i] >= 0) q(i) = x(free_index[i]);
  res.within_bounds = q.minCoeff() >= res.boundary_min - 1e-8 && q.maxCoeff() <= res.boundary_max + 1e-8;
  res.field = ScalarField{mesh, q};
  return res;
}

ScalarField solve_laplace_neumann(std::shared_ptr<const Mesh> mesh, const std::vector<BoundaryScalar>& a_star) {
  const Mesh& m = *mesh;
  const DomainSpec& dom = m.domain();
  if (static_cast<int>(a_star.size()) != dom.num_components())
    throw Error(ErrorKind::configuration, "Neumann data needs one entry per boundary component");
  double total = 0.0, sup = 0.0, length = 0.0;
  for (int j = 0; j < dom.num_components(); ++j) {
    total += boundary_integral(dom, j, a_star[j]);
    length += boundary_length(dom, j);
    boundary_integral(dom, j, [&](const BoundaryFrame& f) {
      sup = std::max(sup, std::abs(a_star[j](f)));
      return 0.0;
    });
  }
  if (std::abs(total) > 1e-8 * sup * length)
    throw Error(ErrorKind::compatibility, "Neumann data has total flux " + fmt_sci(total));

  const int nn = m.num_nodes();
  const SpMat K = assemble_scalar_stiffness(m);
  const VectorXd mean = assemble_scalar_mass(m) * VectorXd::Ones(nn);
  std::vector<Eigen::Triplet<double>> t;
  for (int k = 0; k < K.outerSize(); ++k)
    for (SpMat::InnerIterator it(K, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  for (int i = 0; i < nn; ++i) {
    t.emplace_back(i, nn, mean(i));
    t.emplace_back(nn, i, mean(i));
  }
  SpMat A(nn + 1, nn + 1);
  A.setFromTriplets(t.begin(), t.end());
  VectorXd rhs = VectorXd::Zero(nn + 1);
  rhs.head(nn) = assemble_scalar_boundary_load(m, a_star);
  // The discrete flux defect lands in the multiplier.
  const VectorXd x = SparseDirect(A).solve(rhs);
  return ScalarField{mesh, x.head(nn)};
}

FlowState solve_stokes(std::shared_ptr<const Mesh> mesh, const ProblemData& data, const FlowOptions& options) {
  const FlowSystem sys(std::move(mesh), data, options);
  const VectorXd x0 = VectorXd::Zero(sys.size());
  const VectorXd r0 = sys.residual(x0, 0.0);
  const SpMat J = sys.matrix(x0, 0.0, false);
  const VectorXd x = r0.norm() > 0.0 ? VectorXd(-SparseDirect(J).solve(r0)) : x0;
  FlowState s = sys.make_state(x, "stokes");
  s.lambda = 0.0;
  const double scale = r0.norm();
  s.relative_residual = scale > 0.0 ? sys.residual(x, 0.0).norm() / scale : 0.0;
  s.trace.records.push_back({0, "stokes", s.relative_residual, sys.energy(s.velocity), 1.0});
  s.trace.converged = true;
  return s;
}

namespace {


// Solves (A - sigma M) y = M x on the subspace c^T y = 0 (if c is non-empty).
class ShiftInvert {
 public:
  ShiftInvert(const SpMat& A, const SpMat& M, double sigma, const VectorXd& c) : M_(M), n_(A.rows()), bordered_(c.size() > 0) {
    SpMat S = A - sigma * M;
    if (bordered_) {
      std::vector<Eigen::Triplet<double>> t;
      for (int k = 0; k < S.outerSize(); ++k)
        for (SpMat::InnerIterator it(S, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
      for (int i = 0; i < n_; ++i) {
        if (c(i) == 0.0) continue;
        t.emplace_back(i, n_, c(i));
        t.emplace_back(n_, i, c(i));
      }
      S.resize(n_ + 1, n_ + 1);
      S.setFromTriplets(t.begin(), t.end());
    }
    lu_.factorize(S);
  }
  VectorXd apply(const VectorXd& x) const {
    VectorXd rhs = VectorXd::Zero(bordered_ ? n_ + 1 : n_);
    rhs.head(n_) = M_ * x;
    return lu_.solve(rhs).head(n_);
  }

 private:
  const SpMat& M_;
  Eigen::Index n_;
  bool bordered_;
  SparseDirect lu_;
};

}  // namespace

KornResult korn_constant(const Mesh& mesh, const std::vector<BoundaryScalar>& weight, const KornOptions& options) {
  const DofMap dofs(mesh);
  if (static_cast<int>(weight.size()) != mesh.domain().num_components())
    throw Error(ErrorKind::configuration, "Korn weight needs one entry per boundary component");
  const std::vector<double> zero(mesh.num_nodes(), 0.0);
  const ConstrainedSpace space = normal_trace_space(mesh, zero);
  const SpMat Kc = assemble_viscous(mesh, dofs, 2.0) + assemble_friction(mesh, dofs, weight);
  const SpMat Mc = assemble_vector_h1(mesh, dofs);
  const SpMat& P = space.P;
  const SpMat A = P.transpose() * Kc * P;
  const SpMat M = P.transpose() * Mc * P;
  const int n = static_cast<int>(A.rows());

  KornResult res;
  const auto sym = classify_symmetry(mesh.domain());
  res.circular = sym.circular_center.has_value();
  VectorXd u0z;
  if (res.circular) u0z = space.coordinates(rigid_rotation(mesh, *sym.circular_center));
  VectorXd c;
  if (options.project_rotation) {
    if (!res.circular) throw Error(ErrorKind::configuration, "rotation projection requires a circularly symmetric domain");
    c = M * u0z;
    res.rotation_projected = true;
  }

  const int b = std::min(options.block, n);
  const ShiftInvert op(A, M, options.shift, c);
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::MatrixXd X(n, b);
  for (int j = 0; j < b; ++j)
    for (int i = 0; i < n; ++i) X(i, j) = dist(rng);
  if (c.size() > 0)
    for (int j = 0; j < b; ++j) X.col(j) -= (c.dot(X.col(j)) / c.dot(u0z)) * u0z;

  double lambda_prev = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= options.max_iterations; ++it) {
    Eigen::MatrixXd Y(n, b);
    for (int j = 0; j < b; ++j) Y.col(j) = op.apply(X.col(j));
    const Eigen::MatrixXd Ay = Y.transpose() * (A * Y);
    const Eigen::MatrixXd My = Y.transpose() * (M * Y);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(0.5 * (Ay + Ay.transpose()), 0.5 * (My + My.transpose()));
    if (ges.info() != Eigen::Success) throw Error(ErrorKind::solver, "Rayleigh-Ritz step failed in Korn iteration");
    X = Y * ges.eigenvectors();
    for (int j = 0; j < b; ++j) X.col(j) /= std::sqrt(X.col(j).dot(M * X.col(j)));
    const double lambda = ges.eigenvalues()(0);
    const VectorXd x = X.col(0);
    const double resid = (A * x - lambda * (M * x)).norm() / std::max((M * x).norm(), 1e-300);
    res.iterations = it;
    res.residual = resid;
    res.lambda_min = lambda;
    // Scale by the top Ritz value so that a zero eigenvalue (rigid rotation) also terminates.
    const double top = std::abs(ges.eigenvalues()(b - 1));
    const double scale = std::max(std::abs(lambda), 1e-8 * top);
    // A roundoff-level lambda has no stable digits to settle; the residual decides.
    const bool settled = std::abs(lambda - lambda_prev) <= options.tolerance * scale || std::abs(lambda) <= 1e-12 * top;
    if (settled && resid <= std::max(1e-6 * std::abs(lambda), 1e-10 * top)) break;
    if (it == options.max_iterations)
      throw Error(ErrorKind::solver, "Korn eigen-iteration did not converge, residual " + fmt_sci(resid));
    lambda_prev = lambda;
  }
  res.K = 1.0 / res.lambda_min;
  res.mode = space.expand(X.col(0));
  if (res.circular) {
    const VectorXd x = X.col(0);
    res.rotation_cosine = std::abs(x.dot(M * u0z)) / std::sqrt(x.dot(M * x) * u0z.dot(M * u0z));
  }
  return res;
}

namespace {

struct LrEvaluator {
  const Mesh& mesh;
  double r;
  const RuleTri& rule;

  // ||v||_{L^r}^r and the vector g_i = int |v|^{r-2} v phi_i.
  double eval(const VectorXd& v, VectorXd* grad) const {
    double s = 0.0;
    if (grad) grad->setZero(v.size());
    for_each_volume_point(
        mesh,
        [&](const Element& el, const PointValues& pv, double w) {
          double val = 0.0;
          for (int a = 0; a < 6; ++a) val += pv.N(a) * v(el.nodes()[a]);
          const double av = std::abs(val);
          s += w * std::pow(av, r);
          if (grad) {
            const double gv = std::pow(av, r - 2.0) * val;
            for (int a = 0; a < 6; ++a) (*grad)(el.nodes()[a]) += w * gv * pv.N(a);
          }
        },
        rule);
    return s;
  }
};

}  // namespace

SobolevResult sobolev_constant(const Mesh& mesh, double r, int max_iterations, double tolerance) {
  if (!(r > 2.0) || !std::isfinite(r)) throw Error(ErrorKind::configuration, "Sobolev exponent must satisfy 2 < r < inf");
  const int nn = mesh.num_nodes();
  const SpMat M = assemble_scalar_mass(mesh) + assemble_scalar_stiffness(mesh);
  Eigen::SimplicialLDLT<SpMat> ldlt(M);
  if (ldlt.info() != Eigen::Success) throw Error(ErrorKind::solver, "Sobolev Gram factorization failed");
  const LrEvaluator lr{mesh, r, triangle_rule_collapsed(std::max(4, static_cast<int>(std::ceil(r)) + 2))};

  std::vector<VectorXd> starts;
  const DomainSpec& dom = mesh.domain();
  const double diam = dom.diameter();
  VectorXd c = VectorXd::Ones(nn);
  for (int i = 0; i < nn; ++i) c(i) += 0.1 * mesh.nodes[i].x() / diam;
  starts.push_back(c);
  for (int j = 0; j < dom.num_components(); ++j) {
    for (double t : {0.0, 0.25, 0.5, 0.75}) {
      const Vec2 x0 = dom.curve(j).point(t);
      VectorXd v(nn);
      for (int i = 0; i < nn; ++i) v(i) = std::exp(-(mesh.nodes[i] - x0).squaredNorm() / (0.04 * diam * diam));
      starts.push_back(v);
    }
  }

  SobolevResult res;
  res.r = r;
  for (const VectorXd& s0 : starts) {
    VectorXd v = s0 / std::sqrt(s0.dot(M * s0));
    double J = lr.eval(v, nullptr);
    bool converged = false;
    VectorXd g;
    for (int it = 0; it < max_iterations; ++it) {
      lr.eval(v, &g);
      VectorXd w = ldlt.solve(g);
      w /= std::sqrt(w.dot(M * w));
      const double Jn = lr.eval(w, nullptr);
      v = w;
      if (std::abs(Jn - J) <= tolerance * Jn) {
        J = Jn;
        converged = true;
        break;
      }
      J = Jn;
    }
    if (!converged) res.stagnated = true;
    ++res.starts;
    const double C = std::pow(J, 1.0 / r);
    if (C > res.C) {
      res.C = C;
      res.maximizer = v;
    }
  }
  return res;
}

}  // namespace slipflow
