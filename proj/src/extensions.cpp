#include "slipflow/extensions.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>

#include "slipflow/error.hpp"

namespace slipflow {

std::vector<double> hole_fluxes(const DomainSpec& domain, const std::vector<BoundaryScalar>& a_star) {
  std::vector<double> f;
  for (int j = 1; j < domain.num_components(); ++j) f.push_back(boundary_integral(domain, j, a_star.at(j)));
  return f;
}

ExtensionField solenoidal_extension(std::shared_ptr<const Mesh> mesh, const std::vector<BoundaryScalar>& a_star) {
  const Mesh& m = *mesh;
  ExtensionField ext;
  ext.method = "neumann";
  ext.potential = solve_laplace_neumann(mesh, a_star);
  ext.fluxes = hole_fluxes(m.domain(), a_star);
  const DofMap dofs(m);
  const ConstrainedSpace space = normal_trace_space(m, interpolate_normal_data(m, a_star));
  const SpMat M = assemble_vector_mass(m, dofs);
  VectorXd load = VectorXd::Zero(dofs.num_velocity());
  for_each_volume_point(m, [&](const Element& el, const PointValues& v, double w) {
    const Vec2 g = ext.potential.gradient_at(el.tri(), v);
    for (int a = 0; a < 6; ++a) {
      load(2 * el.nodes()[a]) += w * v.N(a) * g.x();
      load(2 * el.nodes()[a] + 1) += w * v.N(a) * g.y();
    }
  });
  const SpMat Mr = space.P.transpose() * M * space.P;
  Eigen::SimplicialLDLT<SpMat> ldlt(Mr);
  if (ldlt.info() != Eigen::Success) throw Error(ErrorKind::solver, "extension projection failed");
  const VectorXd z = ldlt.solve(space.P.transpose() * (load - M * space.g));
  ext.velocity = space.expand(z);
  return ext;
}

Vec2 HarmonicBasis::value(const VectorXd& c, int tri, const PointValues& v) const {
  Vec2 h = Vec2::Zero();
  for (int k = 0; k < size(); ++k) h += c(k) * q[k].gradient_at(tri, v);
  return h;
}

HarmonicBasis harmonic_basis(std::shared_ptr<const Mesh> mesh) {
  HarmonicBasis b;
  b.mesh = mesh;
  const int N = mesh->domain().num_holes();
  for (int k = 1; k <= N; ++k) {
    std::vector<BoundaryScalar> vals;
    for (int j = 0; j <= N; ++j) vals.push_back(constant_scalar(j == k ? 1.0 : 0.0));
    b.q.push_back(solve_laplace_dirichlet(mesh, vals).field);
  }
  b.gram.resize(N, N);
  b.alpha.resize(N, N);
  if (N == 0) return b;
  const SpMat K = assemble_scalar_stiffness(*mesh);
  for (int k = 0; k < N; ++k)
    for (int l = 0; l < N; ++l) b.gram(k, l) = b.q[k].values.dot(K * b.q[l].values);
  b.gram = 0.5 * (b.gram + b.gram.transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.gram);
  const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  if (!(lo > 1e-10 * hi))
    throw Error(ErrorKind::numerical_rank, "harmonic Gram matrix is numerically singular (condition " +
                                               std::to_string(hi / std::max(lo, 1e-300)) + ")");
  // Gram-Schmidt in the order k = 1..N is the inverse Cholesky factor.
  const Eigen::LLT<Eigen::MatrixXd> llt(b.gram);
  const Eigen::MatrixXd L = llt.matrixL();
  b.alpha = L.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(N, N));
  return b;
}

VectorXd harmonic_coefficients(const HarmonicBasis& basis, const std::vector<double>& fluxes) {
  const int N = basis.size();
  if (static_cast<int>(fluxes.size()) != N)
    throw Error(ErrorKind::configuration, "expected " + std::to_string(N) + " hole fluxes");
  const VectorXd F = Eigen::Map<const VectorXd>(fluxes.data(), N);
  return basis.alpha.transpose() * (basis.alpha * F);
}

VectorXd harmonic_projection(const HarmonicBasis& basis, const VectorXd& velocity) {
  const int N = basis.size();
  VectorXd b = VectorXd::Zero(N);
  const auto& nodes_of = basis.mesh->tri_nodes;
  for_each_volume_point(*basis.mesh, [&](const Element& el, const PointValues& v, double w) {
    Vec2 u = Vec2::Zero();
    for (int a = 0; a < 6; ++a) {
      const int n = nodes_of[el.tri()][a];
      u += v.N(a) * Vec2(velocity(2 * n), velocity(2 * n + 1));
    }
    for (int k = 0; k < N; ++k) b(k) += w * u.dot(basis.q[k].gradient_at(el.tri(), v));
  });
  return basis.alpha.transpose() * (basis.alpha * b);
}

double harmonic_distance(const HarmonicBasis& basis, const VectorXd& c, const VectorXd& d) {
  const VectorXd e = c - d;
  return std::sqrt(std::max(0.0, e.dot(basis.gram * e)));
}

double harmonic_lq_norm(const HarmonicBasis& basis, const VectorXd& c, double q) {
  double s = 0.0;
  for_each_volume_point(
      *basis.mesh,
      [&](const Element& el, const PointValues& v, double w) { s += w * std::pow(basis.value(c, el.tri(), v).norm(), q); },
      triangle_rule_collapsed(6));
  return std::pow(s, 1.0 / q);
}

VectorXd harmonic_orthogonality(const HarmonicBasis& basis, const VectorXd& velocity, const VectorXd& c) {
  const int N = basis.size();
  VectorXd r = VectorXd::Zero(N);
  for_each_volume_point(*basis.mesh, [&](const Element& el, const PointValues& v, double w) {
    Vec2 u = Vec2::Zero();
    for (int a = 0; a < 6; ++a) {
      const int n = el.nodes()[a];
      u += v.N(a) * Vec2(velocity(2 * n), velocity(2 * n + 1));
    }
    const Vec2 d = u - basis.value(c, el.tri(), v);
    for (int k = 0; k < N; ++k) r(k) += w * d.dot(basis.q[k].gradient_at(el.tri(), v));
  });
  return basis.alpha * r;
}

}  // namespace slipflow
