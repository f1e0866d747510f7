#include "slipflow/flow.hpp"

#include <Eigen/SparseLU>
#include <cmath>

#include "slipflow/error.hpp"

namespace slipflow {

namespace {
using LU = Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>;
}

void SparseDirect::factorize(const SpMat& A) {
  auto lu = std::make_shared<LU>();
  SpMat Ac = A;
  Ac.makeCompressed();
  lu->compute(Ac);
  if (lu->info() != Eigen::Success) throw Error(ErrorKind::solver, "sparse factorization failed: " + lu->lastErrorMessage());
  impl_ = lu;
}

VectorXd SparseDirect::solve(const VectorXd& b) const {
  auto lu = std::static_pointer_cast<LU>(impl_);
  VectorXd x = lu->solve(b);
  if (lu->info() != Eigen::Success || !x.allFinite()) throw Error(ErrorKind::solver, "sparse triangular solve failed");
  return x;
}

Vec2 FlowState::velocity_at(int tri, const PointValues& v) const {
  const auto& nodes = mesh->tri_nodes[tri];
  Vec2 u = Vec2::Zero();
  for (int a = 0; a < 6; ++a) u += v.N(a) * node_velocity(nodes[a]);
  return u;
}

Mat2 FlowState::gradient_at(int tri, const PointValues& v) const {
  const auto& nodes = mesh->tri_nodes[tri];
  Mat2 G = Mat2::Zero();
  for (int a = 0; a < 6; ++a) G += node_velocity(nodes[a]) * v.dN.row(a);
  return G;
}

double FlowState::pressure_at(int tri, const PointValues& v) const {
  const auto& t = mesh->triangles[tri];
  return v.L(0) * pressure(t[0]) + v.L(1) * pressure(t[1]) + v.L(2) * pressure(t[2]);
}

Vec2 FlowState::pressure_gradient_at(int tri, const PointValues& v) const {
  const auto& t = mesh->triangles[tri];
  Vec2 g = Vec2::Zero();
  for (int q = 0; q < 3; ++q) g += pressure(t[q]) * v.dL.row(q).transpose();
  return g;
}

FlowSystem::FlowSystem(std::shared_ptr<const Mesh> mesh, const ProblemData& data, const FlowOptions& options)
    : mesh_(std::move(mesh)), dofs_(*mesh_), data_(data), options_(options) {
  const Mesh& m = *mesh_;
  const DomainSpec& dom = m.domain();
  data_.validate(dom);

  std::vector<int> node_mirror, vertex_mirror;
  if (options_.symmetric) {
    node_mirror = mirror_node_map(m);
    vertex_mirror = mirror_vertex_map(m);
  }
  space_ = apply_normal_trace(m, dofs_, data_, options_.symmetric ? &node_mirror : nullptr);
  Q_ = pressure_space(m, options_.symmetric ? &vertex_mirror : nullptr);
  A_ = assemble_viscous(m, dofs_, data_.nu) + assemble_friction(m, dofs_, data_.beta);
  B_ = assemble_divergence(m, dofs_);
  F_ = assemble_load(m, dofs_, data_);
  mQ_ = Q_.transpose() * pressure_mean_vector(m);
  PtBtQ_ = space_.P.transpose() * SpMat(B_.transpose()) * Q_;
  nz_ = space_.num_free();
  np_ = static_cast<int>(Q_.cols());

  std::vector<VectorXd> rows;
  std::vector<double> values;
  for (const auto& [comp, value] : options_.pins) {
    if (comp < 1 || comp >= dom.num_components())
      throw Error(ErrorKind::configuration, "circulation pins apply to hole components 1.." + std::to_string(dom.num_holes()));
    rows.push_back(circulation_functional(m, comp));
    values.push_back(value);
    pin_components_.push_back(comp);
  }

  const auto sym = classify_symmetry(dom);
  bool want_rotation = false;
  if (options_.rotation == FlowOptions::Rotation::on) want_rotation = true;
  if (options_.rotation == FlowOptions::Rotation::automatic)
    want_rotation = sym.circular_center.has_value() && data_.beta_vanishes(dom) && !options_.symmetric;
  if (want_rotation) {
    if (!sym.circular_center) throw Error(ErrorKind::configuration, "rotation constraint needs a circularly symmetric domain");
    const VectorXd u0 = rigid_rotation(m, *sym.circular_center);
    const VectorXd Mu0 = assemble_vector_mass(m, dofs_) * u0;
    // <f, u0> + <b_*, u0> must vanish for the constrained problem to be consistent.
    rotation_compat_ = F_.dot(u0);
    const double scale = F_.cwiseAbs().dot(u0.cwiseAbs());
    if (std::abs(rotation_compat_) > 1e-8 * std::max(scale, 1e-300) && scale > 0.0)
      throw Error(ErrorKind::data, "data not orthogonal to the rigid rotation: <f,u0> + <b,u0> = " +
                                       std::to_string(rotation_compat_));
    rows.push_back(Mu0);
    values.push_back(0.0);
    rotation_ = true;
  }
  ne_ = static_cast<int>(rows.size());
  E_.resize(ne_, dofs_.num_velocity());
  e_.resize(ne_);
  for (int k = 0; k < ne_; ++k) {
    E_.row(k) = rows[k].transpose();
    e_(k) = values[k];
  }
}

VectorXd FlowSystem::pack(const VectorXd& u) const {
  VectorXd x = VectorXd::Zero(size());
  x.head(nz_) = space_.coordinates(u);
  return x;
}

VectorXd FlowSystem::residual(const VectorXd& x, double lambda, const VectorXd* extra_load) const {
  const VectorXd u = velocity(x);
  const auto pr = x.segment(nz_, np_);
  const double mu_mean = x(nz_ + np_);
  const auto mu_e = x.tail(ne_);
  VectorXd mom = A_ * u - F_;
  if (lambda != 0.0) mom += lambda * convection_vector(*mesh_, dofs_, u);
  if (extra_load) mom += *extra_load;
  if (ne_ > 0) mom += E_.transpose() * mu_e;
  VectorXd r(size());
  r.head(nz_) = space_.P.transpose() * mom - PtBtQ_ * pr;
  r.segment(nz_, np_) = -(Q_.transpose() * (B_ * u)) + mQ_ * mu_mean;
  r(nz_ + np_) = mQ_.dot(pr);
  if (ne_ > 0) r.tail(ne_) = E_ * u - e_;
  return r;
}

double FlowSystem::residual_scale(double lambda, const VectorXd* extra_load) const {
  return residual(VectorXd::Zero(size()), lambda, extra_load).norm();
}

SpMat FlowSystem::matrix(const VectorXd& x, double lambda, bool newton) const {
  if (lambda == 0.0) return bordered(A_);
  const VectorXd u = velocity(x);
  SpMat K = A_ + lambda * assemble_convection(*mesh_, dofs_, u);
  if (newton) K += lambda * assemble_convection_jacobian(*mesh_, dofs_, u);
  return bordered(K);
}

SpMat FlowSystem::bordered(const SpMat& Kc) const {
  const SpMat K = space_.P.transpose() * Kc * space_.P;
  const Eigen::MatrixXd EP = ne_ > 0 ? Eigen::MatrixXd(E_ * space_.P) : Eigen::MatrixXd(0, nz_);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(K.nonZeros() + 2 * PtBtQ_.nonZeros() + 2 * np_ + 2 * ne_ * nz_);
  for (int k = 0; k < K.outerSize(); ++k)
    for (SpMat::InnerIterator it(K, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  for (int k = 0; k < PtBtQ_.outerSize(); ++k)
    for (SpMat::InnerIterator it(PtBtQ_, k); it; ++it) {
      t.emplace_back(it.row(), nz_ + it.col(), -it.value());
      t.emplace_back(nz_ + it.col(), it.row(), -it.value());
    }
  const int im = nz_ + np_;
  for (int q = 0; q < np_; ++q) {
    if (mQ_(q) == 0.0) continue;
    t.emplace_back(nz_ + q, im, mQ_(q));
    t.emplace_back(im, nz_ + q, mQ_(q));
  }
  for (int r = 0; r < ne_; ++r)
    for (int j = 0; j < nz_; ++j) {
      if (EP(r, j) == 0.0) continue;
      t.emplace_back(im + 1 + r, j, EP(r, j));
      t.emplace_back(j, im + 1 + r, EP(r, j));
    }
  SpMat M(size(), size());
  M.setFromTriplets(t.begin(), t.end());
  return M;
}

FlowState FlowSystem::make_state(const VectorXd& x, const std::string& problem) const {
  FlowState s;
  s.mesh = mesh_;
  s.velocity = velocity(x);
  s.pressure = pressure(x);
  s.nu = data_.nu;
  s.problem = problem;
  s.rotation_constraint = rotation_;
  s.rotation_compatibility = rotation_compat_;
  s.divergence_multiplier = x(nz_ + np_);
  for (size_t k = 0; k < pin_components_.size(); ++k) s.pin_multipliers[pin_components_[k]] = x(nz_ + np_ + 1 + k);
  return s;
}

}  // namespace slipflow
