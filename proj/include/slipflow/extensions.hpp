#pragma once

#include <memory>
#include <string>
#include <vector>

#include "slipflow/linear_solvers.hpp"

namespace slipflow {

struct ExtensionField {
  VectorXd velocity;            // interleaved P2 velocity coefficients
  std::vector<double> fluxes;   // int_{Gamma_j} a_* ds, j = 1..N
  std::string method;
  ScalarField potential;        // Neumann potential for the "neumann" method
};

// A = grad q with dq/dn = a_*, projected to P2 with A.n = a_* at boundary nodes.
ExtensionField solenoidal_extension(std::shared_ptr<const Mesh> mesh, const std::vector<BoundaryScalar>& a_star);

struct HarmonicBasis {
  std::shared_ptr<const Mesh> mesh;
  std::vector<ScalarField> q;  // q_k = delta_jk on Gamma_j, k = 1..N
  Eigen::MatrixXd gram;        // (grad q_k, grad q_l)
  Eigen::MatrixXd alpha;       // psi_i = sum_k alpha(i, k) grad q_k, lower triangular

  int size() const { return static_cast<int>(q.size()); }
  // Value of sum_k c_k grad q_k.
  Vec2 value(const VectorXd& c, int tri, const PointValues& v) const;
  // L^2 inner products of the orthonormal fields (identity up to roundoff).
  Eigen::MatrixXd psi_gram() const { return alpha * gram * alpha.transpose(); }
};

HarmonicBasis harmonic_basis(std::shared_ptr<const Mesh> mesh);

// Coefficients on grad q_k of h = sum_k grad q_k sum_i alpha_ik sum_j alpha_ij F_j.
VectorXd harmonic_coefficients(const HarmonicBasis& basis, const std::vector<double>& fluxes);
// Coefficients of the L^2 projection of a P2 velocity onto span{psi_i}.
VectorXd harmonic_projection(const HarmonicBasis& basis, const VectorXd& velocity);
// L^2 distance between two harmonic fields given by coefficients.
double harmonic_distance(const HarmonicBasis& basis, const VectorXd& c, const VectorXd& d);
double harmonic_lq_norm(const HarmonicBasis& basis, const VectorXd& c, double q);
// (v - h, psi_i) for each i.
VectorXd harmonic_orthogonality(const HarmonicBasis& basis, const VectorXd& velocity, const VectorXd& c);

// Fluxes int_{Gamma_j} a_* ds over the holes j = 1..N.
std::vector<double> hole_fluxes(const DomainSpec& domain, const std::vector<BoundaryScalar>& a_star);

}  // namespace slipflow
