#pragma once

#include <Eigen/Dense>
#include <vector>

namespace slipflow {

// Nodes and weights on [0, 1].
struct Rule1D {
  std::vector<double> x;
  std::vector<double> w;
};

// Points on the reference triangle {(xi, eta): xi, eta >= 0, xi + eta <= 1};
// weights sum to 1/2.
struct RuleTri {
  std::vector<Eigen::Vector2d> x;
  std::vector<double> w;
};

// Golub-Welsch; cached per node count.
const Rule1D& gauss_legendre(int n);

// Degree-5, 7-point rule (assembly).
const RuleTri& triangle_rule_deg5();
// Collapsed tensor Gauss rule with n*n points, exact for degree 2n-1.
const RuleTri& triangle_rule_collapsed(int n);

}  // namespace slipflow
