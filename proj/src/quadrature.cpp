#include "slipflow/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <mutex>

namespace slipflow {

namespace {

Rule1D build_gauss_legendre(int n) {
  // Jacobi matrix of the Legendre recurrence on [-1, 1].
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = b;
    J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  Rule1D r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    r.x[i] = 0.5 * (es.eigenvalues()(i) + 1.0);
    r.w[i] = v0 * v0;  // 2 v0^2 on [-1,1], halved for [0,1]
  }
  return r;
}

RuleTri build_deg5() {
  RuleTri r;
  const double a1 = 0.0597158717897698, b1 = 0.4701420641051151, w1 = 0.1323941527885062;
  const double a2 = 0.7974269853530873, b2 = 0.1012865073234563, w2 = 0.1259391805448271;
  auto add = [&](double l0, double l1, double w) {
    r.x.emplace_back(l1, 1.0 - l0 - l1);
    r.w.push_back(0.5 * w);
  };
  add(1.0 / 3.0, 1.0 / 3.0, 0.225);
  add(a1, b1, w1);
  add(b1, a1, w1);
  add(b1, b1, w1);
  add(a2, b2, w2);
  add(b2, a2, w2);
  add(b2, b2, w2);
  return r;
}

RuleTri build_collapsed(int n) {
  const Rule1D& g = gauss_legendre(n);
  RuleTri r;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double u = g.x[i];
      const double v = g.x[j];
      r.x.emplace_back(u, v * (1.0 - u));
      r.w.push_back(g.w[i] * g.w[j] * (1.0 - u));
    }
  }
  return r;
}

std::mutex cache_mutex;

}  // namespace

const Rule1D& gauss_legendre(int n) {
  static std::map<int, Rule1D> cache;
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_gauss_legendre(n)).first;
  return it->second;
}

const RuleTri& triangle_rule_deg5() {
  static const RuleTri rule = build_deg5();
  return rule;
}

const RuleTri& triangle_rule_collapsed(int n) {
  static std::map<int, RuleTri> cache;
  static std::mutex m;
  std::lock_guard<std::mutex> lock(m);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_collapsed(n)).first;
  return it->second;
}

}  // namespace slipflow
