#include "slipflow/problem.hpp"

#include <cmath>
#include <string>

#include "slipflow/error.hpp"

namespace slipflow {

BoundaryScalar constant_scalar(double c) {
  return [c](const BoundaryFrame&) { return c; };
}

ForceField ForceField::analytic(Pointwise f) {
  ForceField r;
  r.pointwise_ = std::move(f);
  return r;
}

ForceField ForceField::nodal(std::vector<Vec2> values) {
  ForceField r;
  r.nodal_ = std::move(values);
  return r;
}

ForceField ForceField::element(ElementWise f) {
  ForceField r;
  r.element_ = std::move(f);
  return r;
}

Vec2 ForceField::eval(const Element& el, const PointValues& v) const {
  if (pointwise_) return pointwise_(v.x);
  if (element_) return element_(v, el.tri());
  if (!nodal_.empty()) {
    Vec2 f = Vec2::Zero();
    for (int a = 0; a < 6; ++a) f += v.N(a) * nodal_.at(el.nodes()[a]);
    return f;
  }
  return Vec2::Zero();
}

ProblemData ProblemData::constant(double nu, const std::vector<double>& beta, const std::vector<double>& a_star,
                                  const std::vector<double>& b_tau) {
  ProblemData d;
  d.nu = nu;
  for (double b : beta) d.beta.push_back(constant_scalar(b));
  for (double a : a_star) d.a_star.push_back(constant_scalar(a));
  for (double b : b_tau) d.b_tau.push_back(constant_scalar(b));
  return d;
}

void ProblemData::validate(const DomainSpec& domain) const {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw Error(ErrorKind::data, "viscosity must be positive");
  const size_t nc = domain.num_components();
  if (beta.size() != nc || a_star.size() != nc || b_tau.size() != nc)
    throw Error(ErrorKind::data, "boundary data must be given for each of the " + std::to_string(nc) + " components");
  for (size_t j = 0; j < nc; ++j) {
    if (!beta[j] || !a_star[j] || !b_tau[j]) throw Error(ErrorKind::data, "missing boundary data");
    boundary_integral(domain, static_cast<int>(j), [&](const BoundaryFrame& f) {
      const double b = beta[j](f);
      if (!(b >= 0.0))
        throw Error(ErrorKind::data, "negative friction coefficient on " + domain.label(static_cast<int>(j)));
      return 0.0;
    });
  }
}

std::vector<double> ProblemData::fluxes(const DomainSpec& domain) const {
  std::vector<double> F;
  for (int j = 0; j < domain.num_components(); ++j) F.push_back(boundary_integral(domain, j, a_star.at(j)));
  return F;
}

bool ProblemData::beta_vanishes(const DomainSpec& domain) const {
  bool zero = true;
  for (int j = 0; j < domain.num_components(); ++j) {
    boundary_integral(domain, j, [&](const BoundaryFrame& f) {
      if (beta.at(j)(f) != 0.0) zero = false;
      return 0.0;
    });
  }
  return zero;
}

}  // namespace slipflow
