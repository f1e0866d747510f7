#include "slipflow/analysis.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <limits>
#include <sstream>

#include "slipflow/extensions.hpp"
#include "slipflow/navier_stokes.hpp"

namespace slipflow {

namespace {

// Visits the exact-geometry quadrature frames of component j.
template <class F>
void for_each_frame(const DomainSpec& dom, int j, F&& fn) {
  boundary_integral(dom, j, [&](const BoundaryFrame& f) {
    fn(f);
    return 0.0;
  });
}

double flux_scale(const std::vector<double>& fluxes) {
  double s = 0.0;
  for (double f : fluxes) s += std::abs(f);
  return std::max(1.0, s);
}

}  // namespace

void recompute_verdicts(AuditReport& r) {
  double total = 0.0;
  for (double f : r.fluxes) total += f;
  r.total_flux = total;
  r.compatible = std::abs(total) <= r.flux_tolerance * flux_scale(r.fluxes);

  auto& t1 = r.theorem1;
  t1.verdict = r.compatible && t1.beta_nonzero && t1.margin >= -r.margin_tolerance;

  auto& t2 = r.theorem2;
  t2.hole_convex = t2.single_hole && t2.hole_min_curvature >= -r.convexity_tolerance;
  t2.friction_ok = !t2.circular || t2.beta_nonzero;
  t2.verdict = r.compatible && t2.single_hole && t2.hole_convex && t2.outflow >= -r.flux_tolerance && t2.friction_ok;

  auto& t3 = r.theorem3;
  t3.data_symmetric = t3.data_asymmetry.has_value() && *t3.data_asymmetry < r.symmetry_tolerance;
  t3.verdict = r.compatible && t3.admissible && t3.data_symmetric;

  auto& t4 = r.theorem4;
  t4.verdict = r.compatible && t4.evaluable && t4.lhs < t4.rhs;
}

AuditReport audit(const DomainSpec& dom, const ProblemData& data, std::shared_ptr<const Mesh> mesh,
                  const AuditOptions& opt) {
  data.validate(dom);
  AuditReport rep;
  rep.nu = data.nu;
  rep.margin_tolerance = opt.margin_tolerance;
  rep.convexity_tolerance = opt.convexity_tolerance;
  rep.flux_tolerance = opt.flux_tolerance;
  rep.symmetry_tolerance = opt.symmetry_tolerance;
  rep.fluxes = data.fluxes(dom);

  const int nc = dom.num_components();
  const bool beta_nonzero = !data.beta_vanishes(dom);

  auto& t1 = rep.theorem1;
  t1.beta_nonzero = beta_nonzero;
  t1.margin = std::numeric_limits<double>::infinity();
  for (int j = 0; j < nc; ++j) {
    double m = std::numeric_limits<double>::infinity();
    for_each_frame(dom, j, [&](const BoundaryFrame& f) { m = std::min(m, data.beta[j](f) / data.nu + 2.0 * f.kappa); });
    t1.component_margin.push_back(m);
    t1.margin = std::min(t1.margin, m);
  }

  const SymmetryInfo sym = classify_symmetry(dom);
  auto& t2 = rep.theorem2;
  t2.single_hole = dom.num_holes() == 1;
  t2.hole_min_curvature = std::numeric_limits<double>::quiet_NaN();
  if (t2.single_hole) {
    double k = std::numeric_limits<double>::infinity();
    for_each_frame(dom, 1, [&](const BoundaryFrame& f) { k = std::min(k, f.kappa); });
    t2.hole_min_curvature = k;
  }
  t2.outflow = rep.fluxes[0];
  t2.circular = sym.circular_center.has_value();
  t2.beta_nonzero = beta_nonzero;

  auto& t3 = rep.theorem3;
  t3.admissible = sym.admissible_x1;
  if (t3.admissible) {
    if (mesh) {
      try {
        t3.data_asymmetry = data_asymmetry(*mesh, data);
      } catch (const Error& e) {
        rep.notes.push_back("theorem3: data symmetry not evaluable: " + e.message());
      }
    } else if (data.force.is_zero()) {
      // Boundary data only; any mesh over the domain would do, none is needed.
      Mesh empty(dom);
      t3.data_asymmetry = data_asymmetry(empty, data);
    } else {
      rep.notes.push_back("theorem3: force symmetry needs a mesh");
    }
  }

  auto& t4 = rep.theorem4;
  t4.q = opt.q;
  t4.r = 2.0 * opt.q / (opt.q - 2.0);
  t4.rigor =
      "non-rigorous: K and C_r are discrete lower bounds of the continuum constants, so LHS is underestimated "
      "and RHS overestimated; a true verdict may be optimistic";
  if (!(opt.q > 2.0) || !std::isfinite(opt.q)) {
    t4.status = "not evaluable: q must satisfy 2 < q < infinity";
  } else if (t2.circular && !beta_nonzero) {
    t4.status = "not evaluable: circularly symmetric domain with beta identically zero";
  } else if (!opt.constants) {
    t4.status = "not evaluable: constants disabled";
  } else if (!mesh) {
    t4.status = "not evaluable: no mesh";
  } else {
    std::vector<BoundaryScalar> weight;
    for (int j = 0; j < nc; ++j) {
      const BoundaryScalar b = data.beta[j];
      const double nu = data.nu;
      weight.push_back([b, nu](const BoundaryFrame& f) { return 2.0 * b(f) / nu; });
    }
    const KornResult korn = korn_constant(*mesh, weight);
    const SobolevResult sob = sobolev_constant(*mesh, t4.r);
    t4.K = korn.K;
    t4.C_r = sob.C;
    if (dom.num_holes() > 0) {
      const HarmonicBasis basis = harmonic_basis(mesh);
      const VectorXd c = harmonic_coefficients(basis, hole_fluxes(dom, data.a_star));
      t4.h_norm = harmonic_lq_norm(basis, c, opt.q);
    }
    t4.lhs = std::sqrt(2.0) * t4.C_r * t4.h_norm;
    t4.rhs = 0.5 * data.nu / t4.K;
    t4.evaluable = true;
    t4.status = "evaluated";
    if (sob.stagnated) rep.notes.push_back("theorem4: Sobolev iteration stagnated");
  }

  if (!rep.fluxes.empty()) {
    std::ostringstream s;
    s.precision(17);
    s << "fluxes evaluated with " << dom.quadrature.panels << " panels x " << dom.quadrature.nodes
      << " Gauss points per component";
    rep.notes.push_back(s.str());
  }
  recompute_verdicts(rep);
  return rep;
}

double BernoulliReport::max_deviation() const {
  double d = 0.0;
  for (const auto& c : components) d = std::max(d, c.deviation);
  return d;
}

namespace {

BernoulliReport finish(std::vector<std::vector<std::pair<double, double>>> samples, std::vector<double> fluxes) {
  BernoulliReport rep;
  for (size_t j = 0; j < samples.size(); ++j) {
    BernoulliComponent c;
    c.component = static_cast<int>(j);
    double sw = 0.0, s = 0.0;
    for (auto [phi, w] : samples[j]) {
      s += w * phi;
      sw += w;
    }
    c.mean = sw > 0 ? s / sw : 0.0;
    for (auto [phi, w] : samples[j]) c.deviation = std::max(c.deviation, std::abs(phi - c.mean));
    c.flux = fluxes[j];
    rep.consistency += c.mean * c.flux;
    rep.components.push_back(c);
  }
  return rep;
}

}  // namespace

BernoulliReport bernoulli_audit(const FlowState& flow, const ProblemData* data) {
  const Mesh& m = *flow.mesh;
  const int nc = m.domain().num_components();
  std::vector<std::vector<std::pair<double, double>>> samples(nc);
  std::vector<double> un(nc, 0.0);
  for_each_boundary_point(m, [&](const BoundaryQuadPoint& q) {
    const int tri = q.edge->tri;
    const Vec2 u = flow.velocity_at(tri, q.values);
    const double phi = flow.pressure_at(tri, q.values) + 0.5 * u.squaredNorm();
    samples[q.edge->component].push_back({phi, q.weight});
    un[q.edge->component] += q.weight * u.dot(q.frame.n);
  });
  return finish(std::move(samples), data ? data->fluxes(m.domain()) : un);
}

BernoulliReport bernoulli_audit(const ExactFields& fields, const DomainSpec& dom) {
  const int nc = dom.num_components();
  std::vector<std::vector<std::pair<double, double>>> samples(nc);
  std::vector<double> fluxes(nc, 0.0);
  for (int j = 0; j < nc; ++j) {
    fluxes[j] = boundary_integral(dom, j, [&](const BoundaryFrame& f) {
      const Vec2 u = fields.velocity(f.point);
      return u.dot(f.n);
    });
    // Equal-parameter panels: the arclength weight is the speed.
    const Rule1D& rule = gauss_legendre(dom.quadrature.nodes);
    const int panels = dom.quadrature.panels;
    for (int p = 0; p < panels; ++p)
      for (size_t k = 0; k < rule.x.size(); ++k) {
        const BoundaryFrame f = frame_at(dom, j, (p + rule.x[k]) / panels);
        const Vec2 u = fields.velocity(f.point);
        samples[j].push_back({fields.pressure(f.point) + 0.5 * u.squaredNorm(), rule.w[k] * f.speed / panels});
      }
  }
  return finish(std::move(samples), fluxes);
}

namespace {

// Interior-node restriction of the scalar P2 stiffness.
struct InteriorSpace {
  std::vector<int> index;  // node -> interior index or -1
  int n = 0;
};

InteriorSpace interior_nodes(const Mesh& m) {
  InteriorSpace s;
  s.index.assign(m.num_nodes(), -1);
  for (int i = 0; i < m.num_nodes(); ++i)
    if (!m.is_boundary_node(i)) s.index[i] = s.n++;
  return s;
}

}  // namespace

HeadPressureResidual head_pressure_residual(const FlowState& flow, const ProblemData& data) {
  const Mesh& m = *flow.mesh;
  const double nu = flow.nu;
  VectorXd R = VectorXd::Zero(m.num_nodes());
  // R(phi) = int grad Phi . grad phi + omega^2 phi - (1/nu) Phi u . grad phi - (1/nu) (f . u) phi - f . grad phi
  for_each_volume_point(
      m,
      [&](const Element& el, const PointValues& v, double w) {
        const int tri = el.tri();
        const Vec2 u = flow.velocity_at(tri, v);
        const Mat2 G = flow.gradient_at(tri, v);
        const double Phi = flow.pressure_at(tri, v) + 0.5 * u.squaredNorm();
        const Vec2 gradPhi = flow.pressure_gradient_at(tri, v) + G.transpose() * u;
        const double omega = G(0, 1) - G(1, 0);
        const Vec2 f = data.force.is_zero() ? Vec2::Zero() : data.force.eval(el, v);
        for (int a = 0; a < 6; ++a) {
          const Vec2 dphi = v.dN.row(a).transpose();
          R(el.nodes()[a]) += w * (gradPhi.dot(dphi) + omega * omega * v.N(a) - Phi * u.dot(dphi) / nu -
                                   f.dot(u) * v.N(a) / nu - f.dot(dphi));
        }
      },
      triangle_rule_collapsed(5));

  const InteriorSpace in = interior_nodes(m);
  HeadPressureResidual out;
  out.test_functions = in.n;
  if (in.n == 0) return out;
  const SpMat K = assemble_scalar_stiffness(m);
  std::vector<Eigen::Triplet<double>> trip;
  for (int k = 0; k < K.outerSize(); ++k)
    for (SpMat::InnerIterator it(K, k); it; ++it)
      if (in.index[it.row()] >= 0 && in.index[it.col()] >= 0)
        trip.emplace_back(in.index[it.row()], in.index[it.col()], it.value());
  SpMat KI(in.n, in.n);
  KI.setFromTriplets(trip.begin(), trip.end());
  VectorXd RI(in.n);
  for (int i = 0; i < m.num_nodes(); ++i)
    if (in.index[i] >= 0) RI(in.index[i]) = R(i);
  Eigen::SimplicialLDLT<SpMat> ldlt(KI);
  if (ldlt.info() != Eigen::Success) throw Error(ErrorKind::solver, "interior stiffness factorisation failed");
  out.norm = std::sqrt(std::max(0.0, RI.dot(ldlt.solve(RI))));
  return out;
}

WeingartenResidual weingarten_identity_check(const Mesh& m, const VectorXd& velocity) {
  WeingartenResidual out;
  double sum = 0.0;
  for_each_boundary_point(m, [&](const BoundaryQuadPoint& q) {
    const BoundaryEdge& be = *q.edge;
    const auto& tn = m.tri_nodes[be.tri];
    const int le = be.local_edge;
    const int nodes[3] = {tn[le], tn[3 + le], tn[(le + 1) % 3]};
    double un[3];
    for (int i = 0; i < 3; ++i) {
      const Vec2 u(velocity(2 * nodes[i]), velocity(2 * nodes[i] + 1));
      un[i] = u.dot(m.node_frame[nodes[i]].n);
    }
    // Position along the edge from the reference point.
    const Vec2 t = edge_ref_tangent(le);
    const double s = (q.values.ref - edge_ref_point(le, 0.0)).dot(t) / t.squaredNorm();
    const double dq = un[0] * (4 * s - 3) + un[1] * (4 - 8 * s) + un[2] * (4 * s - 1);
    const Vec2 dx = q.values.J * t;
    const BoundaryFrame& f = q.frame;
    const double dtau = dq / dx.dot(f.tau);

    Mat2 G = Mat2::Zero();
    Vec2 u = Vec2::Zero();
    for (int a = 0; a < 6; ++a) {
      const Vec2 ua(velocity(2 * tn[a]), velocity(2 * tn[a] + 1));
      u += q.values.N(a) * ua;
      G += ua * q.values.dN.row(a);
    }
    const Mat2 S = G + G.transpose();
    const Vec2 Sn = S * f.n;
    const Vec2 lhs = Sn - Sn.dot(f.n) * f.n;
    const double curl = G(0, 1) - G(1, 0);
    const Vec2 rhs = curl * f.tau + 2.0 * dtau * f.tau + 2.0 * f.W.transpose() * u;
    const double r = (lhs - rhs).norm();
    sum += q.weight * r * r;
    out.max = std::max(out.max, r);
  });
  out.l2 = std::sqrt(sum);
  return out;
}

ScalarField stream_function(const FlowState& flow, double flux_tolerance) {
  const Mesh& m = *flow.mesh;
  const int nc = m.domain().num_components();
  std::vector<double> flux(nc, 0.0), scale(nc, 0.0);
  for_each_boundary_point(m, [&](const BoundaryQuadPoint& q) {
    const Vec2 u = flow.velocity_at(q.edge->tri, q.values);
    flux[q.edge->component] += q.weight * u.dot(q.frame.n);
    scale[q.edge->component] += q.weight * u.norm();
  });
  for (int j = 0; j < nc; ++j)
    if (std::abs(flux[j]) > flux_tolerance * std::max(scale[j], 1e-300) && std::abs(flux[j]) > 1e-300) {
      std::ostringstream s;
      s << "net flux " << flux[j] << " through component " << j << " makes the stream function multivalued";
      throw Error(ErrorKind::multivalued_stream, s.str());
    }

  const int n = m.num_nodes();
  SpMat K = assemble_scalar_stiffness(m);
  VectorXd b = VectorXd::Zero(n), mean = VectorXd::Zero(n);
  double area = 0.0;
  for_each_volume_point(m, [&](const Element& el, const PointValues& v, double w) {
    const Vec2 u = flow.velocity_at(el.tri(), v);
    const Vec2 target(-u.y(), u.x());
    for (int a = 0; a < 6; ++a) {
      b(el.nodes()[a]) += w * target.dot(v.dN.row(a).transpose());
      mean(el.nodes()[a]) += w * v.N(a);
    }
    area += w;
  });
  // Pin node 0, then shift to zero mean.
  for (int k = 0; k < K.outerSize(); ++k)
    for (SpMat::InnerIterator it(K, k); it; ++it)
      if (it.row() == 0 || it.col() == 0) it.valueRef() = it.row() == it.col() ? 1.0 : 0.0;
  b(0) = 0.0;
  Eigen::SimplicialLDLT<SpMat> ldlt(K);
  if (ldlt.info() != Eigen::Success) throw Error(ErrorKind::solver, "stream function factorisation failed");
  ScalarField psi{flow.mesh, ldlt.solve(b)};
  psi.values.array() -= mean.dot(psi.values) / area;
  return psi;
}

DiagnosticsFields diagnostics_fields(const FlowState& flow, const ProblemData* data) {
  const Mesh& m = *flow.mesh;
  const int n = m.num_nodes();
  VectorXd om = VectorXd::Zero(n), ph = VectorXd::Zero(n), cnt = VectorXd::Zero(n);
  static const Vec2 ref[6] = {{0, 0}, {1, 0}, {0, 1}, {0.5, 0}, {0.5, 0.5}, {0, 0.5}};
  PointValues v;
  for (int k = 0; k < m.num_triangles(); ++k) {
    const Element el(m, k);
    for (int a = 0; a < 6; ++a) {
      el.eval(ref[a], v);
      const Mat2 G = flow.gradient_at(k, v);
      const int i = el.nodes()[a];
      om(i) += G(0, 1) - G(1, 0);
      ph(i) += flow.pressure_at(k, v) + 0.5 * flow.velocity_at(k, v).squaredNorm();
      cnt(i) += 1.0;
    }
  }
  DiagnosticsFields d;
  d.omega = ScalarField{flow.mesh, om.cwiseQuotient(cnt)};
  d.phi = ScalarField{flow.mesh, ph.cwiseQuotient(cnt)};
  try {
    d.psi = stream_function(flow);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::multivalued_stream) throw;
  }
  d.bernoulli = bernoulli_audit(flow, data);
  return d;
}

}  // namespace slipflow
