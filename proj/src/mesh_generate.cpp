#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <unordered_map>

#include "slipflow/error.hpp"
#include "slipflow/mesh.hpp"

namespace slipflow {

namespace {

double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  const long double abx = b.x() - a.x(), aby = b.y() - a.y();
  const long double acx = c.x() - a.x(), acy = c.y() - a.y();
  return static_cast<double>(abx * acy - aby * acx);
}

// > 0 if d lies inside the circumcircle of the counterclockwise triangle abc.
double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const long double adx = a.x() - d.x(), ady = a.y() - d.y();
  const long double bdx = b.x() - d.x(), bdy = b.y() - d.y();
  const long double cdx = c.x() - d.x(), cdy = c.y() - d.y();
  const long double ad = adx * adx + ady * ady, bd = bdx * bdx + bdy * bdy, cd = cdx * cdx + cdy * cdy;
  return static_cast<double>(adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx));
}

Vec2 circumcenter(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Vec2 ab = b - a, ac = c - a;
  const double d = 2.0 * cross(ab, ac);
  const double ab2 = ab.squaredNorm(), ac2 = ac.squaredNorm();
  return a + Vec2(ac.y() * ab2 - ab.y() * ac2, ab.x() * ac2 - ac.x() * ab2) / d;
}

// Incremental Bowyer-Watson triangulation with adjacency.
class Triangulation {
 public:
  struct Tri {
    std::array<int, 3> v;
    std::array<int, 3> nb;  // neighbour across edge (v[i], v[i+1])
    bool alive;
  };

  explicit Triangulation(const Vec2& lo, const Vec2& hi) {
    const Vec2 c = 0.5 * (lo + hi);
    const double s = 10.0 * (hi - lo).norm() + 1.0;
    pts.push_back(c + Vec2(-s, -s));
    pts.push_back(c + Vec2(s, -s));
    pts.push_back(c + Vec2(0.0, s));
    tris.push_back({{0, 1, 2}, {-1, -1, -1}, true});
  }

  int insert(const Vec2& p) {
    const int t0 = locate(p);
    const int pi = static_cast<int>(pts.size());
    pts.push_back(p);

    std::vector<int> cavity{t0};
    mark_.resize(tris.size(), 0);
    ++stamp_;
    mark_[t0] = stamp_;
    for (size_t k = 0; k < cavity.size(); ++k) {
      const Tri& t = tris[cavity[k]];
      for (int e = 0; e < 3; ++e) {
        const int n = t.nb[e];
        if (n < 0 || mark_[n] == stamp_) continue;
        const Tri& tn = tris[n];
        if (incircle(pts[tn.v[0]], pts[tn.v[1]], pts[tn.v[2]], p) > 0.0) {
          mark_[n] = stamp_;
          cavity.push_back(n);
        }
      }
    }

    struct Rim {
      int a, b, outside;
    };
    std::vector<Rim> rim;
    for (int c : cavity) {
      const Tri& t = tris[c];
      for (int e = 0; e < 3; ++e) {
        const int n = t.nb[e];
        if (n >= 0 && mark_[n] == stamp_) continue;
        rim.push_back({t.v[e], t.v[(e + 1) % 3], n});
      }
    }
    for (int c : cavity) {
      tris[c].alive = false;
      free_.push_back(c);
    }

    std::unordered_map<int, int> by_start, by_end;
    std::vector<int> fresh;
    for (const Rim& r : rim) {
      int id;
      if (!free_.empty()) {
        id = free_.back();
        free_.pop_back();
        tris[id] = {{r.a, r.b, pi}, {r.outside, -1, -1}, true};
      } else {
        id = static_cast<int>(tris.size());
        tris.push_back({{r.a, r.b, pi}, {r.outside, -1, -1}, true});
      }
      if (r.outside >= 0) {
        Tri& o = tris[r.outside];
        for (int e = 0; e < 3; ++e)
          if (o.v[e] == r.b && o.v[(e + 1) % 3] == r.a) o.nb[e] = id;
      }
      by_start[r.a] = id;
      by_end[r.b] = id;
      fresh.push_back(id);
    }
    for (int id : fresh) {
      Tri& t = tris[id];
      t.nb[1] = by_start.at(t.v[1]);
      t.nb[2] = by_end.at(t.v[0]);
    }
    mark_.resize(tris.size(), 0);
    last_ = fresh.front();
    created.insert(created.end(), fresh.begin(), fresh.end());
    return pi;
  }

  std::vector<Vec2> pts;
  std::vector<Tri> tris;
  std::vector<int> created;

 private:
  bool contains(int t, const Vec2& p) const {
    const Tri& tr = tris[t];
    for (int e = 0; e < 3; ++e)
      if (orient(pts[tr.v[e]], pts[tr.v[(e + 1) % 3]], p) < 0.0) return false;
    return true;
  }

  int locate(const Vec2& p) {
    int t = (last_ >= 0 && tris[last_].alive) ? last_ : -1;
    if (t < 0) {
      for (size_t k = 0; k < tris.size(); ++k)
        if (tris[k].alive) {
          t = static_cast<int>(k);
          break;
        }
    }
    for (size_t step = 0; step < 4 * tris.size() + 16; ++step) {
      const Tri& tr = tris[t];
      int next = -1;
      for (int e = 0; e < 3; ++e) {
        if (orient(pts[tr.v[e]], pts[tr.v[(e + 1) % 3]], p) < 0.0) {
          next = tr.nb[e];
          break;
        }
      }
      if (next < 0) {
        if (contains(t, p)) return t;
        break;
      }
      t = next;
    }
    for (size_t k = 0; k < tris.size(); ++k)
      if (tris[k].alive && contains(static_cast<int>(k), p)) return static_cast<int>(k);
    throw Error(ErrorKind::meshing, "point location failed");
  }

  std::vector<int> free_;
  std::vector<int> mark_;
  int stamp_ = 0;
  int last_ = -1;
};

struct Segment {
  int a, b;
  int curve;  // -1 for the symmetry axis
  double ta, tb;
};

class Refiner {
 public:
  Refiner(const DomainSpec& domain, double h, bool half, const DelaunayOptions& opt)
      : dom_(domain), h_(h), half_(half), opt_(opt),
        tri_(domain.curve(0).center() - Vec2::Constant(domain.curve(0).radius()),
             domain.curve(0).center() + Vec2::Constant(domain.curve(0).radius())) {}

  void run() {
    seed_boundary();
    seed_interior();
    enforce_segments();
    improve_quality();
  }

  Mesh finish() const;

 private:
  int add_point(const Vec2& p, int comp, double t) {
    if (static_cast<int>(tri_.pts.size()) >= opt_.max_points)
      throw Error(ErrorKind::meshing, "point budget exceeded during refinement");
    const int id = tri_.insert(p);
    comp_.resize(id + 1, -1);
    param_.resize(id + 1, 0.0);
    comp_[id] = comp;
    param_[id] = t;
    return id;
  }

  bool in_region(const Vec2& x) const {
    const Curve& c0 = dom_.curve(0);
    if ((x - c0.center()).norm() >= c0.radius()) return false;
    for (int j = 1; j < dom_.num_components(); ++j) {
      const Curve& c = dom_.curve(j);
      if ((x - c.center()).norm() <= c.radius()) return false;
    }
    return !half_ || x.y() > 0.0;
  }

  double distance_to_boundary(const Vec2& x) const {
    double d = std::numeric_limits<double>::max();
    for (const Curve& c : dom_.curves()) d = std::min(d, std::abs((x - c.center()).norm() - c.radius()));
    if (half_) d = std::min(d, std::abs(x.y()));
    return d;
  }

  Vec2 snap_axis(Vec2 p) const {
    if (half_ && std::abs(p.y()) < 1e-12 * dom_.diameter()) p.y() = 0.0;
    return p;
  }

  void seed_boundary() {
    std::vector<std::pair<double, int>> axis_points;  // x coordinate, point id
    for (int j = 0; j < dom_.num_components(); ++j) {
      const Curve& c = dom_.curve(j);
      int n = std::max(8, static_cast<int>(std::ceil(2.0 * std::numbers::pi * c.radius() / h_)));
      if (n % 2) ++n;
      std::vector<int> id(n, -1);
      for (int k = 0; k < n; ++k) {
        const double t = double(k) / n;
        const Vec2 p = snap_axis(c.point(t));
        if (half_ && p.y() < 0.0) continue;
        id[k] = add_point(p, j, t);
        if (half_ && p.y() == 0.0) axis_points.emplace_back(p.x(), id[k]);
      }
      for (int k = 0; k < n; ++k) {
        const int a = id[k], b = id[(k + 1) % n];
        if (a < 0 || b < 0) continue;
        const double ta = double(k) / n, tb = double(k + 1) / n;
        if (half_ && c.point(0.5 * (ta + tb)).y() <= 0.0) continue;
        segs_.push_back({a, b, j, ta, tb});
      }
    }
    if (!half_) return;
    std::sort(axis_points.begin(), axis_points.end());
    for (size_t k = 0; k + 1 < axis_points.size(); ++k) {
      const double xa = axis_points[k].first, xb = axis_points[k + 1].first;
      if (!dom_.contains(Vec2(0.5 * (xa + xb), 0.0))) continue;
      const int m = std::max(1, static_cast<int>(std::ceil((xb - xa) / h_)));
      int prev = axis_points[k].second;
      for (int i = 1; i <= m; ++i) {
        const int cur = i == m ? axis_points[k + 1].second : add_point(Vec2(xa + (xb - xa) * i / m, 0.0), -1, 0.0);
        segs_.push_back({prev, cur, -1, 0.0, 0.0});
        prev = cur;
      }
    }
  }

  void seed_interior() {
    const Curve& c0 = dom_.curve(0);
    const double dy = h_ * std::sqrt(3.0) / 2.0;
    const int nx = static_cast<int>(std::ceil(c0.radius() / h_)) + 1;
    const int ny = static_cast<int>(std::ceil(c0.radius() / dy)) + 1;
    for (int j = -ny; j <= ny; ++j) {
      for (int i = -nx; i <= nx; ++i) {
        const Vec2 p = c0.center() + Vec2((i + 0.5 * (j & 1)) * h_, (j + 0.5) * dy);
        if (!in_region(p)) continue;
        if (distance_to_boundary(p) < 0.7 * h_) continue;
        add_point(p, -1, 0.0);
      }
    }
  }

  bool encroaches(const Segment& s, const Vec2& p) const {
    const Vec2& a = tri_.pts[s.a];
    const Vec2& b = tri_.pts[s.b];
    return (p - a).dot(p - b) < 0.0;
  }

  // Splits segment k at its curve (or axis) midpoint.
  void split(int k) {
    const Segment s = segs_[k];
    Vec2 p;
    double tm = 0.0;
    if (s.curve >= 0) {
      tm = 0.5 * (s.ta + s.tb);
      p = snap_axis(dom_.curve(s.curve).point(tm));
    } else {
      p = 0.5 * (tri_.pts[s.a] + tri_.pts[s.b]);
    }
    const int id = add_point(p, s.curve, tm);
    segs_[k] = {s.a, id, s.curve, s.ta, tm};
    segs_.push_back({id, s.b, s.curve, tm, s.tb});
  }

  void enforce_segments() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (size_t k = 0; k < segs_.size(); ++k) {
        for (size_t i = 3; i < tri_.pts.size(); ++i) {
          if (static_cast<int>(i) == segs_[k].a || static_cast<int>(i) == segs_[k].b) continue;
          if (encroaches(segs_[k], tri_.pts[i])) {
            split(static_cast<int>(k));
            changed = true;
            break;
          }
        }
      }
    }
  }

  bool is_bad(const Triangulation::Tri& t) const {
    const Vec2& a = tri_.pts[t.v[0]];
    const Vec2& b = tri_.pts[t.v[1]];
    const Vec2& c = tri_.pts[t.v[2]];
    const double la = (b - c).squaredNorm(), lb = (c - a).squaredNorm(), lc = (a - b).squaredNorm();
    const double area2 = std::abs(cross(b - a, c - a));
    // sin of the smallest angle = area2 / (product of the two longest edges)
    const double shortest = std::min({la, lb, lc});
    const double prod = std::sqrt(la * lb * lc / shortest);
    const double sin_min = area2 / prod;
    const double r = std::sqrt(la * lb * lc) / (2.0 * area2);
    return sin_min < std::sin(opt_.min_angle_degrees * std::numbers::pi / 180.0) || r > h_;
  }

  void improve_quality() {
    std::deque<int> work(tri_.created.begin(), tri_.created.end());
    tri_.created.clear();
    while (!work.empty()) {
      const int id = work.front();
      work.pop_front();
      const auto& t = tri_.tris[id];
      if (!t.alive || t.v[0] < 3 || t.v[1] < 3 || t.v[2] < 3) continue;
      const Vec2 g = (tri_.pts[t.v[0]] + tri_.pts[t.v[1]] + tri_.pts[t.v[2]]) / 3.0;
      if (!in_region(g) || !is_bad(t)) continue;
      const Vec2 cc = circumcenter(tri_.pts[t.v[0]], tri_.pts[t.v[1]], tri_.pts[t.v[2]]);
      std::vector<int> hit;
      for (size_t k = 0; k < segs_.size(); ++k)
        if (encroaches(segs_[k], cc)) hit.push_back(static_cast<int>(k));
      if (!hit.empty()) {
        for (int k : hit) split(k);
      } else if (in_region(cc)) {
        const int pid = add_point(cc, -1, 0.0);
        for (size_t k = 0; k < segs_.size(); ++k)
          if (encroaches(segs_[k], tri_.pts[pid])) split(static_cast<int>(k));
      } else {
        continue;
      }
      enforce_new_segments();
      work.insert(work.end(), tri_.created.begin(), tri_.created.end());
      tri_.created.clear();
      work.push_back(id);
    }
  }

  // Segments produced by splits may be encroached by existing points.
  void enforce_new_segments() {
    for (size_t k = checked_; k < segs_.size(); ++k) {
      const Vec2 mid = 0.5 * (tri_.pts[segs_[k].a] + tri_.pts[segs_[k].b]);
      const double r2 = 0.25 * (tri_.pts[segs_[k].a] - tri_.pts[segs_[k].b]).squaredNorm();
      for (size_t i = 3; i < tri_.pts.size(); ++i) {
        if (static_cast<int>(i) == segs_[k].a || static_cast<int>(i) == segs_[k].b) continue;
        if ((tri_.pts[i] - mid).squaredNorm() < r2 && encroaches(segs_[k], tri_.pts[i])) {
          split(static_cast<int>(k));
          break;
        }
      }
    }
    checked_ = segs_.size();
  }

  const DomainSpec& dom_;
  double h_;
  bool half_;
  DelaunayOptions opt_;
  Triangulation tri_;
  std::vector<int> comp_{-1, -1, -1};
  std::vector<double> param_{0.0, 0.0, 0.0};
  std::vector<Segment> segs_;
  size_t checked_ = 0;
};

Mesh Refiner::finish() const {
  std::vector<int> remap(tri_.pts.size(), -1);
  std::vector<Vec2> v;
  std::vector<int> comp;
  std::vector<double> param;
  std::vector<std::array<int, 3>> tris;
  auto use = [&](int p) {
    if (remap[p] < 0) {
      remap[p] = static_cast<int>(v.size());
      v.push_back(tri_.pts[p]);
      comp.push_back(comp_[p]);
      double t = param_[p];
      t -= std::floor(t);
      param.push_back(t >= 1.0 ? 0.0 : t);
    }
    return remap[p];
  };
  for (const auto& t : tri_.tris) {
    if (!t.alive || t.v[0] < 3 || t.v[1] < 3 || t.v[2] < 3) continue;
    const Vec2 g = (tri_.pts[t.v[0]] + tri_.pts[t.v[1]] + tri_.pts[t.v[2]]) / 3.0;
    if (!in_region(g)) continue;
    tris.push_back({use(t.v[0]), use(t.v[1]), use(t.v[2])});
  }
  if (half_) {
    const int n = static_cast<int>(v.size());
    std::vector<int> mirror(n);
    for (int i = 0; i < n; ++i) {
      if (v[i].y() == 0.0) {
        mirror[i] = i;
        continue;
      }
      mirror[i] = static_cast<int>(v.size());
      v.emplace_back(v[i].x(), -v[i].y());
      comp.push_back(comp[i]);
      const double t = 1.0 - param[i];
      param.push_back(t >= 1.0 ? 0.0 : t);
    }
    const size_t nt = tris.size();
    for (size_t k = 0; k < nt; ++k) {
      const auto& t = tris[k];
      tris.push_back({mirror[t[0]], mirror[t[2]], mirror[t[1]]});
    }
  }
  return build_mesh(dom_, std::move(v), std::move(tris), comp, param, ErrorKind::meshing);
}

}  // namespace

Mesh mesh_disk_with_holes(const DomainSpec& domain, double target_h, const DelaunayOptions& options) {
  for (const Curve& c : domain.curves())
    if (c.kind() != Curve::Kind::circle)
      throw Error(ErrorKind::meshing, "the built-in generator supports circles only; import other meshes");
  if (!(target_h > 0.0)) throw Error(ErrorKind::configuration, "target_h must be positive");
  const int nc = domain.num_components();
  const Curve& outer = domain.curve(0);
  for (int j = 1; j < nc; ++j) {
    const Curve& cj = domain.curve(j);
    const double gap = outer.radius() - (cj.center() - outer.center()).norm() - cj.radius();
    if (gap < 3.0 * target_h)
      throw Error(ErrorKind::meshing, "hole " + domain.label(j) + " is too close to the outer boundary for target_h");
    for (int k = j + 1; k < nc; ++k) {
      const Curve& ck = domain.curve(k);
      const double g = (cj.center() - ck.center()).norm() - cj.radius() - ck.radius();
      if (g < 3.0 * target_h)
        throw Error(ErrorKind::meshing, "holes " + domain.label(j) + " and " + domain.label(k) + " are too close for target_h");
    }
    if (cj.radius() < target_h)
      throw Error(ErrorKind::meshing, "hole " + domain.label(j) + " is smaller than target_h");
  }
  const bool half = classify_symmetry(domain).admissible_x1;
  Refiner r(domain, target_h, half, options);
  r.run();
  return r.finish();
}

}  // namespace slipflow
