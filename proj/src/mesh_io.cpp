#include <algorithm>
#include <cstdio>
#include <map>
#include <fstream>
#include <sstream>

#include "slipflow/error.hpp"
#include "slipflow/mesh.hpp"

namespace slipflow {

namespace {

// Next non-empty line with comments ('#') stripped.
bool next_line(std::istream& in, std::istringstream& line) {
  std::string s;
  while (std::getline(in, s)) {
    const auto hash = s.find('#');
    if (hash != std::string::npos) s.erase(hash);
    if (s.find_first_not_of(" \t\r") == std::string::npos) continue;
    line.clear();
    line.str(s);
    return true;
  }
  return false;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path);
  return out;
}

}  // namespace

void export_mesh(const Mesh& mesh, const std::string& base) {
  {
    auto out = open_out(base + ".node");
    out << mesh.num_vertices() << " 2 0 1\n";
    for (int i = 0; i < mesh.num_vertices(); ++i) {
      out << i + 1 << ' ' << fmt(mesh.vertices[i].x()) << ' ' << fmt(mesh.vertices[i].y()) << ' '
          << mesh.node_component[i] + 1 << '\n';
    }
  }
  {
    auto out = open_out(base + ".ele");
    out << mesh.num_triangles() << " 3 0\n";
    for (int k = 0; k < mesh.num_triangles(); ++k) {
      const auto& t = mesh.triangles[k];
      out << k + 1 << ' ' << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
    }
  }
  {
    auto out = open_out(base + ".bnd");
    out << mesh.boundary_edges.size() << " 1\n";
    int i = 0;
    for (const auto& be : mesh.boundary_edges) {
      out << ++i << ' ' << be.v0 + 1 << ' ' << be.v1 + 1 << ' ' << be.component << '\n';
    }
  }
}

Mesh import_mesh(const std::string& node_file, const std::string& ele_file, const DomainSpec& domain,
                 const std::string& bnd_file) {
  std::ifstream nin(node_file);
  if (!nin) throw Error(ErrorKind::io, "cannot read " + node_file);
  std::istringstream line;
  if (!next_line(nin, line)) throw Error(ErrorKind::import, node_file + ": missing header");
  int nv = 0, dim = 0, nattr = 0, nmark = 0;
  line >> nv >> dim >> nattr >> nmark;
  if (!line || dim != 2 || nv <= 0) throw Error(ErrorKind::import, node_file + ": bad header");
  std::vector<Vec2> v(nv);
  std::vector<int> marker(nv, -1);
  int base = -1;
  for (int i = 0; i < nv; ++i) {
    if (!next_line(nin, line)) throw Error(ErrorKind::import, node_file + ": truncated");
    int idx;
    double x, y;
    line >> idx >> x >> y;
    if (!line) throw Error(ErrorKind::import, node_file + ": bad vertex line " + std::to_string(i + 1));
    if (base < 0) base = idx;
    if (idx - base != i) throw Error(ErrorKind::import, node_file + ": vertex indices are not consecutive");
    for (int a = 0; a < nattr; ++a) {
      double dummy;
      line >> dummy;
    }
    if (nmark > 0) line >> marker[i];
    v[i] = Vec2(x, y);
  }

  std::ifstream ein(ele_file);
  if (!ein) throw Error(ErrorKind::io, "cannot read " + ele_file);
  if (!next_line(ein, line)) throw Error(ErrorKind::import, ele_file + ": missing header");
  int nt = 0, npt = 0;
  line >> nt >> npt;
  if (!line || npt != 3 || nt <= 0) throw Error(ErrorKind::import, ele_file + ": expected linear triangles");
  std::vector<std::array<int, 3>> tris(nt);
  for (int k = 0; k < nt; ++k) {
    if (!next_line(ein, line)) throw Error(ErrorKind::import, ele_file + ": truncated");
    int idx, a, b, c;
    line >> idx >> a >> b >> c;
    if (!line) throw Error(ErrorKind::import, ele_file + ": bad triangle line " + std::to_string(k + 1));
    tris[k] = {a - base, b - base, c - base};
    for (int vi : tris[k])
      if (vi < 0 || vi >= nv) throw Error(ErrorKind::import, "triangle " + std::to_string(k + 1) + " references a missing vertex");
  }

  // Topological boundary: edges owned by exactly one triangle.
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : tris)
    for (int e = 0; e < 3; ++e) ++count[{std::min(t[e], t[(e + 1) % 3]), std::max(t[e], t[(e + 1) % 3])}];

  std::vector<int> comp(nv, -1);
  std::vector<double> param(nv, 0.0);
  const int nc = domain.num_components();
  for (const auto& [edge, c] : count) {
    if (c > 2) throw Error(ErrorKind::import, "non-conforming mesh: edge shared by more than two triangles");
    if (c != 1) continue;
    const Vec2 a = v[edge.first], b = v[edge.second];
    const double len = (b - a).norm();
    int best = -1;
    double best_d = 1e300;
    for (int j = 0; j < nc; ++j) {
      double da, db, dm;
      domain.curve(j).project(a, &da);
      domain.curve(j).project(b, &db);
      domain.curve(j).project(0.5 * (a + b), &dm);
      const double d = std::max({da, db, dm});
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    if (best_d >= 0.1 * len)
      throw Error(ErrorKind::import, "boundary edge (" + std::to_string(edge.first + base) + "," +
                                         std::to_string(edge.second + base) + ") does not match any domain curve");
    for (int vi : {edge.first, edge.second}) {
      if (comp[vi] >= 0 && comp[vi] != best)
        throw Error(ErrorKind::import, "vertex " + std::to_string(vi + base) + " matched to two curves");
      comp[vi] = best;
      if (marker[vi] > 0 && marker[vi] - 1 != best)
        throw Error(ErrorKind::import, "vertex " + std::to_string(vi + base) + " marker disagrees with the matched curve");
    }
  }
  for (int i = 0; i < nv; ++i)
    if (comp[i] >= 0) param[i] = domain.curve(comp[i]).project(v[i]);

  if (!bnd_file.empty()) {
    std::ifstream bin(bnd_file);
    if (!bin) throw Error(ErrorKind::io, "cannot read " + bnd_file);
    if (!next_line(bin, line)) throw Error(ErrorKind::import, bnd_file + ": missing header");
    int nb = 0;
    line >> nb;
    for (int i = 0; i < nb; ++i) {
      if (!next_line(bin, line)) throw Error(ErrorKind::import, bnd_file + ": truncated");
      int idx, a, b, c;
      line >> idx >> a >> b >> c;
      if (!line) throw Error(ErrorKind::import, bnd_file + ": bad edge line");
      a -= base;
      b -= base;
      if (a < 0 || a >= nv || b < 0 || b >= nv || comp[a] != c || comp[b] != c)
        throw Error(ErrorKind::import, "boundary edge " + std::to_string(idx) + " tag disagrees with the geometry");
    }
  }

  return build_mesh(domain, std::move(v), std::move(tris), comp, param, ErrorKind::import);
}

}  // namespace slipflow
