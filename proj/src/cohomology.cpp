#include "eddydg/cohomology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace eddydg {

namespace {

using EdgeKey = std::array<int, 2>;

EdgeKey edge_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

std::array<EdgeKey, 3> face_edges(const Mesh::Face& f) {
  const auto& v = f.vertices;
  return {edge_key(v[0], v[1]), edge_key(v[0], v[2]), edge_key(v[1], v[2])};
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

int local_index(const Mesh::Cell& c, int v) {
  for (int i = 0; i < 4; ++i)
    if (c.vertices[i] == v) return i;
  return -1;
}

// Gradients of the barycentric coordinates of a tetrahedron.
std::array<Vec3, 4> barycentric_gradients(const Mesh& mesh, const Mesh::Cell& c) {
  Eigen::Matrix3d J;
  for (int i = 0; i < 3; ++i) J.col(i) = mesh.vertices[c.vertices[i + 1]] - mesh.vertices[c.vertices[0]];
  const Eigen::Matrix3d Jit = J.inverse().transpose();
  std::array<Vec3, 4> g;
  g[1] = Jit.col(0);
  g[2] = Jit.col(1);
  g[3] = Jit.col(2);
  g[0] = -(g[1] + g[2] + g[3]);
  return g;
}

struct Incidence {
  std::set<EdgeKey> gamma_edges;
  std::vector<char> sigma_vertex;
  std::map<EdgeKey, std::vector<int>> edge_faces;  // interior-insulator and Sigma faces
  std::map<EdgeKey, std::vector<int>> edge_cells;  // insulator cells
};

Incidence build_incidence(const Mesh& mesh) {
  Incidence inc;
  inc.sigma_vertex.assign(mesh.vertices.size(), 0);
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& face = mesh.faces[f];
    if (face.kind == FaceKind::Interface)
      for (const auto& e : face_edges(face)) inc.gamma_edges.insert(e);
    if (face.kind == FaceKind::Outer)
      for (int v : face.vertices) inc.sigma_vertex[v] = 1;
    if (face.kind == FaceKind::InteriorInsulator || face.kind == FaceKind::Outer)
      for (const auto& e : face_edges(face)) inc.edge_faces[e].push_back(static_cast<int>(f));
  }
  for (std::size_t k = 0; k < mesh.cells.size(); ++k) {
    const auto& c = mesh.cells[k];
    if (c.region != Region::Insulator) continue;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        inc.edge_cells[edge_key(c.vertices[i], c.vertices[j])].push_back(static_cast<int>(k));
  }
  return inc;
}

// Checks placement and propagates a consistent orientation across manifold
// edges. signs of 0 are filled in; given nonzero signs are checked.
void orient_cut(const Mesh& mesh, const Incidence& inc, CutSurface& cut) {
  std::map<int, int> index;
  for (std::size_t i = 0; i < cut.faces.size(); ++i) {
    const int f = cut.faces[i];
    if (f < 0 || f >= static_cast<int>(mesh.faces.size())) throw CohomologyError("cut face id out of range");
    if (mesh.faces[f].kind != FaceKind::InteriorInsulator)
      throw CohomologyError("cut face " + std::to_string(f) + " is not an interior insulator face");
    for (int v : mesh.faces[f].vertices)
      if (inc.sigma_vertex[v]) throw CohomologyError("cut face " + std::to_string(f) + " touches Sigma");
    if (!index.emplace(f, static_cast<int>(i)).second) throw CohomologyError("duplicate cut face");
  }

  std::map<EdgeKey, std::vector<int>> cut_edges;  // edge -> cut indices
  for (std::size_t i = 0; i < cut.faces.size(); ++i)
    for (const auto& e : face_edges(mesh.faces[cut.faces[i]]))
      if (!inc.gamma_edges.count(e)) cut_edges[e].push_back(static_cast<int>(i));

  auto plus_cell = [&](int i, int sign) {
    const auto& f = mesh.faces[cut.faces[i]];
    return sign > 0 ? f.neighbor : f.owner;
  };

  // For each manifold edge, which side of cut face b matches the plus side of a.
  auto matching_sign = [&](const EdgeKey& e, int a, int sign_a, int b) {
    const auto& cells = inc.edge_cells.at(e);
    std::map<int, int> slot;
    for (std::size_t i = 0; i < cells.size(); ++i) slot[cells[i]] = static_cast<int>(i);
    UnionFind uf(cells.size());
    for (int f : inc.edge_faces.at(e)) {
      const auto& face = mesh.faces[f];
      if (face.kind != FaceKind::InteriorInsulator || index.count(f)) continue;
      uf.unite(slot.at(face.owner), slot.at(face.neighbor));
    }
    const int g = uf.find(slot.at(plus_cell(a, sign_a)));
    const auto& fb = mesh.faces[cut.faces[b]];
    const bool nb = uf.find(slot.at(fb.neighbor)) == g;
    const bool ow = uf.find(slot.at(fb.owner)) == g;
    if (nb == ow) throw CohomologyError("cut is not orientable around an edge");
    return nb ? 1 : -1;
  };

  std::vector<std::vector<std::pair<EdgeKey, int>>> adjacency(cut.faces.size());
  for (const auto& [e, ids] : cut_edges) {
    if (ids.size() == 1) throw CohomologyError("cut has a free edge off Gamma (boundary not on Gamma)");
    if (ids.size() > 2) throw CohomologyError("cut is non-manifold at an interior edge");
    adjacency[ids[0]].push_back({e, ids[1]});
    adjacency[ids[1]].push_back({e, ids[0]});
  }

  std::vector<char> seen(cut.faces.size(), 0);
  int components = 0;
  for (std::size_t start = 0; start < cut.faces.size(); ++start) {
    if (seen[start]) continue;
    ++components;
    if (cut.signs[start] == 0) cut.signs[start] = 1;
    seen[start] = 1;
    std::deque<int> queue{static_cast<int>(start)};
    while (!queue.empty()) {
      const int a = queue.front();
      queue.pop_front();
      for (const auto& [e, b] : adjacency[a]) {
        const int s = matching_sign(e, a, cut.signs[a], b);
        if (cut.signs[b] == 0) {
          cut.signs[b] = s;
        } else if (cut.signs[b] != s) {
          throw CohomologyError("inconsistent crossing orientation on cut face " + std::to_string(cut.faces[b]));
        }
        if (!seen[b]) {
          seen[b] = 1;
          queue.push_back(b);
        }
      }
    }
  }
  if (components > 1) throw CohomologyError("cut has " + std::to_string(components) + " components");
}

void apply_hint(const Mesh& mesh, CutSurface& cut, const EdgeLoop& hint) {
  const HarmonicField field = build_harmonic_field(mesh, cut);
  const double circ = loop_circulation(mesh, field, hint);
  if (std::abs(std::abs(circ) - 1.0) > 1e-10)
    throw CohomologyError("hint loop does not link the cut once (circulation " + std::to_string(circ) + ")");
  if (circ < 0)
    for (int& s : cut.signs) s = -s;
}

}  // namespace

CutSurface build_cut(const Mesh& mesh, const CutOptions& options) {
  CutSurface cut;
  if (options.assert_trivial) return cut;
  const Incidence inc = build_incidence(mesh);

  // Dual graph: insulator cells plus one node for the exterior beyond Sigma.
  const int n_cells = static_cast<int>(mesh.cells.size());
  const int outside = n_cells;
  std::vector<std::vector<std::pair<int, int>>> adj(n_cells + 1);  // (node, face)
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& face = mesh.faces[f];
    if (face.kind == FaceKind::InteriorInsulator) {
      adj[face.owner].push_back({face.neighbor, static_cast<int>(f)});
      adj[face.neighbor].push_back({face.owner, static_cast<int>(f)});
    } else if (face.kind == FaceKind::Outer) {
      adj[face.owner].push_back({outside, static_cast<int>(f)});
      adj[outside].push_back({face.owner, static_cast<int>(f)});
    }
  }
  std::vector<char> reached(n_cells + 1, 0);
  std::vector<char> in_tree(mesh.faces.size(), 0);
  std::deque<int> queue{outside};
  reached[outside] = 1;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (const auto& [v, f] : adj[u]) {
      if (reached[v]) continue;
      reached[v] = 1;
      in_tree[f] = 1;
      queue.push_back(v);
    }
  }
  for (int k = 0; k < n_cells; ++k)
    if (mesh.cells[k].region == Region::Insulator && !reached[k])
      throw CohomologyError("insulator cell " + std::to_string(k) + " is not connected to Sigma");

  // Cotree faces, then erode free edges away from Gamma.
  std::vector<char> in_cut(mesh.faces.size(), 0);
  std::map<EdgeKey, int> count;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto kind = mesh.faces[f].kind;
    if ((kind == FaceKind::InteriorInsulator || kind == FaceKind::Outer) && !in_tree[f]) {
      in_cut[f] = 1;
      for (const auto& e : face_edges(mesh.faces[f])) ++count[e];
    }
  }
  std::deque<EdgeKey> free_edges;
  for (const auto& [e, c] : count)
    if (c == 1 && !inc.gamma_edges.count(e)) free_edges.push_back(e);
  while (!free_edges.empty()) {
    const EdgeKey e = free_edges.front();
    free_edges.pop_front();
    if (count[e] != 1) continue;
    int face = -1;
    for (int f : inc.edge_faces.at(e))
      if (in_cut[f]) face = f;
    in_cut[face] = 0;
    for (const auto& e2 : face_edges(mesh.faces[face]))
      if (--count[e2] == 1 && !inc.gamma_edges.count(e2)) free_edges.push_back(e2);
  }

  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    if (!in_cut[f]) continue;
    if (mesh.faces[f].kind == FaceKind::Outer)
      throw CohomologyError("no cut found: the remaining surface reaches Sigma (topology not a single torus)");
    cut.faces.push_back(static_cast<int>(f));
  }
  if (cut.faces.empty()) return cut;
  cut.signs.assign(cut.faces.size(), 0);
  cut.provenance = CutProvenance::SpanningTree;
  orient_cut(mesh, inc, cut);
  if (options.hint) apply_hint(mesh, cut, *options.hint);
  return cut;
}

CutSurface make_user_cut(const Mesh& mesh, std::vector<std::pair<int, int>> faces_and_signs,
                         const std::optional<EdgeLoop>& hint) {
  std::sort(faces_and_signs.begin(), faces_and_signs.end());
  CutSurface cut;
  for (const auto& [f, s] : faces_and_signs) {
    if (s != 1 && s != -1) throw CohomologyError("cut sign must be +1 or -1");
    cut.faces.push_back(f);
    cut.signs.push_back(s);
  }
  cut.provenance = cut.faces.empty() ? CutProvenance::Empty : CutProvenance::UserSupplied;
  if (cut.empty()) return cut;
  const Incidence inc = build_incidence(mesh);
  orient_cut(mesh, inc, cut);
  if (hint) apply_hint(mesh, cut, *hint);
  return cut;
}

HarmonicField build_harmonic_field(const Mesh& mesh, const CutSurface& cut) {
  HarmonicField field;
  field.cut = cut;
  const std::size_t n_cells = mesh.cells.size();
  field.rho.assign(n_cells, Vec3::Zero());
  field.potential.assign(n_cells, {0.0, 0.0, 0.0, 0.0});
  if (cut.empty()) return field;
  if (cut.signs.size() != cut.faces.size()) throw CohomologyError("cut signs missing");

  std::vector<char> is_cut(mesh.faces.size(), 0);
  for (int f : cut.faces) is_cut[f] = 1;

  // One potential value per (cell, local vertex), glued across non-cut faces.
  UnionFind uf(4 * n_cells);
  for (const auto& face : mesh.faces) {
    if (face.kind != FaceKind::InteriorInsulator) continue;
    if (is_cut[&face - mesh.faces.data()]) continue;
    const auto& a = mesh.cells[face.owner];
    const auto& b = mesh.cells[face.neighbor];
    for (int v : face.vertices) uf.unite(4 * face.owner + local_index(a, v), 4 * face.neighbor + local_index(b, v));
  }

  std::map<int, std::vector<std::pair<int, int>>> constraints;  // group -> (group, value difference)
  for (std::size_t i = 0; i < cut.faces.size(); ++i) {
    const auto& face = mesh.faces[cut.faces[i]];
    const int s = cut.signs[i];
    for (int v : face.vertices) {
      const int go = uf.find(4 * face.owner + local_index(mesh.cells[face.owner], v));
      const int gn = uf.find(4 * face.neighbor + local_index(mesh.cells[face.neighbor], v));
      if (go == gn) throw CohomologyError("cut does not separate its two sides (non-orientable crossing)");
      constraints[go].push_back({gn, s});
      constraints[gn].push_back({go, -s});
    }
  }

  std::vector<char> sigma_vertex(mesh.vertices.size(), 0);
  for (const auto& face : mesh.faces)
    if (face.kind == FaceKind::Outer)
      for (int v : face.vertices) sigma_vertex[v] = 1;

  std::map<int, int> value;
  for (const auto& [root, unused] : constraints) {
    if (value.count(root)) continue;
    std::vector<int> component{root};
    value[root] = 0;
    for (std::size_t head = 0; head < component.size(); ++head) {
      const int g = component[head];
      for (const auto& [h, d] : constraints[g]) {
        auto it = value.find(h);
        if (it == value.end()) {
          value[h] = value[g] + d;
          component.push_back(h);
        } else if (it->second != value[g] + d) {
          throw CohomologyError("inconsistent cut orientation: potential jumps do not close");
        }
      }
    }
    int lo = 0, hi = 0;
    for (int g : component) {
      lo = std::min(lo, value[g]);
      hi = std::max(hi, value[g]);
    }
    if (hi - lo != 1) throw CohomologyError("cut orientation gives a potential jump other than one");
    for (int g : component) value[g] -= lo;
  }

  for (std::size_t k = 0; k < n_cells; ++k) {
    const auto& c = mesh.cells[k];
    if (c.region != Region::Insulator) continue;
    for (int i = 0; i < 4; ++i) {
      auto it = value.find(uf.find(static_cast<int>(4 * k) + i));
      const double p = it == value.end() ? 0.0 : static_cast<double>(it->second);
      if (p != 0.0 && sigma_vertex[c.vertices[i]]) throw CohomologyError("cut potential does not vanish on Sigma");
      field.potential[k][i] = p;
    }
    const auto g = barycentric_gradients(mesh, c);
    Vec3 r = Vec3::Zero();
    for (int i = 0; i < 4; ++i) r += field.potential[k][i] * g[i];
    field.rho[k] = r;
  }
  return field;
}

double loop_circulation(const Mesh& mesh, const HarmonicField& field, const EdgeLoop& loop) {
  if (loop.empty()) throw CohomologyError("empty hint loop");
  std::set<EdgeKey> gamma_edges;
  std::vector<char> sigma_vertex(mesh.vertices.size(), 0);
  for (const auto& face : mesh.faces) {
    if (face.kind == FaceKind::Interface)
      for (const auto& e : face_edges(face)) gamma_edges.insert(e);
    if (face.kind == FaceKind::Outer)
      for (int v : face.vertices) sigma_vertex[v] = 1;
  }
  std::map<EdgeKey, int> lowest_cell;
  for (std::size_t k = 0; k < mesh.cells.size(); ++k) {
    const auto& c = mesh.cells[k];
    if (c.region != Region::Insulator) continue;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) lowest_cell.emplace(edge_key(c.vertices[i], c.vertices[j]), static_cast<int>(k));
  }

  for (std::size_t i = 0; i < loop.size(); ++i) {
    const auto& e = loop[i];
    const int nv = static_cast<int>(mesh.vertices.size());
    if (e[0] < 0 || e[1] < 0 || e[0] >= nv || e[1] >= nv) throw CohomologyError("hint vertex out of range");
    if (sigma_vertex[e[0]] && sigma_vertex[e[1]]) throw CohomologyError("hint loop has an edge on Sigma");
    if (!gamma_edges.count(edge_key(e[0], e[1]))) throw CohomologyError("hint loop has an edge not on Gamma");
    if (e[1] != loop[(i + 1) % loop.size()][0]) throw CohomologyError("hint loop is not closed");
  }

  double circ = 0.0;
  for (const auto& e : loop) {
    const int k = lowest_cell.at(edge_key(e[0], e[1]));
    circ += field.rho[k].dot(mesh.vertices[e[1]] - mesh.vertices[e[0]]);
  }
  return circ;
}

HarmonicReport validate_harmonic_field(const Mesh& mesh, const HarmonicField& field) {
  HarmonicReport rep;
  // rho is constant per cell, so its elementwise curl vanishes identically.
  rep.curl_residual = 0.0;

  std::vector<char> is_cut(mesh.faces.size(), 0);
  for (int f : field.cut.faces) is_cut[f] = 1;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& face = mesh.faces[f];
    if (face.kind == FaceKind::InteriorInsulator && !is_cut[f]) {
      const Vec3 d = field.rho[face.owner] - field.rho[face.neighbor];
      rep.tangential_residual = std::max(rep.tangential_residual, d.cross(face.normal).norm());
    } else if (face.kind == FaceKind::Outer) {
      rep.sigma_residual = std::max(rep.sigma_residual, field.rho[face.owner].cross(face.normal).norm());
    }
  }
  rep.tangential_ok = rep.tangential_residual <= 1e-12;
  rep.sigma_ok = rep.sigma_residual <= 1e-12;

  if (field.cut.empty()) return rep;
  rep.circulation_applicable = true;

  // Dual path from the plus cell of the first cut face back to its minus
  // cell, avoiding the cut, closed by crossing that face.
  const auto& f0 = mesh.faces[field.cut.faces[0]];
  const int plus = field.cut.signs[0] > 0 ? f0.neighbor : f0.owner;
  const int minus = field.cut.signs[0] > 0 ? f0.owner : f0.neighbor;
  std::vector<std::vector<std::pair<int, int>>> adj(mesh.cells.size());
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& face = mesh.faces[f];
    if (face.kind != FaceKind::InteriorInsulator || is_cut[f]) continue;
    adj[face.owner].push_back({face.neighbor, static_cast<int>(f)});
    adj[face.neighbor].push_back({face.owner, static_cast<int>(f)});
  }
  std::vector<std::pair<int, int>> parent(mesh.cells.size(), {-1, -1});
  std::vector<char> seen(mesh.cells.size(), 0);
  std::deque<int> queue{plus};
  seen[plus] = 1;
  while (!queue.empty() && !seen[minus]) {
    const int u = queue.front();
    queue.pop_front();
    for (const auto& [v, f] : adj[u]) {
      if (seen[v]) continue;
      seen[v] = 1;
      parent[v] = {u, f};
      queue.push_back(v);
    }
  }
  if (!seen[minus]) {
    rep.circulation = 0.0;
    rep.circulation_ok = false;
    return rep;
  }
  auto crossing = [&](int from, int face, int to) {
    const Vec3& cf = mesh.faces[face].centroid;
    return field.rho[from].dot(cf - mesh.cells[from].centroid) + field.rho[to].dot(mesh.cells[to].centroid - cf);
  };
  double circ = 0.0;
  for (int v = minus; v != plus; v = parent[v].first) circ += crossing(parent[v].first, parent[v].second, v);
  circ += crossing(minus, field.cut.faces[0], plus);
  rep.circulation = circ;
  rep.circulation_ok = std::abs(std::abs(circ) - 1.0) <= 1e-10;
  return rep;
}

std::string write_cut(const CutSurface& cut) {
  std::ostringstream out;
  out << "# face_id sign\n";
  for (std::size_t i = 0; i < cut.faces.size(); ++i) out << cut.faces[i] << ' ' << cut.signs[i] << '\n';
  return out.str();
}

CutSurface read_cut(const Mesh& mesh, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::pair<int, int>> entries;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    int f, s;
    if (!(ls >> f)) continue;
    if (!(ls >> s)) throw ParseError("cut file line " + std::to_string(lineno) + ": missing sign");
    entries.emplace_back(f, s);
  }
  return make_user_cut(mesh, std::move(entries));
}

}  // namespace eddydg
