#include "eddydg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace eddydg {

const char* to_string(FaceKind kind) {
  switch (kind) {
    case FaceKind::InteriorConductor: return "interior-conductor";
    case FaceKind::InteriorInsulator: return "interior-insulator";
    case FaceKind::Interface: return "interface";
    case FaceKind::Outer: return "outer";
    case FaceKind::ConductorBoundary: return "conductor-boundary";
  }
  return "?";
}

const char* to_string(Region region) {
  return region == Region::Conductor ? "conductor" : "insulator";
}

double tet_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return (b - a).dot((c - a).cross(d - a)) / 6.0;
}

namespace {

double max_pair_distance(std::initializer_list<Vec3> pts) {
  double h = 0.0;
  for (auto i = pts.begin(); i != pts.end(); ++i)
    for (auto j = std::next(i); j != pts.end(); ++j) h = std::max(h, (*i - *j).norm());
  return h;
}

// Local face i of a tet is opposite local vertex i.
constexpr std::array<std::array<int, 3>, 4> kLocalFaces{{{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}}};

}  // namespace

void Mesh::build_topology(bool allow_conductor_boundary) {
  faces.clear();
  interface_edges.clear();
  dangling_interface_edges.clear();
  warnings.clear();

  // Cell geometry.
  for (std::size_t k = 0; k < cells.size(); ++k) {
    auto& c = cells[k];
    const Vec3& a = vertices[c.vertices[0]];
    const Vec3& b = vertices[c.vertices[1]];
    const Vec3& d = vertices[c.vertices[2]];
    const Vec3& e = vertices[c.vertices[3]];
    c.diameter = max_pair_distance({a, b, d, e});
    const double vol = std::abs(tet_volume(a, b, d, e));
    if (!(vol > 1e-14 * c.diameter * c.diameter * c.diameter))
      throw GeometryError("degenerate tetrahedron " + std::to_string(k));
    c.volume = vol;
    c.centroid = (a + b + d + e) / 4.0;
    for (int i = 0; i < 4; ++i) {
      const auto& lf = kLocalFaces[i];
      const Vec3& p0 = vertices[c.vertices[lf[0]]];
      const Vec3& p1 = vertices[c.vertices[lf[1]]];
      const Vec3& p2 = vertices[c.vertices[lf[2]]];
      Vec3 n = (p1 - p0).cross(p2 - p0).normalized();
      if (n.dot(vertices[c.vertices[i]] - p0) > 0) n = -n;
      c.normals[i] = n;
    }
  }

  // Faces keyed by sorted vertex triple; std::map gives the sorted order.
  std::map<std::array<int, 3>, std::vector<std::pair<int, int>>> face_map;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    for (int i = 0; i < 4; ++i) {
      std::array<int, 3> key;
      for (int j = 0; j < 3; ++j) key[j] = cells[k].vertices[kLocalFaces[i][j]];
      std::sort(key.begin(), key.end());
      face_map[key].emplace_back(static_cast<int>(k), i);
    }
  }

  faces.reserve(face_map.size());
  for (const auto& [key, adj] : face_map) {
    if (adj.size() > 2) throw TopologyError("face shared by more than two cells (non-conforming mesh)");
    Face f;
    f.vertices = key;
    const Vec3& p0 = vertices[key[0]];
    const Vec3& p1 = vertices[key[1]];
    const Vec3& p2 = vertices[key[2]];
    f.diameter = max_pair_distance({p0, p1, p2});
    f.area = 0.5 * (p1 - p0).cross(p2 - p0).norm();
    f.centroid = (p0 + p1 + p2) / 3.0;

    auto [c0, l0] = adj[0];
    if (adj.size() == 1) {
      f.owner = c0;
      f.owner_local = l0;
      if (cells[c0].region == Region::Conductor) {
        if (!allow_conductor_boundary)
          throw TopologyError("conductor cell " + std::to_string(c0) +
                              " has a face on the outer boundary (closure of Omega_C must lie inside D)");
        f.kind = FaceKind::ConductorBoundary;
      } else {
        f.kind = FaceKind::Outer;
      }
    } else {
      auto [c1, l1] = adj[1];
      const Region r0 = cells[c0].region;
      const Region r1 = cells[c1].region;
      if (r0 == r1) {
        if (c1 < c0) {
          std::swap(c0, c1);
          std::swap(l0, l1);
        }
        f.kind = r0 == Region::Conductor ? FaceKind::InteriorConductor : FaceKind::InteriorInsulator;
      } else {
        if (r0 == Region::Insulator) {
          std::swap(c0, c1);
          std::swap(l0, l1);
        }
        f.kind = FaceKind::Interface;
      }
      f.owner = c0;
      f.owner_local = l0;
      f.neighbor = c1;
      f.neighbor_local = l1;
    }
    f.normal = cells[f.owner].normals[f.owner_local];
    const int id = static_cast<int>(faces.size());
    cells[f.owner].faces[f.owner_local] = id;
    if (f.neighbor >= 0) cells[f.neighbor].faces[f.neighbor_local] = id;
    faces.push_back(f);
  }

  // Interface edges: edges shared by exactly two Gamma triangles.
  std::map<std::array<int, 2>, std::vector<int>> edge_map;
  for (std::size_t fi = 0; fi < faces.size(); ++fi) {
    if (faces[fi].kind != FaceKind::Interface) continue;
    const auto& v = faces[fi].vertices;
    for (auto [a, b] : {std::pair{v[0], v[1]}, std::pair{v[0], v[2]}, std::pair{v[1], v[2]}})
      edge_map[{a, b}].push_back(static_cast<int>(fi));
  }
  for (const auto& [key, tris] : edge_map) {
    if (tris.size() == 1) {
      dangling_interface_edges.push_back(key);
      continue;
    }
    if (tris.size() != 2)
      throw TopologyError("interface edge (" + std::to_string(key[0]) + "," + std::to_string(key[1]) +
                          ") is shared by " + std::to_string(tris.size()) + " Gamma triangles");
    InterfaceEdge e;
    e.vertices = key;
    e.triangles = {tris[0], tris[1]};
    const Vec3& a = vertices[key[0]];
    const Vec3& b = vertices[key[1]];
    e.length = (b - a).norm();
    const Vec3 dir = (b - a) / e.length;
    for (int s = 0; s < 2; ++s) {
      const Face& t = faces[tris[s]];
      int third = -1;
      for (int v : t.vertices)
        if (v != key[0] && v != key[1]) third = v;
      // In-plane outward normal of T along e.
      Vec3 w = vertices[third] - a;
      Vec3 nu = (w - w.dot(dir) * dir);
      nu = -nu.normalized();
      e.tangents[s] = t.normal.cross(nu).normalized();
    }
    interface_edges.push_back(e);
  }
  if (!dangling_interface_edges.empty()) {
    warnings.push_back(std::to_string(dangling_interface_edges.size()) +
                       " interface edge(s) touch a single Gamma triangle; excluded from E_h");
  }
}

double Mesh::mesh_size() const {
  double h = 0.0;
  for (const auto& c : cells) h = std::max(h, c.diameter);
  return h;
}

std::size_t Mesh::count_cells(Region region) const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [&](const Cell& c) { return c.region == region; }));
}

std::vector<int> EntitySummary::conductor_faces() const {
  std::vector<int> out = interior_conductor;
  out.insert(out.end(), interface.begin(), interface.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> EntitySummary::insulator_faces() const {
  std::vector<int> out = interior_insulator;
  out.insert(out.end(), outer.begin(), outer.end());
  std::sort(out.begin(), out.end());
  return out;
}

EntitySummary classify_entities(const Mesh& mesh) {
  EntitySummary s;
  for (std::size_t i = 0; i < mesh.faces.size(); ++i) {
    const int id = static_cast<int>(i);
    switch (mesh.faces[i].kind) {
      case FaceKind::InteriorConductor: s.interior_conductor.push_back(id); break;
      case FaceKind::InteriorInsulator: s.interior_insulator.push_back(id); break;
      case FaceKind::Interface: s.interface.push_back(id); break;
      case FaceKind::Outer: s.outer.push_back(id); break;
      case FaceKind::ConductorBoundary: s.conductor_boundary.push_back(id); break;
    }
  }
  for (std::size_t e = 0; e < mesh.interface_edges.size(); ++e) s.edges.push_back(static_cast<int>(e));
  if (!mesh.dangling_interface_edges.empty())
    s.diagnostics.push_back("degenerate Gamma topology: " + std::to_string(mesh.dangling_interface_edges.size()) +
                            " edge(s) with a single adjacent Gamma triangle");
  if (!s.conductor_boundary.empty())
    s.diagnostics.push_back(std::to_string(s.conductor_boundary.size()) +
                            " conductor face(s) on the outer boundary");
  return s;
}

GeometricMetrics geometric_metrics(const Mesh& mesh) {
  GeometricMetrics g;
  for (const auto& c : mesh.cells) g.cell_diameter.push_back(c.diameter);
  for (const auto& f : mesh.faces) {
    g.face_diameter.push_back(f.diameter);
    g.face_normal.push_back(f.normal);
  }
  for (const auto& e : mesh.interface_edges) {
    g.edge_length.push_back(e.length);
    g.edge_tangents.push_back(e.tangents);
  }
  return g;
}

}  // namespace eddydg
