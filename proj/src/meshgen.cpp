#include "eddydg/meshgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace eddydg {

Mesh make_box_mesh(int n, const std::function<bool(const Vec3&)>& is_conductor) {
  if (n < 1) throw GeometryError("box mesh needs n >= 1");
  Mesh mesh;
  const int np = n + 1;
  const double hstep = 2.0 / n;
  mesh.vertices.reserve(static_cast<std::size_t>(np) * np * np);
  for (int k = 0; k < np; ++k)
    for (int j = 0; j < np; ++j)
      for (int i = 0; i < np; ++i) mesh.vertices.emplace_back(-1.0 + i * hstep, -1.0 + j * hstep, -1.0 + k * hstep);
  auto vid = [np](int i, int j, int k) { return i + np * (j + np * k); };

  static constexpr std::array<std::array<int, 3>, 6> perms{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  mesh.cells.reserve(6 * static_cast<std::size_t>(n) * n * n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const Vec3 centre(-1.0 + (i + 0.5) * hstep, -1.0 + (j + 0.5) * hstep, -1.0 + (k + 0.5) * hstep);
        const Region region = is_conductor(centre) ? Region::Conductor : Region::Insulator;
        for (const auto& p : perms) {
          std::array<int, 3> ijk{i, j, k};
          Mesh::Cell c;
          c.vertices[0] = vid(ijk[0], ijk[1], ijk[2]);
          for (int s = 0; s < 3; ++s) {
            ++ijk[p[s]];
            c.vertices[s + 1] = vid(ijk[0], ijk[1], ijk[2]);
          }
          c.region = region;
          c.material = region == Region::Conductor ? 1 : 2;
          mesh.cells.push_back(c);
        }
      }
  mesh.build_topology();
  return mesh;
}

Mesh make_torus_mesh(int n) {
  if (n % 5 != 0) throw GeometryError("torus mesh needs n divisible by 5");
  return make_box_mesh(n, [](const Vec3& c) {
    const double r = std::max(std::abs(c.x()), std::abs(c.y()));
    return r > 0.2 && r < 0.6 && std::abs(c.z()) < 0.2;
  });
}

Mesh make_cube_mesh(int n) {
  if (n % 4 != 0) throw GeometryError("cube mesh needs n divisible by 4");
  return make_box_mesh(n, [](const Vec3& c) { return c.cwiseAbs().maxCoeff() < 0.5; });
}

std::vector<std::pair<int, int>> torus_hole_cut(const Mesh& mesh) {
  std::vector<std::pair<int, int>> cut;
  constexpr double tol = 1e-9;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& face = mesh.faces[f];
    if (face.kind != FaceKind::InteriorInsulator) continue;
    if (std::abs(face.normal.z()) < 1.0 - tol) continue;
    const Vec3& c = face.centroid;
    if (std::abs(c.z() - 0.2) > tol || std::abs(c.x()) > 0.2 || std::abs(c.y()) > 0.2) continue;
    const bool neighbor_above = mesh.cells[face.neighbor].centroid.z() > c.z();
    cut.emplace_back(static_cast<int>(f), neighbor_above ? 1 : -1);
  }
  return cut;
}

}  // namespace eddydg
