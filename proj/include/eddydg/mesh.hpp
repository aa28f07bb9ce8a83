#pragma once

#include "eddydg/types.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace eddydg {

/// Tetrahedral partition of D = Omega_C u Omega_I with the face/edge sets
/// needed by the interior penalty forms.
///
/// Entities are ordered by their sorted vertex-id tuples, so two loads of the
/// same file produce identical ids. A face's `normal` is the outward normal of
/// its owner. On interface faces the owner is always the conductor cell, which
/// makes `normal` equal to n_Gamma (pointing into the insulator); on outer
/// faces it is n_Sigma.
class Mesh {
 public:
  struct Cell {
    std::array<int, 4> vertices{};
    Region region = Region::Insulator;
    int material = 0;
    /// faces[i] is the face opposite local vertex i.
    std::array<int, 4> faces{};
    /// Outward unit normal of local face i.
    std::array<Vec3, 4> normals{};
    double diameter = 0.0;
    double volume = 0.0;
    Vec3 centroid = Vec3::Zero();
  };

  struct Face {
    std::array<int, 3> vertices{};  // sorted
    int owner = -1;
    int neighbor = -1;  // -1 on the boundary of D
    int owner_local = -1;
    int neighbor_local = -1;
    FaceKind kind = FaceKind::Outer;
    Vec3 normal = Vec3::Zero();
    double diameter = 0.0;
    double area = 0.0;
    Vec3 centroid = Vec3::Zero();
  };

  /// Edge shared by two interface triangles T, T'.
  struct InterfaceEdge {
    std::array<int, 2> vertices{};  // sorted
    std::array<int, 2> triangles{};  // interface face ids T, T'
    /// t_e = n_Gamma x nu_T and t'_e = n_Gamma x nu_T'.
    std::array<Vec3, 2> tangents{};
    double length = 0.0;
  };

  std::vector<Vec3> vertices;
  std::vector<Cell> cells;
  std::vector<Face> faces;
  std::vector<InterfaceEdge> interface_edges;
  /// Interface edges that only touch one Gamma triangle; excluded from E_h.
  std::vector<std::array<int, 2>> dangling_interface_edges;
  std::vector<std::string> warnings;

  /// Rebuilds faces, interface edges and all metrics from `vertices` and the
  /// vertex/region/material data of `cells`.
  void build_topology(bool allow_conductor_boundary = false);

  double mesh_size() const;
  std::size_t count_cells(Region region) const;
  bool is_cell_in(int cell, Region region) const { return cells[cell].region == region; }
};

struct EntitySummary {
  std::vector<int> interior_conductor;  // F_h^0(Omega_C)
  std::vector<int> interior_insulator;  // F_h^0(Omega_I)
  std::vector<int> interface;           // F_h^Gamma
  std::vector<int> outer;               // F_h^Sigma
  std::vector<int> conductor_boundary;  // only with relaxed loading
  std::vector<int> edges;               // E_h
  std::vector<std::string> diagnostics;

  std::vector<int> conductor_faces() const;  // F_h^{Omega_C}
  std::vector<int> insulator_faces() const;  // F_h^{Omega_I}
};

EntitySummary classify_entities(const Mesh& mesh);

struct GeometricMetrics {
  std::vector<double> cell_diameter;
  std::vector<double> face_diameter;
  std::vector<double> edge_length;
  std::vector<Vec3> face_normal;
  std::vector<std::array<Vec3, 2>> edge_tangents;
};

GeometricMetrics geometric_metrics(const Mesh& mesh);

/// Numeric physical-tag overrides for files without $PhysicalNames.
struct LoadOptions {
  std::vector<int> conductor_tags;
  std::vector<int> insulator_tags;
  std::vector<int> gamma_tags;
  std::vector<int> sigma_tags;
  /// Accept conductor cells on the boundary of D (their boundary faces become
  /// FaceKind::ConductorBoundary). Off by default.
  bool allow_conductor_boundary = false;
};

Mesh load_msh(const std::filesystem::path& path, const LoadOptions& options = {});
Mesh parse_msh(const std::string& text, const LoadOptions& options = {});

/// Writes the mesh as Gmsh MSH 2.2 ASCII with physical groups
/// 1 = conductor, 2 = insulator (volumes) and 3 = gamma, 4 = sigma (surfaces).
std::string write_msh(const Mesh& mesh);

double tet_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

}  // namespace eddydg
