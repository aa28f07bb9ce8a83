#pragma once

#include "eddydg/mesh.hpp"

#include <functional>

namespace eddydg {

/// Structured tetrahedral mesh of [-1,1]^3: n^3 cubes, each split into six
/// tetrahedra along its main diagonal. A cube is conductor iff
/// `is_conductor(cube centre)` holds.
Mesh make_box_mesh(int n, const std::function<bool(const Vec3&)>& is_conductor);

/// Square torus [-0.6,0.6]^2 \ (-0.2,0.2)^2 x [-0.2,0.2] inside the box.
/// n must be a multiple of 5 so the conductor boundary is resolved exactly.
Mesh make_torus_mesh(int n);

/// Conductor cube [-0.5,0.5]^3 inside the box. n must be a multiple of 4.
Mesh make_cube_mesh(int n);

/// Faces of the flat disk z = 0.2, |x|,|y| < 0.2 spanning the torus hole,
/// oriented with the plus side above. Returned as (face id, sign) pairs.
std::vector<std::pair<int, int>> torus_hole_cut(const Mesh& mesh);

}  // namespace eddydg
