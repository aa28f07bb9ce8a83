#pragma once

#include "eddydg/mesh.hpp"

#include <optional>
#include <string>
#include <vector>

namespace eddydg {

enum class CutProvenance { Empty, UserSupplied, SpanningTree };

/// Set of interior-insulator faces cutting Omega_I into a simply connected
/// region. signs[i] = +1 means the potential rises by one when crossing
/// faces[i] from its owner into its neighbor.
struct CutSurface {
  std::vector<int> faces;
  std::vector<int> signs;
  CutProvenance provenance = CutProvenance::Empty;

  bool empty() const { return faces.empty(); }
};

/// Closed loop of mesh edges on Gamma, given as vertex-id pairs.
using EdgeLoop = std::vector<std::array<int, 2>>;

struct CutOptions {
  /// Caller asserts H^1(Omega_I) is trivial; the search is skipped.
  bool assert_trivial = false;
  /// Optional loop on Gamma linking the cut once. It fixes the orientation so
  /// that the circulation of rho along the loop (in its given order) is +1.
  std::optional<EdgeLoop> hint;
};

CutSurface build_cut(const Mesh& mesh, const CutOptions& options = {});

/// Checks a user-supplied cut (face kinds, Sigma contact, orientation) and
/// applies the hint orientation if one is given.
CutSurface make_user_cut(const Mesh& mesh, std::vector<std::pair<int, int>> faces_and_signs,
                         const std::optional<EdgeLoop>& hint = std::nullopt);

/// Piecewise-constant generator rho_K = grad p_K of a multivalued P1
/// potential p that vanishes on Sigma and jumps by one across the cut.
struct HarmonicField {
  std::vector<Vec3> rho;                         // per cell; zero on conductor cells
  std::vector<std::array<double, 4>> potential;  // per cell, per local vertex
  CutSurface cut;

  bool empty() const { return cut.empty(); }
};

HarmonicField build_harmonic_field(const Mesh& mesh, const CutSurface& cut);

struct HarmonicReport {
  double curl_residual = 0.0;
  double tangential_residual = 0.0;
  double sigma_residual = 0.0;
  double circulation = 0.0;
  bool circulation_applicable = false;

  bool curl_ok = true;
  bool tangential_ok = true;
  bool sigma_ok = true;
  bool circulation_ok = true;

  bool passed() const { return curl_ok && tangential_ok && sigma_ok && circulation_ok; }
};

HarmonicReport validate_harmonic_field(const Mesh& mesh, const HarmonicField& field);

/// Circulation of rho along a closed edge loop on Gamma.
double loop_circulation(const Mesh& mesh, const HarmonicField& field, const EdgeLoop& loop);

/// Plain-text cut format: one "face_id sign" pair per line, '#' comments.
std::string write_cut(const CutSurface& cut);
CutSurface read_cut(const Mesh& mesh, const std::string& text);

}  // namespace eddydg
