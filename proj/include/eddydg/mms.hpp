#pragma once

#include "eddydg/assembly.hpp"

#include <limits>
#include <string>
#include <vector>

namespace eddydg {

/// Manufactured (h*, psi*, k*). Insulator callbacks take the cell id because
/// psi* is multivalued when k* != 0.
struct ExactSolution {
  std::string name;
  /// Sobolev regularity used for rate prediction (infinity for smooth data).
  double regularity = std::numeric_limits<double>::infinity();
  Complex k = 0.0;
  bool satisfies_sigma = true;
  bool satisfies_transmission = true;

  std::function<CVec3(const Vec3&)> h, curl_h, curl_curl_h;
  std::function<Complex(const Vec3&, int)> psi;
  std::function<CVec3(const Vec3&, int)> grad_psi;
  /// Total insulator field H = grad psi* + k* rho and its divergence.
  std::function<CVec3(const Vec3&, int)> H;
  std::function<Complex(const Vec3&, int)> div_H;
};

/// Loads that make the discrete problem consistent with an exact solution.
struct MmsLoad {
  SourceField j;  // always empty: the residual goes into f_C
  SourceBundle bundle;
};

/// Throws ConfigError when the exact solution violates the transmission
/// conditions on Gamma or needs non-uniform conductor materials.
MmsLoad mms_sources(const ExactSolution& exact, const DgSpace& space, const HarmonicField& field,
                    const MaterialConfig& materials);

ExactSolution mms_zero();
/// chi = cos(pi x/2) cos(pi y/2) cos(pi z/2), vanishing on the boundary of [-1,1]^3.
ExactSolution mms_gradient_pair();
/// Global polynomial chi of degree m; the Sigma trace is loaded weakly.
ExactSolution mms_polynomial_pair(int m);
/// (1-x^2)(1-y^2)(1-z^2)(x + 2y - z), polynomial but of degree 7.
ExactSolution mms_windowed();
/// Torus fixture with k* = 0.7 + 0.3i. `mesh` and `field` must outlive the result.
ExactSolution mms_torus_k(const Mesh& mesh, const HarmonicField& field);

/// Entries not needing a mesh (zero, gradient_pair, polynomial_pair(m), windowed).
std::vector<ExactSolution> mms_catalog(int m);
ExactSolution mms_by_name(const std::string& name, int m, const Mesh* mesh = nullptr,
                          const HarmonicField* field = nullptr);

/// Largest relative mismatch between the analytic derivatives and centered
/// differences of the callbacks at the given points (cell id per point).
double derivative_consistency(const ExactSolution& exact, const std::vector<Vec3>& conductor_points,
                              const std::vector<std::pair<Vec3, int>>& insulator_points);

}  // namespace eddydg
