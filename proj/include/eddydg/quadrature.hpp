#pragma once

#include <array>
#include <vector>

namespace eddydg {

enum class EntityKind { Tetrahedron, Triangle, Segment };

/// Points in barycentric coordinates (trailing entries unused for lower
/// dimensions); weights sum to the reference measure (1/6, 1/2, 1).
struct QuadratureRule {
  EntityKind kind = EntityKind::Tetrahedron;
  std::vector<std::array<double, 4>> points;
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return weights.size(); }
};

inline constexpr int kMaxQuadratureDegree = 30;

/// Collapsed Gauss-Legendre rule exact for polynomials of total degree
/// `degree`. Throws std::invalid_argument above kMaxQuadratureDegree.
const QuadratureRule& quadrature(EntityKind kind, int degree);

/// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w);

}  // namespace eddydg
