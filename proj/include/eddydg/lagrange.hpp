#pragma once

#include "eddydg/types.hpp"

#include <array>
#include <vector>

namespace eddydg {

using MatrixX3 = Eigen::Matrix<double, Eigen::Dynamic, 3>;

/// Exponent triples (a, b, c) with a + b + c <= degree, graded order.
std::vector<std::array<int, 3>> monomial_exponents(int degree);

/// Values and reference gradients of all monomials of total degree <= degree.
void eval_monomials(int degree, const Vec3& xi, Eigen::VectorXd& val, MatrixX3& grad);

/// Equispaced barycentric lattice {alpha / p : |alpha| = p} on the reference
/// tetrahedron, as multi-indices (alpha_0, ..., alpha_3).
std::vector<std::array<int, 4>> lattice(int p);

/// Scalar polynomial basis on the reference tetrahedron stored as monomial
/// coefficients: basis_j(xi) = sum_i coeffs(i, j) * monomial_i(xi).
struct ReferenceBasis {
  int monomial_degree = 0;
  Eigen::MatrixXd coeffs;

  int size() const { return static_cast<int>(coeffs.cols()); }
  void eval(const Vec3& xi, Eigen::VectorXd& val, MatrixX3& grad) const;
  void eval_values(const Vec3& xi, Eigen::VectorXd& val) const;
};

/// Nodal Lagrange basis of degree p on the equispaced lattice.
ReferenceBasis lagrange_basis(int p);

/// P_m Lagrange basis extended by degree-(m+1) Lagrange functions attached to
/// lattice nodes on the faces flagged in `face_mask` (bit i = face opposite
/// vertex i), chosen greedily until the trace on each flagged face spans
/// P_{m+1}. `chosen` receives the P_{m+1} lattice indices that were added.
ReferenceBasis enriched_basis(int m, unsigned face_mask, std::vector<int>* chosen = nullptr);

/// Rank of the trace of `basis` on local face `face` (numerical, relative
/// threshold 1e-10), measured on the degree-`p` lattice of that face.
int trace_rank(const ReferenceBasis& basis, int face, int p);

}  // namespace eddydg
