#pragma once

#include "eddydg/assembly.hpp"

#include <memory>
#include <optional>

namespace eddydg {

/// Sparse complex LU factorization (UMFPACK).
class SparseLU {
 public:
  /// Throws SolverError when the matrix is not square or numerically singular.
  explicit SparseLU(const SparseMatrixC& A);
  ~SparseLU();
  SparseLU(const SparseLU&) = delete;
  SparseLU& operator=(const SparseLU&) = delete;

  VectorXc solve(const VectorXc& b) const;
  int rows() const { return n_; }
  /// Reciprocal condition estimate min|u_ii| / max|u_ii|.
  double rcond() const { return rcond_; }
  double min_pivot() const { return min_pivot_; }
  double nnz_lu() const { return nnz_lu_; }

 private:
  SparseMatrixC A_;
  int n_ = 0;
  void* numeric_ = nullptr;
  double rcond_ = 0.0;
  double min_pivot_ = 0.0;
  double nnz_lu_ = 0.0;
};

struct SolverStats {
  double residual = 0.0;   // ||Ax - b||_inf
  double tolerance = 0.0;  // 1e-10 (||A||_inf ||x||_inf + ||b||_inf)
  bool certificate_ok = false;
  double rcond = 0.0;
  double min_pivot = 0.0;
  double nnz_lu = 0.0;
  double seconds = 0.0;
};

struct SolutionTriple {
  VectorXc x;  // full coefficient vector in DgSpace layout
  int conductor_size = 0;
  int insulator_size = 0;
  std::optional<Complex> k;
  SolverStats stats;

  auto conductor() const { return x.head(conductor_size); }
  auto insulator() const { return x.segment(conductor_size, insulator_size); }
};

/// Scaled residual ||Ax - b||_inf / (||A||_inf ||x||_inf + ||b||_inf), 0 when
/// both scales vanish.
double relative_residual(const SparseMatrixC& A, const VectorXc& x, const VectorXc& b);

/// Direct solve. The k slot, if present, is eliminated through its Schur
/// complement so the sparse factor never sees the dense row and column.
SolutionTriple solve(const AssembledSystem& system, int conductor_size, int insulator_size);

/// Convenience overload taking the layout from the space.
SolutionTriple solve(const AssembledSystem& system, const DgSpace& space);

/// Coefficients of e_h = sigma^-1 (curl h_h - Pi j) in the conductor block of
/// the space (same per-cell layout as h_h). Pi is the cellwise L2 projection.
VectorXc postprocess_e_field(const DgSpace& space, const SolutionTriple& solution, const SourceField& j,
                             const MaterialConfig& materials);

}  // namespace eddydg
