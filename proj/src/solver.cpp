#include "eddydg/solver.hpp"

#include <umfpack.h>

#include <chrono>
#include <cmath>
#include <sstream>

namespace eddydg {

namespace {

const double* packed(const Complex* p) { return reinterpret_cast<const double*>(p); }
double* packed(Complex* p) { return reinterpret_cast<double*>(p); }

double inf_norm(const SparseMatrixC& A) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(A.rows());
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMatrixC::InnerIterator it(A, k); it; ++it) rows[it.row()] += std::abs(it.value());
  return rows.size() ? rows.maxCoeff() : 0.0;
}

double inf_norm(const VectorXc& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

SparseLU::SparseLU(const SparseMatrixC& A) : A_(A), n_(static_cast<int>(A.rows())) {
  if (A.rows() != A.cols()) throw SolverError("matrix is not square");
  A_.makeCompressed();
  if (n_ == 0) return;
  double control[UMFPACK_CONTROL], info[UMFPACK_INFO];
  umfpack_zi_defaults(control);
  void* symbolic = nullptr;
  int status = umfpack_zi_symbolic(n_, n_, A_.outerIndexPtr(), A_.innerIndexPtr(), packed(A_.valuePtr()), nullptr,
                                   &symbolic, control, info);
  if (status != UMFPACK_OK) {
    umfpack_zi_free_symbolic(&symbolic);
    throw SolverError("symbolic factorization failed (status " + std::to_string(status) + ")");
  }
  status = umfpack_zi_numeric(A_.outerIndexPtr(), A_.innerIndexPtr(), packed(A_.valuePtr()), nullptr, symbolic,
                              &numeric_, control, info);
  umfpack_zi_free_symbolic(&symbolic);
  rcond_ = info[UMFPACK_RCOND];
  min_pivot_ = info[UMFPACK_UMIN];
  nnz_lu_ = info[UMFPACK_LNZ] + info[UMFPACK_UNZ];
  if (status == UMFPACK_ERROR_out_of_memory) {
    umfpack_zi_free_numeric(&numeric_);
    throw SolverError("out of memory in numeric factorization (n = " + std::to_string(n_) + ")");
  }
  if (status != UMFPACK_OK || !(rcond_ > 0.0)) {
    umfpack_zi_free_numeric(&numeric_);
    std::ostringstream msg;
    msg << "numerically singular factorization (status " << status << ", smallest pivot " << min_pivot_
        << ", rcond " << rcond_ << ")";
    throw SolverError(msg.str());
  }
}

SparseLU::~SparseLU() {
  if (numeric_) umfpack_zi_free_numeric(&numeric_);
}

VectorXc SparseLU::solve(const VectorXc& b) const {
  if (b.size() != n_) throw SolverError("right-hand side has the wrong length");
  VectorXc x = VectorXc::Zero(n_);
  if (n_ == 0) return x;
  double control[UMFPACK_CONTROL], info[UMFPACK_INFO];
  umfpack_zi_defaults(control);
  const int status = umfpack_zi_solve(UMFPACK_A, A_.outerIndexPtr(), A_.innerIndexPtr(), packed(A_.valuePtr()),
                                      nullptr, packed(x.data()), nullptr, packed(b.data()), nullptr, numeric_,
                                      control, info);
  if (status != UMFPACK_OK) throw SolverError("triangular solve failed (status " + std::to_string(status) + ")");
  return x;
}

double relative_residual(const SparseMatrixC& A, const VectorXc& x, const VectorXc& b) {
  const double r = inf_norm(VectorXc(A * x - b));
  const double scale = inf_norm(A) * inf_norm(x) + inf_norm(b);
  if (scale == 0.0) return r == 0.0 ? 0.0 : INFINITY;
  return r / scale;
}

SolutionTriple solve(const AssembledSystem& system, int conductor_size, int insulator_size) {
  const auto t0 = std::chrono::steady_clock::now();
  const SparseMatrixC& A = system.A;
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n || system.b.size() != n) throw SolverError("dimension mismatch between matrix and load");
  if (conductor_size + insulator_size + (system.has_k ? 1 : 0) != n)
    throw SolverError("dimension mismatch between system and space");
  if (system.has_k && system.k_index != n - 1) throw SolverError("k slot must be the last unknown");

  SolutionTriple out;
  out.conductor_size = conductor_size;
  out.insulator_size = insulator_size;
  out.x = VectorXc::Zero(n);

  if (!system.has_k) {
    const SparseLU lu(A);
    out.x = lu.solve(system.b);
    out.stats.rcond = lu.rcond();
    out.stats.min_pivot = lu.min_pivot();
    out.stats.nnz_lu = lu.nnz_lu();
  } else {
    const int m = n - 1;
    const SparseMatrixC A11 = A.topLeftCorner(m, m);
    const VectorXc a12 = A.block(0, m, m, 1).toDense();
    const VectorXc a21 = A.block(m, 0, 1, m).toDense().transpose();
    const Complex a22 = A.coeff(m, m);
    const SparseLU lu(A11);
    const VectorXc y = lu.solve(system.b.head(m));
    const VectorXc z = lu.solve(a12);
    const Complex s = a22 - (a21.transpose() * z)(0);
    if (std::abs(s) <= 1e-14 * (std::abs(a22) + a21.cwiseAbs().maxCoeff() * z.cwiseAbs().maxCoeff()))
      throw SolverError("singular Schur complement for the k slot");
    const Complex k = (system.b[m] - (a21.transpose() * y)(0)) / s;
    out.x.head(m) = y - z * k;
    out.x[m] = k;
    out.k = k;
    out.stats.rcond = lu.rcond();
    out.stats.min_pivot = lu.min_pivot();
    out.stats.nnz_lu = lu.nnz_lu();
  }

  if (!out.x.allFinite()) throw SolverError("solution has non-finite entries");
  out.stats.residual = inf_norm(VectorXc(A * out.x - system.b));
  out.stats.tolerance = 1e-10 * (inf_norm(A) * inf_norm(out.x) + inf_norm(system.b));
  out.stats.certificate_ok = out.stats.residual <= out.stats.tolerance;
  out.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

SolutionTriple solve(const AssembledSystem& system, const DgSpace& space) {
  return solve(system, space.conductor_size(), space.insulator_size());
}

VectorXc postprocess_e_field(const DgSpace& space, const SolutionTriple& solution, const SourceField& j,
                             const MaterialConfig& materials) {
  const Mesh& mesh = space.mesh();
  VectorXc e = VectorXc::Zero(space.conductor_size());
  const auto& q = quadrature(EntityKind::Tetrahedron, 2 * space.degree() + 2);
  MatrixX3 val, curl;
  for (std::size_t k = 0; k < mesh.cells.size(); ++k) {
    const int cell = static_cast<int>(k);
    if (mesh.cells[k].region != Region::Conductor) continue;
    const int off = space.offset(cell), nl = space.local_size(cell);
    const double sig_inv = 1.0 / materials.sigma_of(mesh.cells[k].material);
    const auto& mp = space.map(cell);
    const VectorXc coef = solution.x.segment(off, nl);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nl, nl);
    VectorXc rhs = VectorXc::Zero(nl);
    for (std::size_t p = 0; p < q.size(); ++p) {
      const auto& b = q.points[p];
      const Vec3 x = mp.to_physical(Vec3(b[1], b[2], b[3]));
      const double w = q.weights[p] * std::abs(mp.det);
      space.eval_vector(cell, x, val, curl);
      CVec3 f = curl.transpose().cast<Complex>() * coef;
      if (j) f -= j(x);
      f *= sig_inv;
      M.noalias() += w * val * val.transpose();
      rhs += w * (val.cast<Complex>() * f);
    }
    e.segment(off, nl) = Eigen::LDLT<Eigen::MatrixXd>(M).solve(rhs.real()).cast<Complex>() +
                         Complex(0.0, 1.0) * Eigen::LDLT<Eigen::MatrixXd>(M).solve(rhs.imag()).cast<Complex>();
  }
  return e;
}

}  // namespace eddydg
