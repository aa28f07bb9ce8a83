#pragma once

#include "eddydg/lagrange.hpp"
#include "eddydg/mesh.hpp"
#include "eddydg/quadrature.hpp"

#include <functional>
#include <map>
#include <memory>

namespace eddydg {

/// Affine map x = x0 + J xi of a cell.
struct CellMap {
  Vec3 x0 = Vec3::Zero();
  Eigen::Matrix3d J = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d Jinv = Eigen::Matrix3d::Identity();
  double det = 1.0;

  Vec3 to_reference(const Vec3& x) const { return Jinv * (x - x0); }
  Vec3 to_physical(const Vec3& xi) const { return x0 + J * xi; }
};

/// Broken spaces X_h (vector P_m on conductor cells) and V_h (scalar P_m,
/// enriched on cells with a face on Gamma), plus the optional k slot.
///
/// Global layout: conductor cells first, then insulator cells, each in cell-id
/// order; the k slot, if present, is the last dof. On a conductor cell local
/// dof c * n + i is the scalar Lagrange function i times unit vector e_c.
class DgSpace {
 public:
  DgSpace(const Mesh& mesh, int m, bool with_k);

  const Mesh& mesh() const { return *mesh_; }
  int degree() const { return m_; }
  int size() const { return size_; }
  int conductor_size() const { return n_conductor_; }
  int insulator_size() const { return n_insulator_; }
  bool has_k() const { return k_index_ >= 0; }
  int k_index() const { return k_index_; }

  int offset(int cell) const { return offset_[cell]; }
  int local_size(int cell) const { return ndof_[cell]; }
  /// Number of scalar functions on the cell (per component on conductor cells).
  int scalar_size(int cell) const { return scalar_basis(cell).size(); }
  /// P_m part of an insulator cell's scalar basis (enrichment follows it).
  int pm_size() const { return pm_.size(); }
  unsigned gamma_mask(int cell) const { return mask_[cell]; }

  const CellMap& map(int cell) const { return maps_[cell]; }
  const ReferenceBasis& scalar_basis(int cell) const;

  /// Scalar basis (insulator cells) at physical point x: values and gradients.
  void eval_scalar(int cell, const Vec3& x, Eigen::VectorXd& val, MatrixX3& grad) const;
  /// Vector basis (conductor cells) at physical point x: rows are values and
  /// curls of each local dof.
  void eval_vector(int cell, const Vec3& x, MatrixX3& val, MatrixX3& curl) const;

 private:
  const Mesh* mesh_;
  int m_;
  int size_ = 0;
  int n_conductor_ = 0;
  int n_insulator_ = 0;
  int k_index_ = -1;
  std::vector<int> offset_, ndof_;
  std::vector<unsigned> mask_;
  std::vector<CellMap> maps_;
  ReferenceBasis pm_;
  std::map<unsigned, ReferenceBasis> enriched_;
};

DgSpace build_dg_space(const Mesh& mesh, int m, bool with_k);

/// Basis data at a list of physical points of one cell. Scalar cells fill
/// `values`/`gradients` (one row per point, one column per dof / per dof and
/// direction); conductor cells fill `vector_values`/`curls` indexed
/// [point](dof, direction).
struct BasisValues {
  std::vector<Eigen::VectorXd> values;
  std::vector<MatrixX3> gradients;
  std::vector<MatrixX3> vector_values;
  std::vector<MatrixX3> curls;
};

BasisValues eval_basis(const DgSpace& space, int cell, const std::vector<Vec3>& points);

/// Smooth field callbacks used for interpolation.
using ScalarField = std::function<Complex(const Vec3&)>;
using VectorField = std::function<CVec3(const Vec3&)>;

/// Nodal P_m interpolation on every cell; enrichment and k coefficients are 0.
/// Either callback may be empty (its cells stay 0).
VectorXc elementwise_interpolate(const DgSpace& space, const VectorField& conductor, const ScalarField& insulator);

/// Interpolant of a gradient pair (h, psi) = (grad chi, chi): psi is the nodal
/// P_m interpolant of chi and h the elementwise gradient of the same nodal
/// interpolant, so all tangential traces match exactly across faces.
VectorXc gradient_pair_interpolate(const DgSpace& space, const ScalarField& chi, Complex k = 0.0);

}  // namespace eddydg
