#pragma once

#include "eddydg/cohomology.hpp"
#include "eddydg/fespace.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <map>
#include <string>

namespace eddydg {

using SparseMatrixC = Eigen::SparseMatrix<Complex>;
using SparseMatrixR = Eigen::SparseMatrix<double>;

/// omega, mu_0 and per-material mu, sigma. Conductor material keys missing
/// from the maps fall back to the defaults.
struct MaterialConfig {
  double omega = 1.0;
  double mu0 = 1.0;
  double default_mu = 1.0;
  double default_sigma = 1.0;
  std::map<int, double> mu;
  std::map<int, double> sigma;

  double mu_of(int material) const;
  double sigma_of(int material) const;
  /// Throws ConfigError naming the first non-positive entry.
  void validate() const;
};

struct PenaltyConfig {
  double a_C = 0.0;
  double a_I = 0.0;
  double alpha = 0.0;

  static PenaltyConfig defaults(int m);
  PenaltyConfig scaled(double factor) const { return {a_C * factor, a_I * factor, alpha * factor}; }
  void validate() const;
  /// Messages for penalties below the calibrated defaults.
  std::vector<std::string> warnings(int m) const;
};

/// s_F on conductor-side faces (0 elsewhere) and s_e on interface edges.
struct PenaltyFields {
  std::vector<double> s_face;
  std::vector<double> s_edge;
};

PenaltyFields penalty_fields(const Mesh& mesh, const MaterialConfig& materials);

// Jump and average primitives, shared by assembly, norms and errors.
template <class S>
using V3 = Eigen::Matrix<S, 3, 1>;

template <class S>
V3<S> average(const V3<S>& a, const V3<S>& b) {
  return (a + b) / S(2);
}

/// v_K x n_K + v_K' x n_K'.
template <class S>
V3<S> tangential_jump(const V3<S>& vK, const Vec3& nK, const V3<S>& vKp, const Vec3& nKp) {
  return vK.cross(nK.cast<S>()) + vKp.cross(nKp.cast<S>());
}

/// Mixed jump on Gamma: v_K x n + (grad phi_K' + m rho_K') x (-n), n = n_Gamma.
template <class S>
V3<S> gamma_jump(const V3<S>& vK, const V3<S>& gKp, const Vec3& n) {
  return vK.cross(n.cast<S>()) - gKp.cross(n.cast<S>());
}

/// phi_K n_K + phi_K' n_K'.
template <class S>
V3<S> normal_jump(S phiK, const Vec3& nK, S phiKp, const Vec3& nKp) {
  return phiK * nK.cast<S>() + phiKp * nKp.cast<S>();
}

/// phi_K n_Sigma.
template <class S>
V3<S> sigma_jump(S phi, const Vec3& n) {
  return phi * n.cast<S>();
}

/// phi_{I_e} t_e + phi_{I'_e} t'_e.
template <class S>
V3<S> edge_jump(S phi, const Vec3& t, S phip, const Vec3& tp) {
  return phi * t.cast<S>() + phip * tp.cast<S>();
}

/// Throws GeometryError unless nKp = -nK to 1e-12.
void check_opposite_normals(const Vec3& nK, const Vec3& nKp);

enum class TermKind { ConductorCell, InsulatorCell, ConductorFace, InterfaceFace, InsulatorFace, OuterFace, Edge };

/// Real operator matrices of one mesh entity at its quadrature points. Columns
/// follow `dofs` (global ids, merged when two sides share a cell).
///
///   ConductorCell: P = values v, Q = curl v, S unused.
///   InsulatorCell: P = grad phi + m rho, S = phi.
///   ConductorFace / InterfaceFace: P = jump [(v, phi, m)], Q = {sigma^-1 curl v},
///                  S = phi_K' (interface only).
///   InsulatorFace / OuterFace: P = [phi n], Q = {grad phi + m rho}, S = phi_K.
///   Edge: P = [phi t]_e, Q = {sigma^-1 curl v}_e.
struct EntityOps {
  TermKind kind = TermKind::ConductorCell;
  int id = -1;
  std::vector<int> dofs;
  std::vector<int> cells;  // cells contributing, in side order
  std::vector<double> weights;
  std::vector<Vec3> points;
  std::vector<Eigen::MatrixXd> P, Q, S;
  double size = 0.0;        // h_K, h_F or h_e
  double s = 0.0;           // s_F or s_e (conductor faces, edges)
  double sigma_inv = 0.0;   // average of sigma^-1 over the conductor sides
  double mu = 0.0;          // mu_K on conductor cells
  Vec3 normal = Vec3::Zero();
};

/// Visits every cell, face and interface edge with its operators, in a fixed
/// order. `degree` is the quadrature exactness.
void for_each_entity(const DgSpace& space, const HarmonicField& field, const MaterialConfig& materials,
                     int degree, const std::function<void(const EntityOps&)>& visit);

struct AssembledSystem {
  SparseMatrixC A;
  VectorXc b;
  bool has_k = false;
  int k_index = -1;
};

/// Matrix of A_h with entries A(i, j) = A_h(phi_j, phi_i), no conjugation.
SparseMatrixC assemble_Ah(const DgSpace& space, const HarmonicField& field, const MaterialConfig& materials,
                          const PenaltyConfig& penalties);

using SourceField = std::function<CVec3(const Vec3&)>;

/// L_h for the current density j (empty j gives 0).
VectorXc assemble_Lh(const DgSpace& space, const HarmonicField& field, const MaterialConfig& materials,
                     const SourceField& j);

/// Extra data making the scheme consistent with a manufactured solution.
/// Callbacks on insulator entities receive the cell id they are evaluated in.
struct SourceBundle {
  std::function<CVec3(const Vec3&)> f_C;            // volume source in Omega_C
  std::function<Complex(const Vec3&, int)> f_I;     // volume source in Omega_I
  Complex g = 0.0;                                  // k-equation source
  std::function<Complex(const Vec3&, int, const Vec3&)> r_Gamma;  // flux defect on Gamma: (x, insulator cell, n_Gamma)
  std::function<Complex(const Vec3&)> psi_Sigma;    // Dirichlet trace on Sigma

  bool empty() const { return !f_C && !f_I && g == Complex(0.0) && !r_Gamma && !psi_Sigma; }
};

VectorXc assemble_generalized_load(const DgSpace& space, const HarmonicField& field,
                                   const MaterialConfig& materials, const PenaltyConfig& penalties,
                                   const SourceBundle& bundle);

AssembledSystem assemble_system(const DgSpace& space, const HarmonicField& field, const MaterialConfig& materials,
                                const PenaltyConfig& penalties, const SourceField& j,
                                const SourceBundle& bundle = {});

}  // namespace eddydg
