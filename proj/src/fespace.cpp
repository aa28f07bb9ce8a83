#include "eddydg/fespace.hpp"

#include <stdexcept>

namespace eddydg {

namespace {

Vec3 lattice_point(const std::array<int, 4>& alpha, int p) {
  return Vec3(alpha[1], alpha[2], alpha[3]) / static_cast<double>(p);
}

}  // namespace

DgSpace::DgSpace(const Mesh& mesh, int m, bool with_k) : mesh_(&mesh), m_(m) {
  if (m < 1 || m > 3) throw std::invalid_argument("polynomial degree must be 1, 2 or 3");
  pm_ = lagrange_basis(m);
  const std::size_t n = mesh.cells.size();
  offset_.assign(n, 0);
  ndof_.assign(n, 0);
  mask_.assign(n, 0);
  maps_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& c = mesh.cells[k];
    auto& mp = maps_[k];
    mp.x0 = mesh.vertices[c.vertices[0]];
    for (int i = 0; i < 3; ++i) mp.J.col(i) = mesh.vertices[c.vertices[i + 1]] - mp.x0;
    mp.Jinv = mp.J.inverse();
    mp.det = mp.J.determinant();
    if (c.region == Region::Insulator)
      for (int f = 0; f < 4; ++f)
        if (mesh.faces[c.faces[f]].kind == FaceKind::Interface) mask_[k] |= 1u << f;
    if (mask_[k] && !enriched_.count(mask_[k])) enriched_.emplace(mask_[k], enriched_basis(m, mask_[k]));
  }
  int next = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (mesh.cells[k].region != Region::Conductor) continue;
    offset_[k] = next;
    ndof_[k] = 3 * pm_.size();
    next += ndof_[k];
  }
  n_conductor_ = next;
  for (std::size_t k = 0; k < n; ++k) {
    if (mesh.cells[k].region != Region::Insulator) continue;
    offset_[k] = next;
    ndof_[k] = scalar_basis(static_cast<int>(k)).size();
    next += ndof_[k];
  }
  n_insulator_ = next - n_conductor_;
  if (with_k) k_index_ = next++;
  size_ = next;
}

const ReferenceBasis& DgSpace::scalar_basis(int cell) const {
  if (cell < 0 || cell >= static_cast<int>(mask_.size())) throw std::out_of_range("unknown cell id");
  return mask_[cell] ? enriched_.at(mask_[cell]) : pm_;
}

void DgSpace::eval_scalar(int cell, const Vec3& x, Eigen::VectorXd& val, MatrixX3& grad) const {
  const auto& mp = maps_.at(cell);
  MatrixX3 gref;
  scalar_basis(cell).eval(mp.to_reference(x), val, gref);
  grad.noalias() = gref * mp.Jinv;  // rows: (J^{-T} g)^T = g^T J^{-1}
}

void DgSpace::eval_vector(int cell, const Vec3& x, MatrixX3& val, MatrixX3& curl) const {
  Eigen::VectorXd v;
  MatrixX3 g;
  eval_scalar(cell, x, v, g);
  const int nb = static_cast<int>(v.size());
  val.setZero(3 * nb, 3);
  curl.resize(3 * nb, 3);
  for (int c = 0; c < 3; ++c) {
    const Vec3 e = Vec3::Unit(c);
    for (int i = 0; i < nb; ++i) {
      val(c * nb + i, c) = v[i];
      curl.row(c * nb + i) = Vec3(g.row(i).transpose()).cross(e).transpose();
    }
  }
}

DgSpace build_dg_space(const Mesh& mesh, int m, bool with_k) { return DgSpace(mesh, m, with_k); }

BasisValues eval_basis(const DgSpace& space, int cell, const std::vector<Vec3>& points) {
  if (cell < 0 || cell >= static_cast<int>(space.mesh().cells.size())) throw std::out_of_range("unknown cell id");
  BasisValues out;
  const bool conductor = space.mesh().cells[cell].region == Region::Conductor;
  for (const auto& x : points) {
    if (conductor) {
      MatrixX3 v, c;
      space.eval_vector(cell, x, v, c);
      out.vector_values.push_back(std::move(v));
      out.curls.push_back(std::move(c));
    } else {
      Eigen::VectorXd v;
      MatrixX3 g;
      space.eval_scalar(cell, x, v, g);
      out.values.push_back(std::move(v));
      out.gradients.push_back(std::move(g));
    }
  }
  return out;
}

VectorXc elementwise_interpolate(const DgSpace& space, const VectorField& conductor, const ScalarField& insulator) {
  VectorXc x = VectorXc::Zero(space.size());
  const auto nodes = lattice(space.degree());
  const int nb = static_cast<int>(nodes.size());
  const auto& mesh = space.mesh();
  for (std::size_t k = 0; k < mesh.cells.size(); ++k) {
    const int cell = static_cast<int>(k);
    const int off = space.offset(cell);
    const auto& mp = space.map(cell);
    const bool is_c = mesh.cells[k].region == Region::Conductor;
    if (is_c && !conductor) continue;
    if (!is_c && !insulator) continue;
    for (int i = 0; i < nb; ++i) {
      const Vec3 p = mp.to_physical(lattice_point(nodes[i], space.degree()));
      if (is_c) {
        const CVec3 v = conductor(p);
        for (int c = 0; c < 3; ++c) x[off + c * nb + i] = v[c];
      } else {
        x[off + i] = insulator(p);
      }
    }
  }
  return x;
}

VectorXc gradient_pair_interpolate(const DgSpace& space, const ScalarField& chi, Complex k) {
  VectorXc x = elementwise_interpolate(space, {}, chi);
  const auto nodes = lattice(space.degree());
  const int nb = static_cast<int>(nodes.size());
  const auto& mesh = space.mesh();
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    if (mesh.cells[c].region != Region::Conductor) continue;
    const int cell = static_cast<int>(c);
    const auto& mp = space.map(cell);
    VectorXc nodal(nb);
    for (int j = 0; j < nb; ++j) nodal[j] = chi(mp.to_physical(lattice_point(nodes[j], space.degree())));
    const int off = space.offset(cell);
    for (int i = 0; i < nb; ++i) {
      Eigen::VectorXd v;
      MatrixX3 g;
      space.eval_scalar(cell, mp.to_physical(lattice_point(nodes[i], space.degree())), v, g);
      const CVec3 grad = g.transpose().cast<Complex>() * nodal;
      for (int d = 0; d < 3; ++d) x[off + d * nb + i] = grad[d];
    }
  }
  if (space.has_k()) x[space.k_index()] = k;
  return x;
}

}  // namespace eddydg
