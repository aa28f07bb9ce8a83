#include "eddydg/lagrange.hpp"

#include <Eigen/QR>

#include <cmath>

namespace eddydg {

std::vector<std::array<int, 3>> monomial_exponents(int degree) {
  std::vector<std::array<int, 3>> out;
  for (int d = 0; d <= degree; ++d)
    for (int a = d; a >= 0; --a)
      for (int b = d - a; b >= 0; --b) out.push_back({a, b, d - a - b});
  return out;
}

void eval_monomials(int degree, const Vec3& xi, Eigen::VectorXd& val, MatrixX3& grad) {
  // Powers table, pw[k][e] = xi_k^e.
  std::array<std::array<double, 8>, 3> pw{};
  for (int k = 0; k < 3; ++k) {
    pw[k][0] = 1.0;
    for (int e = 1; e <= degree; ++e) pw[k][e] = pw[k][e - 1] * xi[k];
  }
  const auto exps = monomial_exponents(degree);
  val.resize(exps.size());
  grad.resize(exps.size(), 3);
  for (std::size_t i = 0; i < exps.size(); ++i) {
    const auto [a, b, c] = exps[i];
    val[i] = pw[0][a] * pw[1][b] * pw[2][c];
    grad(i, 0) = a > 0 ? a * pw[0][a - 1] * pw[1][b] * pw[2][c] : 0.0;
    grad(i, 1) = b > 0 ? b * pw[0][a] * pw[1][b - 1] * pw[2][c] : 0.0;
    grad(i, 2) = c > 0 ? c * pw[0][a] * pw[1][b] * pw[2][c - 1] : 0.0;
  }
}

std::vector<std::array<int, 4>> lattice(int p) {
  std::vector<std::array<int, 4>> out;
  for (int a = p; a >= 0; --a)
    for (int b = p - a; b >= 0; --b)
      for (int c = p - a - b; c >= 0; --c) out.push_back({a, b, c, p - a - b - c});
  return out;
}

namespace {

Vec3 lattice_point(const std::array<int, 4>& alpha, int p) {
  return Vec3(alpha[1], alpha[2], alpha[3]) / static_cast<double>(p);
}

}  // namespace

void ReferenceBasis::eval(const Vec3& xi, Eigen::VectorXd& val, MatrixX3& grad) const {
  Eigen::VectorXd mv;
  MatrixX3 mg;
  eval_monomials(monomial_degree, xi, mv, mg);
  val.noalias() = coeffs.transpose() * mv;
  grad.noalias() = coeffs.transpose() * mg;
}

void ReferenceBasis::eval_values(const Vec3& xi, Eigen::VectorXd& val) const {
  Eigen::VectorXd mv;
  MatrixX3 mg;
  eval_monomials(monomial_degree, xi, mv, mg);
  val.noalias() = coeffs.transpose() * mv;
}

ReferenceBasis lagrange_basis(int p) {
  const auto nodes = lattice(p);
  const int n = static_cast<int>(nodes.size());
  Eigen::MatrixXd V(n, n);
  Eigen::VectorXd mv;
  MatrixX3 mg;
  for (int i = 0; i < n; ++i) {
    eval_monomials(p, lattice_point(nodes[i], p), mv, mg);
    V.row(i) = mv.transpose();
  }
  ReferenceBasis basis;
  basis.monomial_degree = p;
  basis.coeffs = V.fullPivLu().inverse();
  return basis;
}

int trace_rank(const ReferenceBasis& basis, int face, int p) {
  const auto nodes = lattice(p);
  std::vector<Vec3> pts;
  for (const auto& a : nodes)
    if (a[face] == 0) pts.push_back(lattice_point(a, p));
  Eigen::MatrixXd M(pts.size(), basis.size());
  Eigen::VectorXd v;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    basis.eval_values(pts[i], v);
    M.row(i) = v.transpose();
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
  qr.setThreshold(1e-10);
  return static_cast<int>(qr.rank());
}

ReferenceBasis enriched_basis(int m, unsigned face_mask, std::vector<int>* chosen) {
  const ReferenceBasis pm = lagrange_basis(m);
  const ReferenceBasis pm1 = lagrange_basis(m + 1);
  const int nm1 = pm1.size();
  // Embed P_m coefficients into the degree m+1 monomial space.
  Eigen::MatrixXd cols = Eigen::MatrixXd::Zero(nm1, pm.size());
  cols.topRows(pm.coeffs.rows()) = pm.coeffs;
  ReferenceBasis out;
  out.monomial_degree = m + 1;
  out.coeffs = cols;
  if (chosen) chosen->clear();
  const auto nodes = lattice(m + 1);
  for (int face = 0; face < 4; ++face) {
    if (!(face_mask & (1u << face))) continue;
    int rank = trace_rank(out, face, m + 1);
    for (int i = 0; i < nm1; ++i) {
      if (nodes[i][face] != 0) continue;
      ReferenceBasis trial = out;
      trial.coeffs.conservativeResize(Eigen::NoChange, out.size() + 1);
      trial.coeffs.col(out.size()) = pm1.coeffs.col(i);
      const int r = trace_rank(trial, face, m + 1);
      if (r > rank) {
        out = std::move(trial);
        rank = r;
        if (chosen) chosen->push_back(i);
      }
    }
  }
  if (face_mask == 0) out.monomial_degree = m, out.coeffs = pm.coeffs;
  return out;
}

}  // namespace eddydg
