#include "eddydg/analysis.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>
#include <stdexcept>

namespace eddydg {

double NormReport::total() const {
  double s = 0.0;
  const int n = star ? kNormComponents : AvgC;
  for (int c = 0; c < n; ++c) s += component[c] * component[c];
  return std::sqrt(s);
}

double NormReport::volume() const {
  return std::sqrt(component[L2C] * component[L2C] + component[CurlC] * component[CurlC] +
                   component[GradI] * component[GradI]);
}

double NormReport::jumps() const {
  return std::sqrt(component[JumpC] * component[JumpC] + component[JumpI] * component[JumpI] +
                   component[JumpE] * component[JumpE]);
}

SparseMatrixR NormMatrices::plain() const {
  SparseMatrixR S = N[0];
  for (int c = 1; c < AvgC; ++c) S += N[c];
  return S;
}

SparseMatrixR NormMatrices::star() const {
  SparseMatrixR S = plain();
  for (int c = AvgC; c < kNormComponents; ++c) S += N[c];
  return S;
}

NormMatrices norm_matrices(const DgSpace& space, const HarmonicField& field, const MaterialConfig& materials) {
  const double omega = materials.omega, mu0 = materials.mu0;
  std::array<std::vector<Eigen::Triplet<double>>, kNormComponents> trip;
  auto add = [&](int comp, const std::vector<int>& dofs, const Eigen::MatrixXd& M) {
    for (int j = 0; j < M.cols(); ++j)
      for (int i = 0; i < M.rows(); ++i)
        if (M(i, j) != 0.0) trip[comp].emplace_back(dofs[i], dofs[j], M(i, j));
  };
  for_each_entity(space, field, materials, 2 * space.degree() + 2, [&](const EntityOps& ops) {
    const int n = static_cast<int>(ops.dofs.size());
    Eigen::MatrixXd PP = Eigen::MatrixXd::Zero(n, n), QQ = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t q = 0; q < ops.weights.size(); ++q) {
      PP.noalias() += ops.weights[q] * ops.P[q].transpose() * ops.P[q];
      if (!ops.Q.empty()) QQ.noalias() += ops.weights[q] * ops.Q[q].transpose() * ops.Q[q];
    }
    const double h = ops.size;
    switch (ops.kind) {
      case TermKind::ConductorCell:
        add(L2C, ops.dofs, omega * ops.mu * PP);
        add(CurlC, ops.dofs, ops.sigma_inv * QQ);
        break;
      case TermKind::InsulatorCell:
        add(GradI, ops.dofs, omega * mu0 * PP);
        break;
      case TermKind::ConductorFace:
      case TermKind::InterfaceFace:
        add(JumpC, ops.dofs, PP / (ops.s * h));
        add(AvgC, ops.dofs, ops.s * h * QQ);
        break;
      case TermKind::InsulatorFace:
      case TermKind::OuterFace:
        add(JumpI, ops.dofs, omega * mu0 / h * PP);
        add(AvgI, ops.dofs, h * QQ);
        break;
      case TermKind::Edge:
        add(JumpE, ops.dofs, PP / (ops.s * h * h));
        add(AvgE, ops.dofs, ops.s * h * h * QQ);
        break;
    }
  });
  NormMatrices nm;
  for (int c = 0; c < kNormComponents; ++c) {
    nm.N[c].resize(space.size(), space.size());
    nm.N[c].setFromTriplets(trip[c].begin(), trip[c].end());
  }
  return nm;
}

namespace {

double quad_form(const SparseMatrixR& N, const VectorXc& x) {
  const VectorXc y = N.cast<Complex>() * x;
  return std::max(0.0, x.dot(y).real());
}

NormReport from_matrices(const NormMatrices& nm, const VectorXc& x, bool star) {
  NormReport r;
  r.star = star;
  const int n = star ? kNormComponents : AvgC;
  for (int c = 0; c < n; ++c) r.component[c] = std::sqrt(quad_form(nm.N[c], x));
  return r;
}

VectorXc random_vector(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  VectorXc x(n);
  for (int i = 0; i < n; ++i) {
    const double re = g(rng);
    x[i] = Complex(re, g(rng));
  }
  return x;
}

}  // namespace

NormReport dg_norm(const NormMatrices& nm, const VectorXc& x) { return from_matrices(nm, x, false); }
NormReport dg_star_norm(const NormMatrices& nm, const VectorXc& x) { return from_matrices(nm, x, true); }

NormReport error_against_exact(const DgSpace& space, const HarmonicField& field, const MaterialConfig& materials,
                               const VectorXc& x, const ExactSolution* exact, bool star) {
  const double omega = materials.omega, mu0 = materials.mu0;
  std::array<double, kNormComponents> sq{};
  auto zero = [](const Vec3&) { return CVec3::Zero().eval(); };
  for_each_entity(space, field, materials, 2 * space.degree() + 4, [&](const EntityOps& ops) {
    VectorXc xl(ops.dofs.size());
    for (std::size_t i = 0; i < ops.dofs.size(); ++i) xl[i] = x[ops.dofs[i]];
    const double h = ops.size;
    for (std::size_t q = 0; q < ops.weights.size(); ++q) {
      const double w = ops.weights[q];
      const Vec3& p = ops.points[q];
      const CVec3 Px = ops.P[q].cast<Complex>() * xl;
      const CVec3 Qx = ops.Q.empty() ? CVec3::Zero().eval() : CVec3(ops.Q[q].cast<Complex>() * xl);
      auto H = [&](int cell) { return exact ? exact->H(p, cell) : zero(p); };
      auto curl = [&]() { return exact ? exact->curl_h(p) : zero(p); };
      switch (ops.kind) {
        case TermKind::ConductorCell:
          sq[L2C] += w * omega * ops.mu * (Px - (exact ? exact->h(p) : zero(p))).squaredNorm();
          sq[CurlC] += w * ops.sigma_inv * (Qx - curl()).squaredNorm();
          break;
        case TermKind::InsulatorCell:
          sq[GradI] += w * omega * mu0 * (Px - H(ops.cells[0])).squaredNorm();
          break;
        case TermKind::ConductorFace:
        case TermKind::InterfaceFace:
          sq[JumpC] += w / (ops.s * h) * Px.squaredNorm();
          sq[AvgC] += w * ops.s * h * (Qx - ops.sigma_inv * curl()).squaredNorm();
          break;
        case TermKind::InsulatorFace:
          sq[JumpI] += w * omega * mu0 / h * Px.squaredNorm();
          sq[AvgI] += w * h * (Qx - 0.5 * (H(ops.cells[0]) + H(ops.cells[1]))).squaredNorm();
          break;
        case TermKind::OuterFace: {
          const Complex psi = exact ? exact->psi(p, ops.cells[0]) : Complex(0.0);
          sq[JumpI] += w * omega * mu0 / h * (Px - psi * ops.normal.cast<Complex>()).squaredNorm();
          sq[AvgI] += w * h * (Qx - H(ops.cells[0])).squaredNorm();
          break;
        }
        case TermKind::Edge:
          sq[JumpE] += w / (ops.s * h * h) * Px.squaredNorm();
          sq[AvgE] += w * ops.s * h * h * (Qx - ops.sigma_inv * curl()).squaredNorm();
          break;
      }
    }
  });
  NormReport r;
  r.star = star;
  const int n = star ? kNormComponents : AvgC;
  for (int c = 0; c < n; ++c) r.component[c] = std::sqrt(sq[c]);
  return r;
}

double check_symmetry(const SparseMatrixC& A, const SampleOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  double worst = 0.0;
  for (int s = 0; s < opt.samples; ++s) {
    const VectorXc x = random_vector(rng, static_cast<int>(A.rows()));
    const VectorXc y = random_vector(rng, static_cast<int>(A.rows()));
    const Complex xay = (x.transpose() * (A * y))(0);
    const Complex yax = (y.transpose() * (A * x))(0);
    worst = std::max(worst, std::abs(xay - yax) / std::max(std::abs(xay), 1.0));
  }
  return worst;
}

double check_coercivity(const SparseMatrixC& A, const SparseMatrixR& norm, const SampleOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  double worst = INFINITY;
  for (int s = 0; s < opt.samples; ++s) {
    const VectorXc x = random_vector(rng, static_cast<int>(A.rows()));
    const double nx = quad_form(norm, x);
    if (nx == 0.0) continue;
    const Complex a = x.dot(A * x);  // x^H A x
    worst = std::min(worst, (Complex(1.0, -1.0) * a).real() / nx);
  }
  return worst;
}

std::vector<double> eoc(const std::vector<double>& errors, const std::vector<double>& h) {
  if (errors.size() != h.size() || errors.size() < 2) throw std::invalid_argument("eoc needs two or more levels");
  std::vector<double> out;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!(errors[i] > 0.0)) throw std::invalid_argument("eoc needs positive errors");
    if (i > 0) {
      if (!(h[i] < h[i - 1])) throw std::invalid_argument("eoc needs strictly decreasing mesh sizes");
      out.push_back(std::log(errors[i - 1] / errors[i]) / std::log(h[i - 1] / h[i]));
    }
  }
  return out;
}

double trace_constant(const Mesh& mesh, int degree) {
  const ReferenceBasis basis = lagrange_basis(degree);
  const int n = basis.size();
  const auto& qt = quadrature(EntityKind::Tetrahedron, 2 * degree);
  const auto& qf = quadrature(EntityKind::Triangle, 2 * degree);
  Eigen::VectorXd v;
  double worst = 0.0;
  for (const auto& c : mesh.cells) {
    const Vec3 x0 = mesh.vertices[c.vertices[0]];
    Eigen::Matrix3d J;
    for (int i = 0; i < 3; ++i) J.col(i) = mesh.vertices[c.vertices[i + 1]] - x0;
    const Eigen::Matrix3d Jinv = J.inverse();
    const double det = std::abs(J.determinant());
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n), B = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t q = 0; q < qt.size(); ++q) {
      basis.eval_values(Vec3(qt.points[q][1], qt.points[q][2], qt.points[q][3]), v);
      M.noalias() += qt.weights[q] * det * v * v.transpose();
    }
    for (int f = 0; f < 4; ++f) {
      std::array<Vec3, 3> p;
      for (int j = 0, k = 0; j < 4; ++j)
        if (j != f) p[k++] = mesh.vertices[c.vertices[j]];
      const double area = 0.5 * (p[1] - p[0]).cross(p[2] - p[0]).norm();
      for (std::size_t q = 0; q < qf.size(); ++q) {
        const auto& b = qf.points[q];
        const Vec3 x = b[0] * p[0] + b[1] * p[1] + b[2] * p[2];
        basis.eval_values(Jinv * (x - x0), v);
        B.noalias() += qf.weights[q] * 2.0 * area * v * v.transpose();
      }
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(B, M, Eigen::EigenvaluesOnly);
    worst = std::max(worst, c.diameter * es.eigenvalues().maxCoeff());
  }
  return worst;
}

double star_excess_constant(const NormMatrices& nm, const SampleOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  const int n = static_cast<int>(nm.N[0].rows());
  double worst = 0.0;
  for (int s = 0; s < opt.samples; ++s) {
    const VectorXc x = random_vector(rng, n);
    const double vol = quad_form(nm.N[L2C], x) + quad_form(nm.N[CurlC], x) + quad_form(nm.N[GradI], x);
    const double extra = quad_form(nm.N[AvgC], x) + quad_form(nm.N[AvgI], x) + quad_form(nm.N[AvgE], x);
    if (vol > 0.0) worst = std::max(worst, std::sqrt(extra / vol));
  }
  return worst;
}

}  // namespace eddydg
