#include "eddydg/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace eddydg {

double MaterialConfig::mu_of(int material) const {
  auto it = mu.find(material);
  return it == mu.end() ? default_mu : it->second;
}

double MaterialConfig::sigma_of(int material) const {
  auto it = sigma.find(material);
  return it == sigma.end() ? default_sigma : it->second;
}

void MaterialConfig::validate() const {
  auto positive = [](double v, const std::string& key) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      std::ostringstream msg;
      msg << key << " must be positive (got " << v << ")";
      throw ConfigError(msg.str());
    }
  };
  positive(omega, "omega");
  positive(mu0, "mu0");
  positive(default_mu, "mu");
  positive(default_sigma, "sigma");
  for (const auto& [k, v] : mu) positive(v, "mu." + std::to_string(k));
  for (const auto& [k, v] : sigma) positive(v, "sigma." + std::to_string(k));
}

PenaltyConfig PenaltyConfig::defaults(int m) {
  const double a = 10.0 * (m + 1) * (m + 1);
  return {a, a, a};
}

void PenaltyConfig::validate() const {
  if (!(a_C > 0.0)) throw ConfigError("a_C must be positive");
  if (!(a_I > 0.0)) throw ConfigError("a_I must be positive");
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
}

std::vector<std::string> PenaltyConfig::warnings(int m) const {
  std::vector<std::string> out;
  const PenaltyConfig d = defaults(m);
  if (a_C < d.a_C) out.push_back("a_C below the calibrated default; uniqueness is not guaranteed");
  if (a_I < d.a_I) out.push_back("a_I below the calibrated default; uniqueness is not guaranteed");
  if (alpha < d.alpha) out.push_back("alpha below the calibrated default; uniqueness is not guaranteed");
  return out;
}

PenaltyFields penalty_fields(const Mesh& mesh, const MaterialConfig& materials) {
  PenaltyFields pf;
  pf.s_face.assign(mesh.faces.size(), 0.0);
  auto sig = [&](int cell) { return materials.sigma_of(mesh.cells[cell].material); };
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& face = mesh.faces[f];
    if (face.kind == FaceKind::InteriorConductor)
      pf.s_face[f] = std::min(sig(face.owner), sig(face.neighbor));
    else if (face.kind == FaceKind::Interface)
      pf.s_face[f] = sig(face.owner);
  }
  for (const auto& e : mesh.interface_edges)
    pf.s_edge.push_back(std::min(sig(mesh.faces[e.triangles[0]].owner), sig(mesh.faces[e.triangles[1]].owner)));
  return pf;
}

void check_opposite_normals(const Vec3& nK, const Vec3& nKp) {
  if ((nK + nKp).norm() > 1e-12) throw GeometryError("face normals of the two sides are not opposite");
}

namespace {

struct Layout {
  std::vector<int> dofs;
  std::vector<std::pair<int, int>> cell_col;  // (cell, first column)
  int k_col = -1;

  int add_cell(const DgSpace& space, int cell) {
    for (const auto& [c, col] : cell_col)
      if (c == cell) return col;
    const int col = static_cast<int>(dofs.size());
    for (int i = 0; i < space.local_size(cell); ++i) dofs.push_back(space.offset(cell) + i);
    cell_col.push_back({cell, col});
    return col;
  }
  void add_k(const DgSpace& space) {
    if (k_col < 0) {
      k_col = static_cast<int>(dofs.size());
      dofs.push_back(space.k_index());
    }
  }
  int size() const { return static_cast<int>(dofs.size()); }
};

bool uses_k(const DgSpace& space, const HarmonicField& field, std::initializer_list<int> cells) {
  if (!space.has_k()) return false;
  for (int c : cells)
    if (field.rho[c].squaredNorm() > 0.0) return true;
  return false;
}

void triangle_points(const Mesh& mesh, const Mesh::Face& face, int degree, std::vector<Vec3>& x,
                     std::vector<double>& w) {
  const auto& q = quadrature(EntityKind::Triangle, degree);
  const Vec3& p0 = mesh.vertices[face.vertices[0]];
  const Vec3& p1 = mesh.vertices[face.vertices[1]];
  const Vec3& p2 = mesh.vertices[face.vertices[2]];
  x.clear();
  w.clear();
  for (std::size_t i = 0; i < q.size(); ++i) {
    const auto& b = q.points[i];
    x.push_back(b[0] * p0 + b[1] * p1 + b[2] * p2);
    w.push_back(q.weights[i] * 2.0 * face.area);
  }
}

struct Evaluator {
  const DgSpace& space;
  Eigen::VectorXd v;
  MatrixX3 g, val, curl;

  void scalar(int cell, const Vec3& x) { space.eval_scalar(cell, x, v, g); }
  void vector(int cell, const Vec3& x) { space.eval_vector(cell, x, val, curl); }
};

}  // namespace

void for_each_entity(const DgSpace& space, const HarmonicField& field, const MaterialConfig& materials,
                     int degree, const std::function<void(const EntityOps&)>& visit) {
  const Mesh& mesh = space.mesh();
  Evaluator ev{space, {}, {}, {}, {}};
  auto sig_inv = [&](int cell) { return 1.0 / materials.sigma_of(mesh.cells[cell].material); };
  const PenaltyFields pf = penalty_fields(mesh, materials);

  // Cells.
  const auto& qt = quadrature(EntityKind::Tetrahedron, degree);
  for (std::size_t k = 0; k < mesh.cells.size(); ++k) {
    const int cell = static_cast<int>(k);
    const auto& c = mesh.cells[k];
    const auto& mp = space.map(cell);
    EntityOps ops;
    ops.id = cell;
    ops.cells = {cell};
    ops.size = c.diameter;
    Layout lay;
    lay.add_cell(space, cell);
    const bool conductor = c.region == Region::Conductor;
    ops.kind = conductor ? TermKind::ConductorCell : TermKind::InsulatorCell;
    if (!conductor && uses_k(space, field, {cell})) lay.add_k(space);
    ops.dofs = lay.dofs;
    const int n = lay.size();
    if (conductor) {
      ops.sigma_inv = sig_inv(cell);
      ops.mu = materials.mu_of(c.material);
    }
    for (std::size_t q = 0; q < qt.size(); ++q) {
      const auto& b = qt.points[q];
      const Vec3 x = mp.to_physical(Vec3(b[1], b[2], b[3]));
      ops.points.push_back(x);
      ops.weights.push_back(qt.weights[q] * std::abs(mp.det));
      if (conductor) {
        ev.vector(cell, x);
        ops.P.push_back(ev.val.transpose());
        ops.Q.push_back(ev.curl.transpose());
      } else {
        ev.scalar(cell, x);
        Eigen::MatrixXd P = Eigen::MatrixXd::Zero(3, n), S = Eigen::MatrixXd::Zero(1, n);
        P.leftCols(ev.v.size()) = ev.g.transpose();
        S.leftCols(ev.v.size()) = ev.v.transpose();
        if (lay.k_col >= 0) P.col(lay.k_col) = field.rho[cell];
        ops.P.push_back(std::move(P));
        ops.S.push_back(std::move(S));
      }
    }
    visit(ops);
  }

  // Faces.
  std::vector<Vec3> xs;
  std::vector<double> ws;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& face = mesh.faces[f];
    if (face.kind == FaceKind::ConductorBoundary) continue;
    EntityOps ops;
    ops.id = static_cast<int>(f);
    ops.size = face.diameter;
    ops.normal = face.normal;
    triangle_points(mesh, face, degree, xs, ws);
    ops.points = xs;
    ops.weights = ws;
    const int K = face.owner, Kp = face.neighbor;
    Layout lay;
    const int cK = lay.add_cell(space, K);
    const int cKp = Kp >= 0 ? lay.add_cell(space, Kp) : -1;
    if (Kp >= 0) check_opposite_normals(face.normal, mesh.cells[Kp].normals[face.neighbor_local]);
    const Vec3 nK = face.normal;
    const Vec3 nKp = -face.normal;

    switch (face.kind) {
      case FaceKind::InteriorConductor: {
        ops.kind = TermKind::ConductorFace;
        ops.cells = {K, Kp};
        ops.s = pf.s_face[f];
        ops.sigma_inv = 0.5 * (sig_inv(K) + sig_inv(Kp));
        ops.dofs = lay.dofs;
        const int n = lay.size();
        for (const auto& x : xs) {
          Eigen::MatrixXd J = Eigen::MatrixXd::Zero(3, n), Av = Eigen::MatrixXd::Zero(3, n);
          for (int side = 0; side < 2; ++side) {
            const int cell = side == 0 ? K : Kp;
            const int col0 = side == 0 ? cK : cKp;
            ev.vector(cell, x);
            for (int i = 0; i < ev.val.rows(); ++i) {
              const Vec3 v = ev.val.row(i).transpose();
              const Vec3 zero = Vec3::Zero();
              J.col(col0 + i) += side == 0 ? tangential_jump<double>(v, nK, zero, nKp)
                                           : tangential_jump<double>(zero, nK, v, nKp);
              Av.col(col0 + i) += 0.5 * sig_inv(cell) * ev.curl.row(i).transpose();
            }
          }
          ops.P.push_back(std::move(J));
          ops.Q.push_back(std::move(Av));
        }
        break;
      }
      case FaceKind::Interface: {
        ops.kind = TermKind::InterfaceFace;
        ops.cells = {K, Kp};
        ops.s = pf.s_face[f];
        ops.sigma_inv = sig_inv(K);
        if (uses_k(space, field, {Kp})) lay.add_k(space);
        ops.dofs = lay.dofs;
        const int n = lay.size();
        for (const auto& x : xs) {
          Eigen::MatrixXd J = Eigen::MatrixXd::Zero(3, n), Av = Eigen::MatrixXd::Zero(3, n),
                          S = Eigen::MatrixXd::Zero(1, n);
          ev.vector(K, x);
          for (int i = 0; i < ev.val.rows(); ++i) {
            J.col(cK + i) = gamma_jump<double>(ev.val.row(i).transpose(), Vec3::Zero(), nK);
            Av.col(cK + i) = sig_inv(K) * ev.curl.row(i).transpose();
          }
          ev.scalar(Kp, x);
          for (int i = 0; i < ev.v.size(); ++i) {
            J.col(cKp + i) = gamma_jump<double>(Vec3::Zero(), ev.g.row(i).transpose(), nK);
            S(0, cKp + i) = ev.v[i];
          }
          if (lay.k_col >= 0) J.col(lay.k_col) = gamma_jump<double>(Vec3::Zero(), field.rho[Kp], nK);
          ops.P.push_back(std::move(J));
          ops.Q.push_back(std::move(Av));
          ops.S.push_back(std::move(S));
        }
        break;
      }
      case FaceKind::InteriorInsulator:
      case FaceKind::Outer: {
        const bool outer = face.kind == FaceKind::Outer;
        ops.kind = outer ? TermKind::OuterFace : TermKind::InsulatorFace;
        ops.cells = outer ? std::vector<int>{K} : std::vector<int>{K, Kp};
        if (outer ? uses_k(space, field, {K}) : uses_k(space, field, {K, Kp})) lay.add_k(space);
        ops.dofs = lay.dofs;
        const int n = lay.size();
        const double wt = outer ? 1.0 : 0.5;
        for (const auto& x : xs) {
          Eigen::MatrixXd Jn = Eigen::MatrixXd::Zero(3, n), B = Eigen::MatrixXd::Zero(3, n),
                          S = Eigen::MatrixXd::Zero(1, n);
          ev.scalar(K, x);
          for (int i = 0; i < ev.v.size(); ++i) {
            Jn.col(cK + i) = outer ? sigma_jump<double>(ev.v[i], nK) : normal_jump<double>(ev.v[i], nK, 0.0, nKp);
            B.col(cK + i) = wt * ev.g.row(i).transpose();
            S(0, cK + i) = ev.v[i];
          }
          if (!outer) {
            ev.scalar(Kp, x);
            for (int i = 0; i < ev.v.size(); ++i) {
              Jn.col(cKp + i) = normal_jump<double>(0.0, nK, ev.v[i], nKp);
              B.col(cKp + i) = wt * ev.g.row(i).transpose();
            }
          }
          if (lay.k_col >= 0)
            B.col(lay.k_col) = outer ? Vec3(field.rho[K]) : average<double>(field.rho[K], field.rho[Kp]);
          ops.P.push_back(std::move(Jn));
          ops.Q.push_back(std::move(B));
          ops.S.push_back(std::move(S));
        }
        break;
      }
      case FaceKind::ConductorBoundary:
        break;
    }
    visit(ops);
  }

  // Interface edges.
  const auto& qs = quadrature(EntityKind::Segment, degree);
  for (std::size_t e = 0; e < mesh.interface_edges.size(); ++e) {
    const auto& edge = mesh.interface_edges[e];
    const auto& T = mesh.faces[edge.triangles[0]];
    const auto& Tp = mesh.faces[edge.triangles[1]];
    const int Ke = T.owner, Kpe = Tp.owner, Ie = T.neighbor, Ipe = Tp.neighbor;
    EntityOps ops;
    ops.kind = TermKind::Edge;
    ops.id = static_cast<int>(e);
    ops.cells = {Ke, Kpe, Ie, Ipe};
    ops.size = edge.length;
    ops.s = pf.s_edge[e];
    ops.sigma_inv = 0.5 * (sig_inv(Ke) + sig_inv(Kpe));
    Layout lay;
    const int cKe = lay.add_cell(space, Ke);
    const int cKpe = lay.add_cell(space, Kpe);
    const int cIe = lay.add_cell(space, Ie);
    const int cIpe = lay.add_cell(space, Ipe);
    ops.dofs = lay.dofs;
    const int n = lay.size();
    const Vec3& a = mesh.vertices[edge.vertices[0]];
    const Vec3& b = mesh.vertices[edge.vertices[1]];
    for (std::size_t q = 0; q < qs.size(); ++q) {
      const Vec3 x = qs.points[q][0] * a + qs.points[q][1] * b;
      ops.points.push_back(x);
      ops.weights.push_back(qs.weights[q] * edge.length);
      Eigen::MatrixXd Jt = Eigen::MatrixXd::Zero(3, n), Av = Eigen::MatrixXd::Zero(3, n);
      ev.scalar(Ie, x);
      for (int i = 0; i < ev.v.size(); ++i)
        Jt.col(cIe + i) += edge_jump<double>(ev.v[i], edge.tangents[0], 0.0, edge.tangents[1]);
      ev.scalar(Ipe, x);
      for (int i = 0; i < ev.v.size(); ++i)
        Jt.col(cIpe + i) += edge_jump<double>(0.0, edge.tangents[0], ev.v[i], edge.tangents[1]);
      ev.vector(Ke, x);
      for (int i = 0; i < ev.curl.rows(); ++i) Av.col(cKe + i) += 0.5 * sig_inv(Ke) * ev.curl.row(i).transpose();
      ev.vector(Kpe, x);
      for (int i = 0; i < ev.curl.rows(); ++i) Av.col(cKpe + i) += 0.5 * sig_inv(Kpe) * ev.curl.row(i).transpose();
      ops.P.push_back(std::move(Jt));
      ops.Q.push_back(std::move(Av));
    }
    visit(ops);
  }
}

namespace {

using Triplets = std::vector<Eigen::Triplet<Complex>>;

void scatter(const std::vector<int>& dofs, const Eigen::MatrixXcd& M, Triplets& t) {
  for (int j = 0; j < M.cols(); ++j)
    for (int i = 0; i < M.rows(); ++i)
      if (M(i, j) != Complex(0.0)) t.emplace_back(dofs[i], dofs[j], M(i, j));
}

}  // namespace

SparseMatrixC assemble_Ah(const DgSpace& space, const HarmonicField& field, const MaterialConfig& materials,
                          const PenaltyConfig& penalties) {
  materials.validate();
  penalties.validate();
  if (space.has_k() == field.empty()) throw std::invalid_argument("k slot must be present iff the generator is nonzero");
  const double omega = materials.omega, mu0 = materials.mu0;
  Triplets trip;
  for_each_entity(space, field, materials, 2 * space.degree() + 2, [&](const EntityOps& ops) {
    const int n = static_cast<int>(ops.dofs.size());
    Eigen::MatrixXd PP = Eigen::MatrixXd::Zero(n, n), QQ = Eigen::MatrixXd::Zero(n, n),
                    X = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t q = 0; q < ops.weights.size(); ++q) {
      const double w = ops.weights[q];
      PP.noalias() += w * ops.P[q].transpose() * ops.P[q];
      if (!ops.Q.empty()) {
        if (ops.kind == TermKind::ConductorCell)
          QQ.noalias() += w * ops.Q[q].transpose() * ops.Q[q];
        else
          X.noalias() += w * ops.Q[q].transpose() * ops.P[q];
      }
    }
    Eigen::MatrixXcd M(n, n);
    const Eigen::MatrixXd Xs = X + X.transpose();
    switch (ops.kind) {
      case TermKind::ConductorCell:
        M = Complex(0.0, omega * ops.mu) * PP.cast<Complex>() + (ops.sigma_inv * QQ).cast<Complex>();
        break;
      case TermKind::InsulatorCell:
        M = Complex(0.0, omega * mu0) * PP.cast<Complex>();
        break;
      case TermKind::ConductorFace:
      case TermKind::InterfaceFace:
        M = (Xs + penalties.a_C / (ops.s * ops.size) * PP).cast<Complex>();
        break;
      case TermKind::InsulatorFace:
      case TermKind::OuterFace:
        M = (penalties.a_I / (omega * mu0 * ops.size) * PP).cast<Complex>() - Complex(0.0, omega * mu0) * Xs.cast<Complex>();
        break;
      case TermKind::Edge:
        M = (-Xs + penalties.alpha / (ops.s * ops.size * ops.size) * PP).cast<Complex>();
        break;
    }
    scatter(ops.dofs, M, trip);
  });
  SparseMatrixC A(space.size(), space.size());
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  return A;
}

VectorXc assemble_Lh(const DgSpace& space, const HarmonicField& field, const MaterialConfig& materials,
                     const SourceField& j) {
  VectorXc b = VectorXc::Zero(space.size());
  if (!j) return b;
  for_each_entity(space, field, materials, 2 * space.degree() + 2, [&](const EntityOps& ops) {
    double sign = 1.0;
    switch (ops.kind) {
      case TermKind::ConductorCell:
        for (std::size_t q = 0; q < ops.weights.size(); ++q) {
          const CVec3 jj = j(ops.points[q]) * (ops.weights[q] * ops.sigma_inv);
          for (std::size_t i = 0; i < ops.dofs.size(); ++i)
            b[ops.dofs[i]] += bdot(jj, Vec3(ops.Q[q].col(i)));
        }
        return;
      case TermKind::Edge:
        sign = -1.0;
        [[fallthrough]];
      case TermKind::ConductorFace:
      case TermKind::InterfaceFace:
        for (std::size_t q = 0; q < ops.weights.size(); ++q) {
          const CVec3 jj = j(ops.points[q]) * (sign * ops.weights[q] * ops.sigma_inv);
          for (std::size_t i = 0; i < ops.dofs.size(); ++i)
            b[ops.dofs[i]] += (ops.P[q].col(i).cast<Complex>().transpose() * jj)(0);
        }
        return;
      default:
        return;
    }
  });
  return b;
}

VectorXc assemble_generalized_load(const DgSpace& space, const HarmonicField& field,
                                   const MaterialConfig& materials, const PenaltyConfig& penalties,
                                   const SourceBundle& bundle) {
  VectorXc b = VectorXc::Zero(space.size());
  if (bundle.empty()) return b;
  const double omega = materials.omega, mu0 = materials.mu0;
  const int deg = 2 * space.degree() + 2;
  for_each_entity(space, field, materials, deg, [&](const EntityOps& ops) {
    const std::size_t n = ops.dofs.size();
    for (std::size_t q = 0; q < ops.weights.size(); ++q) {
      const double w = ops.weights[q];
      const Vec3& x = ops.points[q];
      switch (ops.kind) {
        case TermKind::ConductorCell:
          if (bundle.f_C) {
            const CVec3 f = bundle.f_C(x) * w;
            for (std::size_t i = 0; i < n; ++i) b[ops.dofs[i]] += (ops.P[q].col(i).cast<Complex>().transpose() * f)(0);
          }
          break;
        case TermKind::InsulatorCell:
          if (bundle.f_I) {
            const Complex f = bundle.f_I(x, ops.cells[0]) * w;
            for (std::size_t i = 0; i < n; ++i) b[ops.dofs[i]] += f * ops.S[q](0, i);
          }
          break;
        case TermKind::InterfaceFace:
          if (bundle.r_Gamma) {
            const Complex r = bundle.r_Gamma(x, ops.cells[1], ops.normal) * w;
            for (std::size_t i = 0; i < n; ++i) b[ops.dofs[i]] += r * ops.S[q](0, i);
          }
          break;
        case TermKind::OuterFace:
          if (bundle.psi_Sigma) {
            const Complex psi = bundle.psi_Sigma(x) * w;
            const double pen = penalties.a_I / (omega * mu0 * ops.size);
            for (std::size_t i = 0; i < n; ++i)
              b[ops.dofs[i]] += psi * (pen * ops.S[q](0, i) - Complex(0.0, omega * mu0) * ops.Q[q].col(i).dot(ops.normal));
          }
          break;
        default:
          break;
      }
    }
  });
  if (space.has_k()) b[space.k_index()] += bundle.g;
  return b;
}

AssembledSystem assemble_system(const DgSpace& space, const HarmonicField& field, const MaterialConfig& materials,
                                const PenaltyConfig& penalties, const SourceField& j, const SourceBundle& bundle) {
  AssembledSystem sys;
  sys.A = assemble_Ah(space, field, materials, penalties);
  sys.b = assemble_Lh(space, field, materials, j) + assemble_generalized_load(space, field, materials, penalties, bundle);
  sys.has_k = space.has_k();
  sys.k_index = space.k_index();
  return sys;
}

}  // namespace eddydg
