#include "eddydg/mms.hpp"

#include <cmath>
#include <numbers>

namespace eddydg {

namespace {

using std::numbers::pi;

struct Potential {
  std::function<double(const Vec3&)> value;
  std::function<Vec3(const Vec3&)> grad;
  std::function<double(const Vec3&)> laplacian;
};

ExactSolution gradient_entry(std::string name, const Potential& chi) {
  ExactSolution e;
  e.name = std::move(name);
  e.h = [g = chi.grad](const Vec3& x) { return CVec3(g(x).cast<Complex>()); };
  e.curl_h = [](const Vec3&) { return CVec3::Zero(); };
  e.curl_curl_h = e.curl_h;
  e.psi = [v = chi.value](const Vec3& x, int) { return Complex(v(x)); };
  e.grad_psi = [g = chi.grad](const Vec3& x, int) { return CVec3(g(x).cast<Complex>()); };
  e.H = e.grad_psi;
  e.div_H = [l = chi.laplacian](const Vec3& x, int) { return Complex(l(x)); };
  return e;
}

Potential cosine_potential() {
  const double a = pi / 2;
  Potential p;
  p.value = [a](const Vec3& x) { return std::cos(a * x[0]) * std::cos(a * x[1]) * std::cos(a * x[2]); };
  p.grad = [a](const Vec3& x) {
    const double cx = std::cos(a * x[0]), cy = std::cos(a * x[1]), cz = std::cos(a * x[2]);
    const double sx = std::sin(a * x[0]), sy = std::sin(a * x[1]), sz = std::sin(a * x[2]);
    return Vec3(-a * sx * cy * cz, -a * cx * sy * cz, -a * cx * cy * sz);
  };
  p.laplacian = [a, v = p.value](const Vec3& x) { return -3.0 * a * a * v(x); };
  return p;
}

// Smooth step: 1 for |t| <= 0.2, 0 for |t| >= 0.6, C^2 in between.
struct Window {
  double v, d1, d2;
};

Window window(double t) {
  const double a = std::abs(t);
  if (a <= 0.2) return {1.0, 0.0, 0.0};
  if (a >= 0.6) return {0.0, 0.0, 0.0};
  const double u = (0.6 - a) / 0.4;
  const double s = u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
  const double s1 = 30.0 * u * u * (1.0 - u) * (1.0 - u);
  const double s2 = 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u);
  const double sgn = t > 0 ? 1.0 : -1.0;
  return {s, -sgn * s1 / 0.4, s2 / 0.16};
}

struct Phi {
  double v, x, y, xx, yy;
};

Phi phi_at(const Vec3& p) {
  const Window bx = window(p[0]), by = window(p[1]);
  return {bx.v * by.v, bx.d1 * by.v, bx.v * by.d1, bx.d2 * by.v, bx.v * by.d2};
}

double inf_norm(const CVec3& v) { return v.cwiseAbs().maxCoeff(); }

}  // namespace

ExactSolution mms_zero() {
  Potential p;
  p.value = [](const Vec3&) { return 0.0; };
  p.grad = [](const Vec3&) { return Vec3::Zero().eval(); };
  p.laplacian = p.value;
  return gradient_entry("zero", p);
}

ExactSolution mms_gradient_pair() { return gradient_entry("gradient_pair", cosine_potential()); }

ExactSolution mms_polynomial_pair(int m) {
  if (m < 1 || m > 3) throw std::invalid_argument("polynomial pair needs 1 <= m <= 3");
  Potential p;
  p.value = [m](const Vec3& x) {
    double v = 0.3 + x[0] + 2.0 * x[1] - x[2];
    if (m >= 2) v += 0.5 * x[0] * x[1] - 0.25 * x[2] * x[2];
    if (m >= 3) v += 0.1 * x[0] * x[1] * x[2] + 0.2 * x[0] * x[0] * x[0];
    return v;
  };
  p.grad = [m](const Vec3& x) {
    Vec3 g(1.0, 2.0, -1.0);
    if (m >= 2) g += Vec3(0.5 * x[1], 0.5 * x[0], -0.5 * x[2]);
    if (m >= 3) g += Vec3(0.1 * x[1] * x[2] + 0.6 * x[0] * x[0], 0.1 * x[0] * x[2], 0.1 * x[0] * x[1]);
    return g;
  };
  p.laplacian = [m](const Vec3& x) {
    double l = 0.0;
    if (m >= 2) l += -0.5;
    if (m >= 3) l += 1.2 * x[0];
    return l;
  };
  ExactSolution e = gradient_entry("polynomial_pair", p);
  e.satisfies_sigma = false;
  return e;
}

ExactSolution mms_windowed() {
  Potential p;
  auto w = [](const Vec3& x) { return (1 - x[0] * x[0]) * (1 - x[1] * x[1]) * (1 - x[2] * x[2]); };
  auto gw = [](const Vec3& x) {
    const double a = 1 - x[0] * x[0], b = 1 - x[1] * x[1], c = 1 - x[2] * x[2];
    return Vec3(-2 * x[0] * b * c, -2 * x[1] * a * c, -2 * x[2] * a * b);
  };
  const Vec3 gl(1.0, 2.0, -1.0);
  p.value = [w, gl](const Vec3& x) { return w(x) * gl.dot(x); };
  p.grad = [w, gw, gl](const Vec3& x) { return Vec3(gw(x) * gl.dot(x) + w(x) * gl); };
  p.laplacian = [gw, gl](const Vec3& x) {
    const double a = 1 - x[0] * x[0], b = 1 - x[1] * x[1], c = 1 - x[2] * x[2];
    const double lw = -2.0 * (b * c + a * c + a * b);
    return lw * gl.dot(x) + 2.0 * gw(x).dot(gl);
  };
  ExactSolution e = gradient_entry("windowed", p);
  return e;
}

ExactSolution mms_torus_k(const Mesh& mesh, const HarmonicField& field) {
  if (field.empty()) throw std::invalid_argument("torus entry needs a nontrivial harmonic field");
  for (int f : field.cut.faces)
    if (std::abs(mesh.faces[f].centroid[2] - 0.2) > 1e-9)
      throw ConfigError("torus_k needs the cut on the disk z = 0.2 (supply the matching cut file)");
  const Complex k(0.7, 0.3);
  const Potential chi = cosine_potential();
  ExactSolution e;
  e.name = "torus_k";
  e.k = k;

  auto w = [](const Vec3& x) {
    const Phi f = phi_at(x);
    return Vec3(2 * x[2] * f.x, 2 * x[2] * f.y, -0.5 * f.v);
  };
  auto curl_w = [](const Vec3& x) {
    const Phi f = phi_at(x);
    return Vec3(-2.5 * f.y, 2.5 * f.x, 0.0);
  };
  e.h = [chi, w, k](const Vec3& x) { return CVec3(chi.grad(x).cast<Complex>() + k * w(x).cast<Complex>()); };
  e.curl_h = [curl_w, k](const Vec3& x) { return CVec3(k * curl_w(x).cast<Complex>()); };
  e.curl_curl_h = [k](const Vec3& x) {
    const Phi f = phi_at(x);
    return CVec3(0.0, 0.0, k * 2.5 * (f.xx + f.yy));
  };

  // q = eta(z) phi, with the branch of eta fixed by the cell: it jumps by one
  // across the cut disk at z = 0.2.
  auto eta = [&mesh](int cell, double z) {
    const bool above = mesh.cells[cell].centroid[2] > 0.2;
    return above ? 0.5 * (1.0 - z) : -0.5 * (1.0 + z);
  };
  auto grad_q = [eta](const Vec3& x, int cell) {
    const Phi f = phi_at(x);
    const double h = eta(cell, x[2]);
    return Vec3(h * f.x, h * f.y, -0.5 * f.v);
  };
  auto p_disc = [&mesh, &field](const Vec3& x, int cell) {
    const auto& c = mesh.cells[cell];
    const Vec3 x0 = mesh.vertices[c.vertices[0]];
    Eigen::Matrix3d J;
    for (int i = 0; i < 3; ++i) J.col(i) = mesh.vertices[c.vertices[i + 1]] - x0;
    const Vec3 l = J.partialPivLu().solve(x - x0);
    const auto& p = field.potential[cell];
    return p[0] * (1.0 - l.sum()) + p[1] * l[0] + p[2] * l[1] + p[3] * l[2];
  };
  e.psi = [chi, eta, p_disc, k](const Vec3& x, int cell) {
    return Complex(chi.value(x)) + k * (eta(cell, x[2]) * phi_at(x).v - p_disc(x, cell));
  };
  e.grad_psi = [chi, grad_q, k, &field](const Vec3& x, int cell) {
    return CVec3(chi.grad(x).cast<Complex>() + k * (grad_q(x, cell) - field.rho[cell]).cast<Complex>());
  };
  e.H = [chi, grad_q, k](const Vec3& x, int cell) {
    return CVec3(chi.grad(x).cast<Complex>() + k * grad_q(x, cell).cast<Complex>());
  };
  e.div_H = [chi, eta, k](const Vec3& x, int cell) {
    const Phi f = phi_at(x);
    return Complex(chi.laplacian(x)) + k * eta(cell, x[2]) * (f.xx + f.yy);
  };
  // The window is C^2, so H^3 in the conductor; beyond the rates tested.
  e.regularity = 3.0;
  return e;
}

std::vector<ExactSolution> mms_catalog(int m) {
  return {mms_zero(), mms_gradient_pair(), mms_polynomial_pair(m), mms_windowed()};
}

ExactSolution mms_by_name(const std::string& name, int m, const Mesh* mesh, const HarmonicField* field) {
  if (name == "torus_k") {
    if (!mesh || !field) throw ConfigError("torus_k needs a mesh with a cut");
    return mms_torus_k(*mesh, *field);
  }
  for (auto& e : mms_catalog(m))
    if (e.name == name) return e;
  throw ConfigError("unknown exact solution '" + name + "'");
}

MmsLoad mms_sources(const ExactSolution& exact, const DgSpace& space, const HarmonicField& field,
                    const MaterialConfig& materials) {
  const Mesh& mesh = space.mesh();
  const double omega = materials.omega, mu0 = materials.mu0;

  double sigma = -1.0, mu = -1.0;
  for (const auto& c : mesh.cells) {
    if (c.region != Region::Conductor) continue;
    const double s = materials.sigma_of(c.material), u = materials.mu_of(c.material);
    if (sigma < 0.0) {
      sigma = s;
      mu = u;
    } else if (s != sigma || u != mu) {
      throw ConfigError("manufactured solutions need uniform conductor materials");
    }
  }
  if (sigma < 0.0) {
    sigma = materials.default_sigma;
    mu = materials.default_mu;
  }

  const int deg = 2 * space.degree() + 4;
  const auto& qf = quadrature(EntityKind::Triangle, deg);
  for (const auto& face : mesh.faces) {
    if (face.kind != FaceKind::Interface) continue;
    const Vec3& n = face.normal;
    for (const auto& b : qf.points) {
      const Vec3 x = b[0] * mesh.vertices[face.vertices[0]] + b[1] * mesh.vertices[face.vertices[1]] +
                     b[2] * mesh.vertices[face.vertices[2]];
      const CVec3 h = exact.h(x), H = exact.H(x, face.neighbor);
      const double scale = 1.0 + inf_norm(h) + inf_norm(H);
      const CVec3 nc = n.cast<Complex>();
      const double tang = inf_norm(CVec3(h.cross(nc) - H.cross(nc)));
      const double norm = std::abs(mu * bdot(h, n) - mu0 * bdot(H, n));
      if (tang > 1e-9 * scale || norm > 1e-9 * scale * std::max(mu, mu0))
        throw ConfigError("exact solution '" + exact.name + "' violates the transmission conditions on Gamma");
    }
  }

  MmsLoad out;
  const Complex iw(0.0, omega);
  const double sinv = 1.0 / sigma;
  out.bundle.f_C = [=](const Vec3& x) { return CVec3(iw * mu * exact.h(x) + sinv * exact.curl_curl_h(x)); };
  out.bundle.f_I = [=](const Vec3& x, int cell) { return -iw * mu0 * exact.div_H(x, cell); };
  out.bundle.r_Gamma = [=](const Vec3& x, int cell, const Vec3& n) {
    return -sinv * bdot(exact.curl_curl_h(x), n) - iw * mu0 * bdot(exact.H(x, cell), n);
  };
  if (!exact.satisfies_sigma) out.bundle.psi_Sigma = [=](const Vec3& x) { return exact.psi(x, -1); };

  if (!field.empty()) {
    Complex g = 0.0;
    const auto& qt = quadrature(EntityKind::Tetrahedron, deg);
    for (std::size_t k = 0; k < mesh.cells.size(); ++k) {
      const auto& c = mesh.cells[k];
      if (c.region != Region::Insulator || field.rho[k].squaredNorm() == 0.0) continue;
      const auto& mp = space.map(static_cast<int>(k));
      for (std::size_t q = 0; q < qt.size(); ++q) {
        const auto& b = qt.points[q];
        const Vec3 x = mp.to_physical(Vec3(b[1], b[2], b[3]));
        g += qt.weights[q] * std::abs(mp.det) * iw * mu0 *
             bdot(exact.H(x, static_cast<int>(k)), field.rho[k]);
      }
    }
    for (const auto& face : mesh.faces) {
      if (face.kind != FaceKind::Interface || field.rho[face.neighbor].squaredNorm() == 0.0) continue;
      const Vec3 t = field.rho[face.neighbor].cross(face.normal);
      for (std::size_t q = 0; q < qf.size(); ++q) {
        const auto& b = qf.points[q];
        const Vec3 x = b[0] * mesh.vertices[face.vertices[0]] + b[1] * mesh.vertices[face.vertices[1]] +
                       b[2] * mesh.vertices[face.vertices[2]];
        g -= qf.weights[q] * 2.0 * face.area * sinv * bdot(exact.curl_h(x), t);
      }
    }
    out.bundle.g = g;
  }
  return out;
}

double derivative_consistency(const ExactSolution& exact, const std::vector<Vec3>& conductor_points,
                              const std::vector<std::pair<Vec3, int>>& insulator_points) {
  const double d = 1e-5;
  const Vec3 E[3] = {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};

  auto fd_curl = [&](const std::function<CVec3(const Vec3&)>& f, const Vec3& x) {
    Eigen::Matrix3cd D;  // D(i, j) = d f_i / d x_j
    for (int j = 0; j < 3; ++j) D.col(j) = (f(x + d * E[j]) - f(x - d * E[j])) / (2 * d);
    return CVec3(D(2, 1) - D(1, 2), D(0, 2) - D(2, 0), D(1, 0) - D(0, 1));
  };

  struct Acc {
    double err = 0.0, scale = 0.0;
    void add(double e, double s) {
      err = std::max(err, e);
      scale = std::max(scale, s);
    }
    double rel() const { return err == 0.0 ? 0.0 : err / std::max(scale, 1e-300); }
  } curl, curlcurl, grad, div;

  for (const auto& x : conductor_points) {
    const CVec3 c = exact.curl_h(x), cc = exact.curl_curl_h(x);
    curl.add(inf_norm(CVec3(c - fd_curl(exact.h, x))), inf_norm(c) + inf_norm(exact.h(x)));
    curlcurl.add(inf_norm(CVec3(cc - fd_curl(exact.curl_h, x))), inf_norm(cc) + inf_norm(c));
  }
  for (const auto& [x, cell] : insulator_points) {
    CVec3 g;
    Complex dv = 0.0;
    for (int j = 0; j < 3; ++j) {
      g[j] = (exact.psi(x + d * E[j], cell) - exact.psi(x - d * E[j], cell)) / (2 * d);
      dv += (exact.H(x + d * E[j], cell)[j] - exact.H(x - d * E[j], cell)[j]) / (2 * d);
    }
    const CVec3 ga = exact.grad_psi(x, cell);
    grad.add(inf_norm(CVec3(ga - g)), inf_norm(ga) + std::abs(exact.psi(x, cell)));
    div.add(std::abs(exact.div_H(x, cell) - dv), std::abs(exact.div_H(x, cell)) + inf_norm(exact.H(x, cell)));
  }
  return std::max({curl.rel(), curlcurl.rel(), grad.rel(), div.rel()});
}

}  // namespace eddydg
