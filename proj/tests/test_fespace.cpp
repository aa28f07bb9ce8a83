#include "doctest.h"
#include "fixtures.hpp"

#include "eddydg/fespace.hpp"
#include "eddydg/meshgen.hpp"

#include <cmath>
#include <random>

using namespace eddydg;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// Exact integral of x^a y^b z^c over the reference simplex of dimension dim.
double simplex_monomial(int dim, int a, int b, int c) {
  return factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + dim);
}

double integrate(const QuadratureRule& q, int a, int b, int c) {
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const auto& p = q.points[i];
    s += q.weights[i] * std::pow(p[1], a) * std::pow(p[2], b) * std::pow(p[3], c);
  }
  return s;
}

}  // namespace

TEST_CASE("quadrature rules") {
  const auto& t1 = quadrature(EntityKind::Tetrahedron, 1);
  CHECK(t1.size() == 1);
  CHECK(t1.weights[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  const auto& tri2 = quadrature(EntityKind::Triangle, 2);
  double sum = 0.0;
  for (double w : tri2.weights) sum += w;
  CHECK(sum == doctest::Approx(0.5).epsilon(1e-14));
  const auto& t3 = quadrature(EntityKind::Tetrahedron, 3);
  CHECK(integrate(t3, 2, 1, 0) == doctest::Approx(1.0 / 360.0).epsilon(1e-14));
  const auto& t4 = quadrature(EntityKind::Tetrahedron, 4);
  CHECK(integrate(t4, 2, 1, 1) == doctest::Approx(1.0 / 2520.0).epsilon(1e-14));
  CHECK_THROWS_AS(quadrature(EntityKind::Tetrahedron, kMaxQuadratureDegree + 1), std::invalid_argument);

  for (int d = 0; d <= 10; ++d) {
    const auto& tet = quadrature(EntityKind::Tetrahedron, d);
    const auto& tri = quadrature(EntityKind::Triangle, d);
    const auto& seg = quadrature(EntityKind::Segment, d);
    for (int a = 0; a <= d; ++a) {
      double s = 0.0;
      for (std::size_t i = 0; i < seg.size(); ++i) s += seg.weights[i] * std::pow(seg.points[i][1], a);
      CHECK(s == doctest::Approx(1.0 / (a + 1)).epsilon(1e-13));
      for (int b = 0; a + b <= d; ++b) {
        double st = 0.0;
        for (std::size_t i = 0; i < tri.size(); ++i)
          st += tri.weights[i] * std::pow(tri.points[i][1], a) * std::pow(tri.points[i][2], b);
        CHECK(st == doctest::Approx(simplex_monomial(2, a, b, 0)).epsilon(1e-13));
        for (int c = 0; a + b + c <= d; ++c)
          CHECK(integrate(tet, a, b, c) == doctest::Approx(simplex_monomial(3, a, b, c)).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("Lagrange basis: nodal property and partition of unity") {
  for (int p = 1; p <= 4; ++p) {
    const auto basis = lagrange_basis(p);
    const auto nodes = lattice(p);
    Eigen::VectorXd v;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      basis.eval_values(Vec3(nodes[i][1], nodes[i][2], nodes[i][3]) / p, v);
      for (std::size_t j = 0; j < nodes.size(); ++j) CHECK(std::abs(v[j] - (i == j ? 1.0 : 0.0)) < 1e-12);
    }
    basis.eval_values(Vec3(0.1, 0.27, 0.33), v);
    CHECK(std::abs(v.sum() - 1.0) < 1e-12);
  }
}

TEST_CASE("enriched basis spans P_{m+1} traces") {
  for (int m = 1; m <= 3; ++m) {
    const int npm = (m + 1) * (m + 2) * (m + 3) / 6;
    for (int face = 0; face < 4; ++face) {
      std::vector<int> chosen;
      const auto b = enriched_basis(m, 1u << face, &chosen);
      CHECK(static_cast<int>(chosen.size()) == m + 2);
      CHECK(b.size() == npm + m + 2);
      CHECK(trace_rank(b, face, m + 1) == (m + 2) * (m + 3) / 2);
      Eigen::VectorXd v;
      b.eval_values(Vec3(0.2, 0.3, 0.1), v);
      CHECK(std::abs(v.head(npm).sum() - 1.0) < 1e-12);
    }
    const auto two = enriched_basis(m, 0b0011);
    CHECK(trace_rank(two, 0, m + 1) == (m + 2) * (m + 3) / 2);
    CHECK(trace_rank(two, 1, m + 1) == (m + 2) * (m + 3) / 2);
  }
}

TEST_CASE("dof counts") {
  const Mesh torus = load_msh(testdata::fixture("torus_n5.msh"));
  for (int m = 1; m <= 2; ++m) {
    const DgSpace space(torus, m, true);
    const int np = (m + 1) * (m + 2) * (m + 3) / 6;
    int nc = 0, ni = 0;
    for (std::size_t k = 0; k < torus.cells.size(); ++k) {
      const int cell = static_cast<int>(k);
      if (torus.cells[k].region == Region::Conductor) {
        CHECK(space.local_size(cell) == 3 * np);
        nc += 3 * np;
      } else {
        int gamma_faces = 0;
        for (int f : torus.cells[k].faces) gamma_faces += torus.faces[f].kind == FaceKind::Interface;
        if (gamma_faces == 1) CHECK(space.local_size(cell) == np + m + 2);
        if (gamma_faces == 0) CHECK(space.local_size(cell) == np);
        ni += space.local_size(cell);
      }
    }
    CHECK(space.conductor_size() == nc);
    CHECK(space.insulator_size() == ni);
    CHECK(space.size() == nc + ni + 1);
    CHECK(space.k_index() == nc + ni);
  }
  CHECK(DgSpace(torus, 1, false).size() == DgSpace(torus, 1, true).size() - 1);
  CHECK_THROWS_AS(DgSpace(torus, 0, false), std::invalid_argument);
  CHECK(lagrange_basis(1).size() * 3 == 12);
  CHECK(lagrange_basis(2).size() == 10);
}

TEST_CASE("basis evaluation: curls and finite-difference gradients") {
  const Mesh mesh = load_msh(testdata::fixture("cube_n4.msh"));
  const DgSpace space(mesh, 2, false);
  int cond = -1, ins = -1;
  for (std::size_t k = 0; k < mesh.cells.size(); ++k) {
    if (mesh.cells[k].region == Region::Conductor && cond < 0) cond = static_cast<int>(k);
    if (mesh.cells[k].region == Region::Insulator && space.gamma_mask(static_cast<int>(k)) && ins < 0)
      ins = static_cast<int>(k);
  }
  REQUIRE(cond >= 0);
  REQUIRE(ins >= 0);
  const Vec3 x = mesh.cells[ins].centroid;

  // Random combination: FD gradient vs analytic.
  std::mt19937 rng(7);
  std::normal_distribution<double> nd;
  Eigen::VectorXd coef(space.local_size(ins));
  for (auto& c : coef) c = nd(rng);
  Eigen::VectorXd v;
  MatrixX3 g;
  space.eval_scalar(ins, x, v, g);
  const Vec3 grad = g.transpose() * coef;
  const double step = 1e-5;
  for (int d = 0; d < 3; ++d) {
    Eigen::VectorXd vp, vm;
    MatrixX3 gp;
    space.eval_scalar(ins, x + step * Vec3::Unit(d), vp, gp);
    space.eval_scalar(ins, x - step * Vec3::Unit(d), vm, gp);
    const double fd = (vp - vm).dot(coef) / (2 * step);
    CHECK(std::abs(fd - grad[d]) <= 1e-6 * std::max(1.0, std::abs(grad[d])));
  }
  // Constant combination: zero gradient.
  Eigen::VectorXd ones = Eigen::VectorXd::Zero(space.local_size(ins));
  ones.head(space.pm_size()).setOnes();
  CHECK((g.transpose() * ones).norm() < 1e-10);

  // v = (0, 0, y): curl = (1, 0, 0).
  VectorXc w = elementwise_interpolate(space, [](const Vec3& p) { return CVec3(0, 0, p.y()); }, {});
  MatrixX3 val, curl;
  space.eval_vector(cond, mesh.cells[cond].centroid, val, curl);
  const Eigen::VectorXcd loc = w.segment(space.offset(cond), space.local_size(cond));
  const CVec3 cv = curl.transpose().cast<Complex>() * loc;
  CHECK((cv - CVec3(1, 0, 0)).norm() < 1e-12);
  const BasisValues bv = eval_basis(space, cond, {mesh.cells[cond].centroid});
  CHECK(bv.curls.size() == 1);
  CHECK_THROWS(eval_basis(space, -1, {}));
}

TEST_CASE("interpolation") {
  const Mesh mesh = load_msh(testdata::fixture("cube_n4.msh"));
  const DgSpace space(mesh, 1, false);
  const VectorXc one = elementwise_interpolate(space, {}, [](const Vec3&) { return Complex(1.0); });
  for (std::size_t k = 0; k < mesh.cells.size(); ++k) {
    if (mesh.cells[k].region != Region::Insulator) continue;
    const int cell = static_cast<int>(k);
    for (int i = 0; i < space.pm_size(); ++i) CHECK(one[space.offset(cell) + i] == Complex(1.0));
  }
  const VectorXc lin = elementwise_interpolate(space, [](const Vec3& p) { return CVec3(p.x(), 0, 0); }, {});
  for (std::size_t k = 0; k < mesh.cells.size(); ++k) {
    if (mesh.cells[k].region != Region::Conductor) continue;
    const int cell = static_cast<int>(k);
    const auto& q = quadrature(EntityKind::Tetrahedron, 4);
    for (const auto& b : q.points) {
      const Vec3 p = space.map(cell).to_physical(Vec3(b[1], b[2], b[3]));
      MatrixX3 val, curl;
      space.eval_vector(cell, p, val, curl);
      const CVec3 u = val.transpose().cast<Complex>() * lin.segment(space.offset(cell), space.local_size(cell));
      CHECK(std::abs(u[0] - p.x()) < 1e-12);
    }
  }

  // sin(x) interpolation error at centroids scales like h^2.
  auto centroid_error = [](int n) {
    const Mesh m = make_cube_mesh(n);
    const DgSpace s(m, 1, false);
    const VectorXc x = elementwise_interpolate(s, {}, [](const Vec3& p) { return Complex(std::sin(p.x())); });
    double err = 0.0;
    for (std::size_t k = 0; k < m.cells.size(); ++k) {
      if (m.cells[k].region != Region::Insulator) continue;
      Eigen::VectorXd v;
      MatrixX3 g;
      s.eval_scalar(static_cast<int>(k), m.cells[k].centroid, v, g);
      const Complex u = v.cast<Complex>().dot(x.segment(s.offset(static_cast<int>(k)), v.size()).conjugate());
      err = std::max(err, std::abs(std::conj(u) - std::sin(m.cells[k].centroid.x())));
    }
    return err;
  };
  const double ratio = centroid_error(4) / centroid_error(8);
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}
