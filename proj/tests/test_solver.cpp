#include "doctest.h"
#include "fixtures.hpp"

#include "eddydg/meshgen.hpp"
#include "eddydg/solver.hpp"

#include <cmath>

using namespace eddydg;

namespace {

SparseMatrixC dense_to_sparse(const Eigen::MatrixXcd& D) {
  SparseMatrixC S = D.sparseView();
  S.makeCompressed();
  return S;
}

}  // namespace

TEST_CASE("LU wrapper solves a small complex system") {
  Eigen::MatrixXcd D(3, 3);
  D << Complex(4, 1), 1, 0, 1, Complex(3, -2), 1, 0, 1, Complex(2, 0.5);
  const SparseLU lu(dense_to_sparse(D));
  const VectorXc b = VectorXc::LinSpaced(3, 1.0, 3.0);
  const VectorXc x = lu.solve(b);
  CHECK((D * x - b).norm() < 1e-14);
  CHECK(lu.rcond() > 0.0);
}

TEST_CASE("singular and mismatched systems are rejected") {
  Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(2, 2);
  D(0, 0) = 1.0;
  D(0, 1) = 1.0;
  D(1, 0) = 1.0;
  D(1, 1) = 1.0;
  CHECK_THROWS_AS(SparseLU(dense_to_sparse(D)), SolverError);
  AssembledSystem sys;
  sys.A = dense_to_sparse(Eigen::MatrixXcd::Identity(2, 2));
  sys.b = VectorXc::Ones(3);
  CHECK_THROWS_AS(solve(sys, 2, 0), SolverError);
}

TEST_CASE("bordered solve agrees with a dense solve") {
  Eigen::MatrixXcd D(4, 4);
  D << Complex(5, 1), 1, 0, Complex(0.5, 1), 1, Complex(4, 1), 1, 2, 0, 1, Complex(3, 1), 1, Complex(0.5, 1), 2, 1,
      Complex(1, 2);
  AssembledSystem sys;
  sys.A = dense_to_sparse(D);
  sys.b = VectorXc::LinSpaced(4, -1.0, 2.0);
  sys.has_k = true;
  sys.k_index = 3;
  const SolutionTriple s = solve(sys, 2, 1);
  const VectorXc ref = D.partialPivLu().solve(sys.b);
  CHECK((s.x - ref).norm() < 1e-13 * ref.norm());
  REQUIRE(s.k.has_value());
  CHECK(std::abs(*s.k - ref[3]) < 1e-13);
  CHECK(s.stats.certificate_ok);
}

TEST_CASE("DG system: zero load, linearity, certificate") {
  const Mesh mesh = load_msh(testdata::fixture("torus_n5.msh"));
  const HarmonicField field = build_harmonic_field(mesh, make_user_cut(mesh, torus_hole_cut(mesh)));
  const DgSpace space(mesh, 1, true);
  const PenaltyConfig pen = PenaltyConfig::defaults(1);
  AssembledSystem sys = assemble_system(space, field, {}, pen, {});
  const SolutionTriple zero = solve(sys, space);
  CHECK(zero.x.cwiseAbs().maxCoeff() == 0.0);

  SourceBundle g;
  g.g = 1.0;
  sys.b = assemble_generalized_load(space, field, {}, pen, g);
  const SolutionTriple s1 = solve(sys, space);
  sys.b *= 2.0;
  const SolutionTriple s2 = solve(sys, space);
  CHECK(s1.stats.certificate_ok);
  CHECK((s2.x - 2.0 * s1.x).norm() <= 1e-12 * s2.x.norm());
  CHECK(std::abs(*s1.k) > 0.0);
  const SolutionTriple again = solve(sys, space);
  CHECK((again.x - s2.x).norm() == 0.0);
}

TEST_CASE("electric field postprocessing") {
  Mesh mesh;
  mesh.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
  Mesh::Cell c;
  c.vertices = {0, 1, 2, 3};
  c.region = Region::Conductor;
  mesh.cells.push_back(c);
  mesh.build_topology(true);
  const DgSpace space(mesh, 1, false);
  MaterialConfig mat;
  mat.default_sigma = 2.0;

  SolutionTriple s;
  s.conductor_size = space.conductor_size();
  s.x = VectorXc::Zero(space.size());
  CHECK(postprocess_e_field(space, s, {}, mat).norm() == 0.0);

  // h = (0, 0, y), curl h = (1, 0, 0).
  const auto lat = lattice(1);
  for (int i = 0; i < 4; ++i) s.x[8 + i] = lat[i][2];
  const VectorXc e = postprocess_e_field(space, s, {}, mat);
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(e[i] - 0.5) < 1e-13);
    CHECK(std::abs(e[4 + i]) < 1e-13);
    CHECK(std::abs(e[8 + i]) < 1e-13);
  }
  const VectorXc e2 = postprocess_e_field(space, s, [](const Vec3&) { return CVec3(1.0, 0.0, 0.0); }, mat);
  CHECK(e2.norm() < 1e-13);
}
