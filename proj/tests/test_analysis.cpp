#include "doctest.h"
#include "fixtures.hpp"

#include "eddydg/analysis.hpp"
#include "eddydg/meshgen.hpp"

#include <cmath>
#include <random>

using namespace eddydg;

namespace {

Mesh single_conductor_cell() {
  Mesh mesh;
  mesh.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
  Mesh::Cell c;
  c.vertices = {0, 1, 2, 3};
  c.region = Region::Conductor;
  mesh.cells.push_back(c);
  mesh.build_topology(true);
  return mesh;
}

}  // namespace

TEST_CASE("eoc") {
  CHECK(eoc({0.4, 0.2}, {0.2, 0.1})[0] == doctest::Approx(1.0));
  CHECK(eoc({0.16, 0.04}, {0.2, 0.1})[0] == doctest::Approx(2.0));
  CHECK_THROWS_AS(eoc({0.1, 0.0}, {0.2, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(eoc({0.1}, {0.2}), std::invalid_argument);
  CHECK_THROWS_AS(eoc({0.2, 0.1}, {0.1, 0.2}), std::invalid_argument);
}

TEST_CASE("norm of a constant field on one cell") {
  const Mesh mesh = single_conductor_cell();
  const DgSpace space(mesh, 1, false);
  const NormMatrices nm = norm_matrices(space, {}, MaterialConfig{});
  VectorXc x = VectorXc::Zero(space.size());
  CHECK(dg_norm(nm, x).total() == 0.0);
  CHECK(dg_star_norm(nm, x).total() == 0.0);
  // v = (1, 2, 2), |v| = 3.
  for (int i = 0; i < 4; ++i) {
    x[i] = 1.0;
    x[4 + i] = 2.0;
    x[8 + i] = 2.0;
  }
  const NormReport r = dg_norm(nm, x);
  CHECK(r.component[L2C] == doctest::Approx(3.0 / std::sqrt(6.0)).epsilon(1e-13));
  CHECK(r.component[CurlC] < 1e-13);
  CHECK(r.total() == doctest::Approx(r.component[L2C]).epsilon(1e-12));
  const NormReport p = error_against_exact(space, {}, MaterialConfig{}, x, nullptr);
  CHECK(p.total() == doctest::Approx(r.total()).epsilon(1e-12));
}

TEST_CASE("norm matrices agree with pointwise evaluation; star dominates plain") {
  const Mesh mesh = load_msh(testdata::fixture("torus_n5.msh"));
  const HarmonicField field = build_harmonic_field(mesh, make_user_cut(mesh, torus_hole_cut(mesh)));
  const DgSpace space(mesh, 1, true);
  MaterialConfig mat;
  mat.omega = 2.0;
  const NormMatrices nm = norm_matrices(space, field, mat);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int s = 0; s < 5; ++s) {
    VectorXc x(space.size());
    for (auto& v : x) v = Complex(g(rng), g(rng));
    const NormReport a = dg_star_norm(nm, x);
    const NormReport b = error_against_exact(space, field, mat, x, nullptr, true);
    for (int c = 0; c < kNormComponents; ++c)
      CHECK(a.component[c] == doctest::Approx(b.component[c]).epsilon(1e-10));
    const NormReport plain = dg_norm(nm, x);
    CHECK(a.total() >= plain.total());
    double sum = 0.0;
    for (int c = 0; c < AvgC; ++c) sum += plain.component[c] * plain.component[c];
    CHECK(std::abs(plain.total() * plain.total() - sum) <= 1e-12 * sum);
  }
}

TEST_CASE("symmetry check detects a perturbation") {
  const Mesh mesh = load_msh(testdata::fixture("cube_n4.msh"));
  const DgSpace space(mesh, 1, false);
  SparseMatrixC A = assemble_Ah(space, {}, {}, PenaltyConfig::defaults(1));
  CHECK(check_symmetry(A, {20, 1}) <= 1e-12);
  A.coeffRef(0, 5) += 1e-3;
  CHECK(check_symmetry(A, {20, 1}) > 1e-12);
}

TEST_CASE("coercivity with default and reduced penalties") {
  const Mesh mesh = load_msh(testdata::fixture("cube_n4.msh"));
  const DgSpace space(mesh, 1, false);
  const NormMatrices nm = norm_matrices(space, {}, {});
  const PenaltyConfig pen = PenaltyConfig::defaults(1);
  const double r = check_coercivity(assemble_Ah(space, {}, {}, pen), nm.plain(), {20, 3});
  CHECK(r >= 0.5 - 1e-9);
  const double big = check_coercivity(assemble_Ah(space, {}, {}, pen.scaled(100.0)), nm.plain(), {20, 3});
  CHECK(big >= 0.5 - 1e-9);
  const double tiny = check_coercivity(assemble_Ah(space, {}, {}, pen.scaled(1e-6)), nm.plain(), {20, 3});
  CHECK(std::isfinite(tiny));
}

TEST_CASE("trace constant on congruent refinements") {
  const Mesh a = make_cube_mesh(4);
  const Mesh b = make_cube_mesh(8);
  const double ca = trace_constant(a, 2), cb = trace_constant(b, 2);
  CHECK(ca > 1.0);
  CHECK(std::abs(ca - cb) <= 1e-8 * ca);
}

TEST_CASE("catalog derivatives agree with finite differences") {
  std::vector<Vec3> pc = {Vec3(0.3, 0.1, -0.05), Vec3(-0.45, 0.35, 0.1), Vec3(0.25, -0.5, 0.15)};
  std::vector<std::pair<Vec3, int>> pi = {{Vec3(0.7, 0.2, 0.3), 0}, {Vec3(-0.1, 0.8, -0.6), 0}};
  for (int m : {1, 2, 3})
    for (const auto& e : mms_catalog(m)) CHECK_MESSAGE(derivative_consistency(e, pc, pi) <= 1e-6, e.name);

  const Mesh mesh = make_torus_mesh(5);
  const HarmonicField field = build_harmonic_field(mesh, make_user_cut(mesh, torus_hole_cut(mesh)));
  const ExactSolution t = mms_torus_k(mesh, field);
  std::vector<std::pair<Vec3, int>> tp;
  for (int k : {0, 100, 300, 700})
    if (mesh.cells[k].region == Region::Insulator) tp.push_back({mesh.cells[k].centroid, k});
  std::vector<Vec3> tc;
  for (std::size_t k = 0; k < mesh.cells.size() && tc.size() < 5; ++k)
    if (mesh.cells[k].region == Region::Conductor) tc.push_back(mesh.cells[k].centroid);
  CHECK(derivative_consistency(t, tc, tp) <= 1e-6);

  // psi* is single valued across the cut and vanishes on Sigma.
  for (std::size_t i = 0; i < field.cut.faces.size(); ++i) {
    const auto& f = mesh.faces[field.cut.faces[i]];
    CHECK(std::abs(t.psi(f.centroid, f.owner) - t.psi(f.centroid, f.neighbor)) < 1e-12);
  }
  for (const auto& f : mesh.faces)
    if (f.kind == FaceKind::Outer) CHECK(std::abs(t.psi(f.centroid, f.owner)) < 1e-12);
}

TEST_CASE("manufactured loads") {
  const Mesh mesh = load_msh(testdata::fixture("cube_n4.msh"));
  const DgSpace space(mesh, 1, false);
  const PenaltyConfig pen = PenaltyConfig::defaults(1);
  const MmsLoad zero = mms_sources(mms_zero(), space, {}, {});
  CHECK(assemble_generalized_load(space, {}, {}, pen, zero.bundle).norm() == 0.0);

  MaterialConfig bad;
  bad.default_mu = 2.0;
  CHECK_THROWS_AS(mms_sources(mms_gradient_pair(), space, {}, bad), ConfigError);
  CHECK_THROWS_AS(mms_by_name("nope", 1), ConfigError);
  CHECK_THROWS_AS(mms_by_name("torus_k", 1), ConfigError);
}

TEST_CASE("polynomial pair is reproduced exactly") {
  const Mesh mesh = load_msh(testdata::fixture("cube_n4.msh"));
  const DgSpace space(mesh, 1, false);
  const MaterialConfig mat;
  const ExactSolution ex = mms_polynomial_pair(1);
  const MmsLoad load = mms_sources(ex, space, {}, mat);
  const auto sys = assemble_system(space, {}, mat, PenaltyConfig::defaults(1), load.j, load.bundle);
  const SolutionTriple sol = solve(sys, space);
  CHECK(sol.stats.certificate_ok);
  CHECK(error_against_exact(space, {}, mat, sol.x, &ex).total() <= 1e-8);
  const VectorXc interp = gradient_pair_interpolate(space, [&](const Vec3& x) { return ex.psi(x, -1); });
  CHECK((interp - sol.x).cwiseAbs().maxCoeff() <= 1e-9 * interp.cwiseAbs().maxCoeff());
}
