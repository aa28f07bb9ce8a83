#include "doctest.h"
#include "fixtures.hpp"

#include "eddydg/cohomology.hpp"
#include "eddydg/meshgen.hpp"

#include <cmath>

using namespace eddydg;

namespace {

// Loop of Gamma edges around the conductor cross-section in the plane y = 0.2,
// x in [0.2, 0.6], |z| <= 0.2, i.e. through the hole and around the outside.
EdgeLoop meridian_loop(const Mesh& mesh) {
  std::vector<int> ring;
  std::vector<Vec3> pts;
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    const Vec3& x = mesh.vertices[v];
    if (std::abs(x.y() - 0.2) > 1e-12 || x.x() < 0.2 - 1e-12 || x.x() > 0.6 + 1e-12 || std::abs(x.z()) > 0.2 + 1e-12) continue;
    const bool on_box = std::abs(x.x() - 0.2) < 1e-12 || std::abs(x.x() - 0.6) < 1e-12 ||
                        std::abs(std::abs(x.z()) - 0.2) < 1e-12;
    if (on_box) ring.push_back(static_cast<int>(v));
  }
  // Order counter-clockwise in the (x, z) plane around (0.4, 0).
  std::sort(ring.begin(), ring.end(), [&](int a, int b) {
    const Vec3 pa = mesh.vertices[a], pb = mesh.vertices[b];
    return std::atan2(pa.z(), pa.x() - 0.4) < std::atan2(pb.z(), pb.x() - 0.4);
  });
  EdgeLoop loop;
  for (std::size_t i = 0; i < ring.size(); ++i) loop.push_back({ring[i], ring[(i + 1) % ring.size()]});
  return loop;
}

}  // namespace

TEST_CASE("trivial topology gives an empty cut and a zero field") {
  const Mesh mesh = load_msh(testdata::fixture("box_insulator.msh"));
  CutOptions opt;
  opt.assert_trivial = true;
  const CutSurface cut = build_cut(mesh, opt);
  CHECK(cut.empty());
  const HarmonicField field = build_harmonic_field(mesh, cut);
  for (const auto& r : field.rho) CHECK(r.norm() == 0.0);
  CHECK(validate_harmonic_field(mesh, field).passed());
  CHECK(build_cut(mesh).empty());
}

TEST_CASE("cube conductor has no cut") {
  const Mesh mesh = load_msh(testdata::fixture("cube_n4.msh"));
  CHECK(build_cut(mesh).empty());
}

TEST_CASE("spanning-tree cut on the torus fixture") {
  const Mesh mesh = load_msh(testdata::fixture("torus_n5.msh"));
  const CutSurface cut = build_cut(mesh);
  REQUIRE_FALSE(cut.empty());
  CHECK(cut.provenance == CutProvenance::SpanningTree);
  const HarmonicField field = build_harmonic_field(mesh, cut);
  const HarmonicReport rep = validate_harmonic_field(mesh, field);
  CHECK(rep.curl_residual == 0.0);
  CHECK(rep.tangential_residual <= 1e-12);
  CHECK(rep.sigma_residual <= 1e-12);
  CHECK(std::abs(std::abs(rep.circulation) - 1.0) <= 1e-10);
  CHECK(rep.passed());

  // Bit-identical rebuild.
  const HarmonicField again = build_harmonic_field(mesh, build_cut(mesh));
  for (std::size_t k = 0; k < mesh.cells.size(); ++k) CHECK(again.rho[k] == field.rho[k]);
}

TEST_CASE("hint loop fixes the orientation") {
  const Mesh mesh = load_msh(testdata::fixture("torus_n5.msh"));
  CutOptions opt;
  opt.hint = meridian_loop(mesh);
  const CutSurface cut = build_cut(mesh, opt);
  const HarmonicField field = build_harmonic_field(mesh, cut);
  CHECK(loop_circulation(mesh, field, *opt.hint) == doctest::Approx(1.0).epsilon(1e-12));

  EdgeLoop reversed;
  for (auto it = opt.hint->rbegin(); it != opt.hint->rend(); ++it) reversed.push_back({(*it)[1], (*it)[0]});
  opt.hint = reversed;
  const HarmonicField flipped = build_harmonic_field(mesh, build_cut(mesh, opt));
  CHECK(loop_circulation(mesh, flipped, reversed) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hint loop with an edge on Sigma is rejected") {
  const Mesh mesh = load_msh(testdata::fixture("torus_n5.msh"));
  const auto& f = mesh.faces[classify_entities(mesh).outer.front()];
  CutOptions opt;
  opt.hint = EdgeLoop{{f.vertices[0], f.vertices[1]}, {f.vertices[1], f.vertices[2]}, {f.vertices[2], f.vertices[0]}};
  CHECK_THROWS_AS(build_cut(mesh, opt), CohomologyError);
}

TEST_CASE("user cut round-trips through the text format") {
  const Mesh mesh = load_msh(testdata::fixture("torus_n5.msh"));
  const CutSurface cut = make_user_cut(mesh, torus_hole_cut(mesh));
  CHECK(cut.provenance == CutProvenance::UserSupplied);
  CHECK(cut.faces.size() == 2);
  const CutSurface back = read_cut(mesh, write_cut(cut));
  CHECK(back.faces == cut.faces);
  CHECK(back.signs == cut.signs);
  const HarmonicField field = build_harmonic_field(mesh, cut);
  CHECK(validate_harmonic_field(mesh, field).passed());
  // Potential rises upward through the disk.
  for (std::size_t i = 0; i < cut.faces.size(); ++i) {
    const auto& face = mesh.faces[cut.faces[i]];
    const int plus = cut.signs[i] > 0 ? face.neighbor : face.owner;
    CHECK(mesh.cells[plus].centroid.z() > 0.2);
  }
  CHECK_THROWS_AS(read_cut(mesh, "0 1\n"), CohomologyError);
  CHECK_THROWS_AS(read_cut(mesh, std::to_string(cut.faces[0]) + "\n"), ParseError);
}

TEST_CASE("injected defects fail validation") {
  const Mesh mesh = load_msh(testdata::fixture("torus_n5.msh"));
  HarmonicField field = build_harmonic_field(mesh, build_cut(mesh));
  HarmonicField perturbed = field;
  for (std::size_t k = 0; k < mesh.cells.size(); ++k)
    if (mesh.cells[k].region == Region::Insulator) {
      perturbed.rho[k] += Vec3(0.1, 0.1, 0.1);
      break;
    }
  CHECK_FALSE(validate_harmonic_field(mesh, perturbed).tangential_ok);

  HarmonicField zero = field;
  for (auto& r : zero.rho) r.setZero();
  const auto rep = validate_harmonic_field(mesh, zero);
  CHECK_FALSE(rep.circulation_ok);
  CHECK(rep.circulation == 0.0);
}
