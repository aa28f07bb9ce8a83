// Writes the shipped fixture meshes.
#include "eddydg/cohomology.hpp"
#include "eddydg/meshgen.hpp"

#include <fstream>
#include <iostream>

namespace {

void save(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  std::cerr << "wrote " << path.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path dir = argc > 1 ? argv[1] : "fixtures";
  std::filesystem::create_directories(dir);
  for (int n : {5, 10, 15}) {
    const auto mesh = eddydg::make_torus_mesh(n);
    save(dir / ("torus_n" + std::to_string(n) + ".msh"), eddydg::write_msh(mesh));
    eddydg::CutSurface cut = eddydg::make_user_cut(mesh, eddydg::torus_hole_cut(mesh));
    save(dir / ("torus_n" + std::to_string(n) + ".cut"), eddydg::write_cut(cut));
  }
  for (int n : {4, 8, 12}) save(dir / ("cube_n" + std::to_string(n) + ".msh"), eddydg::write_msh(eddydg::make_cube_mesh(n)));
  save(dir / "box_insulator.msh", eddydg::write_msh(eddydg::make_box_mesh(1, [](const eddydg::Vec3&) { return false; })));
  return 0;
}
