#include "eddydg/mesh.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <unordered_map>

namespace eddydg {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool contains(const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

struct RawElement {
  int type = 0;
  int physical = 0;
  int elementary = 0;
  std::vector<long> nodes;
};

void expect_end(std::istream& in, const std::string& section) {
  std::string tok;
  if (!(in >> tok) || tok != "$End" + section) throw ParseError("expected $End" + section);
}

}  // namespace

Mesh parse_msh(const std::string& text, const LoadOptions& options) {
  std::istringstream in(text);
  std::string tok;
  bool have_format = false;
  std::map<int, std::string> physical_names;
  std::vector<std::pair<long, Vec3>> nodes;
  std::vector<RawElement> elements;

  while (in >> tok) {
    if (tok == "$MeshFormat") {
      double version = 0;
      int file_type = -1, data_size = 0;
      if (!(in >> version >> file_type >> data_size)) throw ParseError("malformed $MeshFormat");
      if (version < 2.0 || version >= 3.0) throw ParseError("unsupported MSH version (need 2.2)");
      if (file_type != 0) throw ParseError("binary MSH files are not supported");
      expect_end(in, "MeshFormat");
      have_format = true;
    } else if (tok == "$PhysicalNames") {
      int n = 0;
      if (!(in >> n) || n < 0) throw ParseError("malformed $PhysicalNames");
      std::string line;
      std::getline(in, line);
      for (int i = 0; i < n; ++i) {
        if (!std::getline(in, line)) throw ParseError("truncated $PhysicalNames");
        std::istringstream ls(line);
        int dim = 0, tag = 0;
        std::string name;
        if (!(ls >> dim >> tag)) throw ParseError("malformed physical name line");
        std::getline(ls, name);
        name.erase(std::remove(name.begin(), name.end(), '"'), name.end());
        name.erase(0, name.find_first_not_of(" \t"));
        name.erase(name.find_last_not_of(" \t\r") + 1);
        physical_names[tag] = lower(name);
      }
      expect_end(in, "PhysicalNames");
    } else if (tok == "$Nodes") {
      long n = 0;
      if (!(in >> n) || n < 0) throw ParseError("malformed $Nodes");
      nodes.reserve(n);
      for (long i = 0; i < n; ++i) {
        long tag;
        double x, y, z;
        if (!(in >> tag >> x >> y >> z)) throw ParseError("truncated $Nodes");
        nodes.emplace_back(tag, Vec3(x, y, z));
      }
      expect_end(in, "Nodes");
    } else if (tok == "$Elements") {
      long n = 0;
      if (!(in >> n) || n < 0) throw ParseError("malformed $Elements");
      for (long i = 0; i < n; ++i) {
        long id;
        int type, ntags;
        if (!(in >> id >> type >> ntags) || ntags < 0) throw ParseError("truncated $Elements");
        RawElement e;
        e.type = type;
        std::vector<int> tags(ntags);
        for (auto& t : tags)
          if (!(in >> t)) throw ParseError("truncated element tags");
        if (ntags > 0) e.physical = tags[0];
        if (ntags > 1) e.elementary = tags[1];
        int nn = 0;
        switch (type) {
          case 15: nn = 1; break;
          case 1: nn = 2; break;
          case 2: nn = 3; break;
          case 4: nn = 4; break;
          default: throw ParseError("unsupported element type " + std::to_string(type));
        }
        e.nodes.resize(nn);
        for (auto& v : e.nodes)
          if (!(in >> v)) throw ParseError("truncated element nodes");
        if (type == 2 || type == 4) elements.push_back(std::move(e));
      }
      expect_end(in, "Elements");
    } else if (tok.size() > 1 && tok[0] == '$' && tok.rfind("$End", 0) != 0) {
      // Unknown section: skip to its end marker.
      const std::string end = "$End" + tok.substr(1);
      std::string t;
      while (in >> t && t != end) {
      }
      if (t != end) throw ParseError("unterminated section " + tok);
    } else {
      throw ParseError("unexpected token '" + tok + "'");
    }
  }
  if (!have_format) throw ParseError("missing $MeshFormat");
  if (nodes.empty()) throw ParseError("missing $Nodes");

  auto tag_is = [&](int tag, const std::string& name, const std::vector<int>& overrides) {
    if (contains(overrides, tag)) return true;
    auto it = physical_names.find(tag);
    return it != physical_names.end() && it->second == name;
  };

  std::sort(nodes.begin(), nodes.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::unordered_map<long, int> node_index;
  Mesh mesh;
  for (const auto& [tag, x] : nodes) {
    if (!node_index.emplace(tag, static_cast<int>(mesh.vertices.size())).second)
      throw ParseError("duplicate node tag " + std::to_string(tag));
    mesh.vertices.push_back(x);
  }
  auto vid = [&](long tag) {
    auto it = node_index.find(tag);
    if (it == node_index.end()) throw ParseError("element references unknown node " + std::to_string(tag));
    return it->second;
  };

  std::vector<std::pair<std::array<int, 3>, bool>> tagged_surfaces;  // (sorted verts, is_gamma)
  for (const auto& e : elements) {
    if (e.type == 4) {
      Mesh::Cell c;
      for (int i = 0; i < 4; ++i) c.vertices[i] = vid(e.nodes[i]);
      if (tag_is(e.physical, "conductor", options.conductor_tags))
        c.region = Region::Conductor;
      else if (tag_is(e.physical, "insulator", options.insulator_tags))
        c.region = Region::Insulator;
      else
        throw TopologyError("tetrahedron with physical tag " + std::to_string(e.physical) +
                            " is neither conductor nor insulator (missing region tags)");
      c.material = e.elementary;
      mesh.cells.push_back(c);
    } else {
      const bool gamma = tag_is(e.physical, "gamma", options.gamma_tags);
      const bool sigma = tag_is(e.physical, "sigma", options.sigma_tags);
      if (!gamma && !sigma) continue;
      std::array<int, 3> key{vid(e.nodes[0]), vid(e.nodes[1]), vid(e.nodes[2])};
      std::sort(key.begin(), key.end());
      tagged_surfaces.emplace_back(key, gamma);
    }
  }
  if (mesh.cells.empty()) throw ParseError("no tetrahedra in mesh");

  mesh.build_topology(options.allow_conductor_boundary);

  // Explicit surface tags must agree with the classification implied by the
  // volume labels.
  if (!tagged_surfaces.empty()) {
    std::map<std::array<int, 3>, int> lookup;
    for (std::size_t i = 0; i < mesh.faces.size(); ++i) lookup[mesh.faces[i].vertices] = static_cast<int>(i);
    for (const auto& [key, gamma] : tagged_surfaces) {
      auto it = lookup.find(key);
      if (it == lookup.end()) throw TopologyError("tagged surface triangle is not a face of any tetrahedron");
      const FaceKind kind = mesh.faces[it->second].kind;
      const FaceKind want = gamma ? FaceKind::Interface : FaceKind::Outer;
      if (kind != want)
        throw TopologyError(std::string("surface tagged ") + (gamma ? "gamma" : "sigma") + " is classified as " +
                            to_string(kind) + " by the volume labels");
    }
  }
  return mesh;
}

Mesh load_msh(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open mesh file " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_msh(ss.str(), options);
}

std::string write_msh(const Mesh& mesh) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
  out << "$PhysicalNames\n4\n3 1 \"conductor\"\n3 2 \"insulator\"\n2 3 \"gamma\"\n2 4 \"sigma\"\n$EndPhysicalNames\n";
  out << "$Nodes\n" << mesh.vertices.size() << "\n";
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const auto& x = mesh.vertices[i];
    out << i + 1 << ' ' << x.x() << ' ' << x.y() << ' ' << x.z() << "\n";
  }
  out << "$EndNodes\n";
  std::size_t nsurf = 0;
  for (const auto& f : mesh.faces)
    if (f.kind == FaceKind::Interface || f.kind == FaceKind::Outer) ++nsurf;
  out << "$Elements\n" << nsurf + mesh.cells.size() << "\n";
  std::size_t id = 1;
  for (const auto& f : mesh.faces) {
    if (f.kind != FaceKind::Interface && f.kind != FaceKind::Outer) continue;
    const int phys = f.kind == FaceKind::Interface ? 3 : 4;
    out << id++ << " 2 2 " << phys << ' ' << phys;
    for (int v : f.vertices) out << ' ' << v + 1;
    out << "\n";
  }
  for (const auto& c : mesh.cells) {
    const int phys = c.region == Region::Conductor ? 1 : 2;
    out << id++ << " 4 2 " << phys << ' ' << (c.material != 0 ? c.material : phys);
    for (int v : c.vertices) out << ' ' << v + 1;
    out << "\n";
  }
  out << "$EndElements\n";
  return out.str();
}

}  // namespace eddydg
