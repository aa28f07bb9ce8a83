#pragma once

#include <string>

namespace testdata {

// One conductor and one insulator tetrahedron sharing the face {2,3,4}.
inline const std::string kTwoTet = R"($MeshFormat
2.2 0 8
$EndMeshFormat
$PhysicalNames
2
3 1 "Conductor"
3 2 "insulator"
$EndPhysicalNames
$Nodes
5
1 0 0 0
2 1 0 0
3 0 1 0
4 0 0 1
5 1 1 1
$EndNodes
$Elements
2
1 4 2 1 7 1 2 3 4
2 4 2 2 9 2 3 4 5
$EndElements
)";

inline std::string fixture(const std::string& name) { return std::string(EDDYDG_FIXTURE_DIR) + "/" + name; }

}  // namespace testdata
