#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace eddydg {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using VectorXc = Eigen::VectorXcd;

inline constexpr Complex I_unit{0.0, 1.0};

/// Unconjugated product a . b.
inline Complex bdot(const CVec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Complex bdot(const CVec3& a, const CVec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

enum class Region { Conductor, Insulator };

/// Classification of a mesh face. ConductorBoundary only appears when a mesh
/// is loaded with relaxed topology checks (see LoadOptions).
enum class FaceKind {
  InteriorConductor,
  InteriorInsulator,
  Interface,
  Outer,
  ConductorBoundary
};

const char* to_string(FaceKind kind);
const char* to_string(Region region);

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TopologyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CohomologyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace eddydg
