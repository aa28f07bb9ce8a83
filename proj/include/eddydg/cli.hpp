#pragma once

#include "eddydg/assembly.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace eddydg {

enum class RunMode { Solve, Verify, Convergence };

/// Flat `section.key -> value` table read from a config file.
using ConfigTable = std::map<std::string, std::string>;

struct RunConfig {
  RunMode mode = RunMode::Solve;
  /// Mesh spec: a .msh path, or `torus:N` / `cube:N` for the built-in generators.
  std::string mesh = "torus:5";
  /// Cut file for .msh meshes; empty selects the automatic cut.
  std::string cut;
  int degree = 1;
  MaterialConfig materials;
  PenaltyConfig penalties;
  bool penalties_set = false;
  std::string mms;               // exact solution name, empty for none
  CVec3 current = CVec3::Zero(); // constant j in the conductor (solve mode without mms)
  std::vector<std::string> levels;
  double eoc_min = 0.0;          // 0 picks 0.85 m
  std::string output = "out";
  std::uint64_t seed = 20240611;
  int samples = 100;
  bool vtk = false;
};

/// Parses `key = value` lines with `[section]` headers; `#` and `;` start
/// comments. Keys are stored as `section.key`.
ConfigTable parse_config_text(const std::string& text);

/// Applies `--key value` pairs. A bare key matches the unique table entry or
/// known key ending in `.key`; `--section.key` is taken literally.
void apply_overrides(ConfigTable& table, const std::vector<std::string>& args);

/// Validates and converts; throws ConfigError naming the offending key.
RunConfig make_run_config(const ConfigTable& table);

/// Runs one configuration and returns the process exit code
/// (0 ok, 2 config, 3 mesh, 4 solver, 5 verification).
int run(const RunConfig& config);

}  // namespace eddydg
