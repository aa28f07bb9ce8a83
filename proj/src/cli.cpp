#include "eddydg/cli.hpp"

#include "eddydg/analysis.hpp"
#include "eddydg/meshgen.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

namespace eddydg {

namespace fs = std::filesystem;

namespace {

struct VerificationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Problem {
  Mesh mesh;
  HarmonicField field;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int generator_size(const std::string& spec, std::size_t colon) {
  try {
    const int n = std::stoi(spec.substr(colon + 1));
    if (n >= 2) return n;
  } catch (const std::exception&) {
  }
  throw ConfigError("run.mesh: bad generator size in '" + spec + "'");
}

std::unique_ptr<Problem> load_problem(const std::string& spec, const std::string& cut_path) {
  auto p = std::make_unique<Problem>();
  const auto colon = spec.find(':');
  if (spec.rfind("torus:", 0) == 0) {
    p->mesh = make_torus_mesh(generator_size(spec, colon));
    p->field = build_harmonic_field(p->mesh, make_user_cut(p->mesh, torus_hole_cut(p->mesh)));
  } else if (spec.rfind("cube:", 0) == 0) {
    p->mesh = make_cube_mesh(generator_size(spec, colon));
    p->field = build_harmonic_field(p->mesh, build_cut(p->mesh));
  } else {
    p->mesh = load_msh(spec);
    const CutSurface cut = cut_path.empty() ? build_cut(p->mesh) : read_cut(p->mesh, read_file(cut_path));
    p->field = build_harmonic_field(p->mesh, cut);
  }
  for (const auto& w : p->mesh.warnings) std::cerr << "warning: " << w << "\n";
  std::cerr << "mesh " << spec << ": " << p->mesh.cells.size() << " cells, h = " << p->mesh.mesh_size()
            << (p->field.empty() ? ", no cut" : ", cut with " + std::to_string(p->field.cut.faces.size()) + " faces")
            << "\n";
  return p;
}

std::ofstream open_output(const RunConfig& c, const std::string& name) {
  fs::create_directories(c.output);
  const fs::path path = fs::path(c.output) / name;
  std::ofstream out(path);
  if (!out) throw ConfigError("run.output: cannot write " + path.string());
  out << std::setprecision(17);
  return out;
}

struct Solved {
  SolutionTriple sol;
  SourceField j;
};

Solved solve_problem(const RunConfig& c, const Problem& p, const DgSpace& space, const ExactSolution* exact) {
  SourceField j;
  SourceBundle bundle;
  if (exact) {
    MmsLoad load = mms_sources(*exact, space, p.field, c.materials);
    j = load.j;
    bundle = std::move(load.bundle);
  } else if (c.current.squaredNorm() > 0.0) {
    const CVec3 cur = c.current;
    j = [cur](const Vec3&) { return cur; };
  }
  const auto t0 = std::chrono::steady_clock::now();
  const AssembledSystem sys = assemble_system(space, p.field, c.materials, c.penalties, j, bundle);
  const double ta = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  SolutionTriple sol = solve(sys, space);
  std::cerr << "dofs " << space.size() << ", assembly " << ta << " s, solve " << sol.stats.seconds
            << " s, residual " << sol.stats.residual << " (tolerance " << sol.stats.tolerance << ")\n";
  if (!sol.stats.certificate_ok) throw SolverError("residual certificate failed");
  return {std::move(sol), j};
}

void write_vtk(const RunConfig& c, const Problem& p, const DgSpace& space, const SolutionTriple& sol,
               const VectorXc& e) {
  std::ofstream out = open_output(c, "solution.vtk");
  const Mesh& mesh = p.mesh;
  out << "# vtk DataFile Version 3.0\neddydg solution\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.vertices.size() << " double\n";
  for (const auto& v : mesh.vertices) out << v[0] << " " << v[1] << " " << v[2] << "\n";
  out << "CELLS " << mesh.cells.size() << " " << 5 * mesh.cells.size() << "\n";
  for (const auto& cell : mesh.cells)
    out << "4 " << cell.vertices[0] << " " << cell.vertices[1] << " " << cell.vertices[2] << " "
        << cell.vertices[3] << "\n";
  out << "CELL_TYPES " << mesh.cells.size() << "\n";
  for (std::size_t k = 0; k < mesh.cells.size(); ++k) out << "10\n";

  std::vector<double> h_abs, e_abs, psi_re;
  Eigen::VectorXd v;
  MatrixX3 g, val, curl;
  const Complex k = sol.k.value_or(0.0);
  for (std::size_t i = 0; i < mesh.cells.size(); ++i) {
    const int cell = static_cast<int>(i);
    const Vec3& x = mesh.cells[i].centroid;
    const int off = space.offset(cell), n = space.local_size(cell);
    if (mesh.cells[i].region == Region::Conductor) {
      space.eval_vector(cell, x, val, curl);
      const CVec3 h = val.transpose() * sol.x.segment(off, n);
      const CVec3 ef = val.transpose() * e.segment(off, n);
      h_abs.push_back(h.norm());
      e_abs.push_back(ef.norm());
      psi_re.push_back(0.0);
    } else {
      space.eval_scalar(cell, x, v, g);
      const CVec3 h = CVec3(g.transpose() * sol.x.segment(off, n)) + k * p.field.rho[i].cast<Complex>();
      h_abs.push_back(h.norm());
      e_abs.push_back(0.0);
      psi_re.push_back((v.transpose() * sol.x.segment(off, n))(0).real());
    }
  }
  out << "CELL_DATA " << mesh.cells.size() << "\n";
  auto field = [&](const char* name, const std::vector<double>& d) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double x : d) out << x << "\n";
  };
  field("abs_h", h_abs);
  field("abs_e", e_abs);
  field("re_psi", psi_re);
}

int run_solve(const RunConfig& c) {
  const auto p = load_problem(c.mesh, c.cut);
  const DgSpace space(p->mesh, c.degree, !p->field.empty());
  std::optional<ExactSolution> exact;
  if (!c.mms.empty()) exact = mms_by_name(c.mms, c.degree, &p->mesh, &p->field);
  const Solved s = solve_problem(c, *p, space, exact ? &*exact : nullptr);

  {
    std::ofstream out = open_output(c, "solution.csv");
    out << "index,block,re,im\n";
    for (int i = 0; i < space.size(); ++i) {
      const char* block = i < space.conductor_size() ? "h" : (i == space.k_index() ? "k" : "psi");
      out << i << "," << block << "," << s.sol.x[i].real() << "," << s.sol.x[i].imag() << "\n";
    }
  }
  {
    std::ofstream out = open_output(c, "certificate.txt");
    out << "residual_inf " << s.sol.stats.residual << "\n"
        << "tolerance " << s.sol.stats.tolerance << "\n"
        << "certificate " << (s.sol.stats.certificate_ok ? "pass" : "fail") << "\n"
        << "rcond " << s.sol.stats.rcond << "\n"
        << "min_pivot " << s.sol.stats.min_pivot << "\n";
    if (s.sol.k) out << "k " << s.sol.k->real() << " " << s.sol.k->imag() << "\n";
  }
  if (exact) {
    const NormReport r = error_against_exact(space, p->field, c.materials, s.sol.x, &*exact);
    std::cerr << "DG error against " << exact->name << ": " << r.total() << "\n";
    if (exact->k != Complex(0.0) && s.sol.k) std::cerr << "|k_h - k*| = " << std::abs(*s.sol.k - exact->k) << "\n";
  }
  if (c.vtk) write_vtk(c, *p, space, s.sol, postprocess_e_field(space, s.sol, s.j, c.materials));
  return 0;
}

int run_verify(const RunConfig& c) {
  const auto p = load_problem(c.mesh, c.cut);
  const int m = c.degree;
  const DgSpace space(p->mesh, m, !p->field.empty());
  const SampleOptions opt{c.samples, c.seed};
  std::ofstream out = open_output(c, "report.txt");
  bool all = true;
  auto line = [&](const std::string& name, bool ok, double value, const std::string& note = "") {
    out << std::left << std::setw(22) << name << (ok ? "pass " : "FAIL ") << std::setprecision(6) << value;
    if (!note.empty()) out << "  " << note;
    out << "\n";
    std::cerr << name << ": " << (ok ? "pass" : "FAIL") << " (" << value << ")\n";
    all = all && ok;
  };

  const SparseMatrixC A = assemble_Ah(space, p->field, c.materials, c.penalties);
  const NormMatrices nm = norm_matrices(space, p->field, c.materials);

  const double sym = check_symmetry(A, opt);
  line("symmetry", sym <= 1e-12, sym);

  const double coer = check_coercivity(A, nm.plain(), opt);
  const bool coer_ok = std::isfinite(coer) && coer >= 0.5 - 1e-9;
  line("coercivity", coer_ok, coer,
       coer_ok || c.penalties.warnings(m).empty() ? "" : "calibration failure: penalties below defaults");

  const ExactSolution grad = mms_gradient_pair();
  const VectorXc interp = gradient_pair_interpolate(space, [&](const Vec3& x) { return grad.psi(x, -1); });
  // Pointwise: the quadratic form loses half the digits near zero.
  const NormReport jr = error_against_exact(space, p->field, c.materials, interp, nullptr);
  const double jump_ratio = jr.jumps() / std::max(jr.volume(), 1e-300);
  line("jump_annihilation", jump_ratio <= 1e-10, jump_ratio);

  const double cstar = trace_constant(p->mesh, m);
  line("trace_constant", std::isfinite(cstar) && cstar > 0.0, cstar);

  const ExactSolution poly = mms_polynomial_pair(m);
  const Solved s = solve_problem(c, *p, space, &poly);
  const double perr = error_against_exact(space, p->field, c.materials, s.sol.x, &poly).total();
  line("consistency", perr <= 1e-8, perr);
  line("certificate", s.sol.stats.certificate_ok, s.sol.stats.residual);

  if (!p->field.empty()) {
    const HarmonicReport h = validate_harmonic_field(p->mesh, p->field);
    line("harmonic_field", h.passed(), std::max({h.curl_residual, h.tangential_residual, h.sigma_residual}),
         h.circulation_applicable ? "circulation " + std::to_string(h.circulation) : "");
  }
  out << (all ? "all checks passed\n" : "some checks failed\n");
  if (!all) throw VerificationFailure("verification failed; see report.txt");
  return 0;
}

int run_convergence(const RunConfig& c) {
  const int m = c.degree;
  std::vector<double> errs, hs;
  std::vector<NormReport> reports;
  for (const auto& level : c.levels) {
    const auto p = load_problem(level, "");
    const DgSpace space(p->mesh, m, !p->field.empty());
    const ExactSolution exact = mms_by_name(c.mms, m, &p->mesh, &p->field);
    const Solved s = solve_problem(c, *p, space, &exact);
    reports.push_back(error_against_exact(space, p->field, c.materials, s.sol.x, &exact));
    errs.push_back(reports.back().total());
    hs.push_back(p->mesh.mesh_size());
    std::cerr << "level " << level << ": error " << errs.back();
    if (exact.k != Complex(0.0) && s.sol.k) std::cerr << ", |k_h - k*| = " << std::abs(*s.sol.k - exact.k);
    std::cerr << "\n";
  }
  const std::vector<double> rates = eoc(errs, hs);
  std::ofstream out = open_output(c, "errors.csv");
  out << "level,h,dg_error,err_curl,err_l2C,err_gradI,jumpC,jumpI,jumpE,eoc\n";
  for (std::size_t i = 0; i < errs.size(); ++i) {
    const auto& r = reports[i].component;
    out << i << "," << hs[i] << "," << errs[i] << "," << r[CurlC] << "," << r[L2C] << "," << r[GradI] << ","
        << r[JumpC] << "," << r[JumpI] << "," << r[JumpE] << ",";
    if (i > 0) out << rates[i - 1];
    out << "\n";
  }
  const double threshold = c.eoc_min > 0.0 ? c.eoc_min : 0.85 * m;
  std::cerr << "final EOC " << rates.back() << " (threshold " << threshold << ")\n";
  if (rates.back() < threshold) throw VerificationFailure("final EOC below threshold");
  return 0;
}

}  // namespace

int run(const RunConfig& config) {
  try {
    for (const auto& w : config.penalties.warnings(config.degree)) std::cerr << "warning: " << w << "\n";
    switch (config.mode) {
      case RunMode::Solve: return run_solve(config);
      case RunMode::Verify: return run_verify(config);
      case RunMode::Convergence: return run_convergence(config);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "mesh error: " << e.what() << "\n";
    return 3;
  } catch (const TopologyError& e) {
    std::cerr << "mesh error: " << e.what() << "\n";
    return 3;
  } catch (const GeometryError& e) {
    std::cerr << "mesh error: " << e.what() << "\n";
    return 3;
  } catch (const CohomologyError& e) {
    std::cerr << "mesh error: " << e.what() << "\n";
    return 3;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 4;
  } catch (const VerificationFailure& e) {
    std::cerr << e.what() << "\n";
    return 5;
  }
  return 0;
}

}  // namespace eddydg
