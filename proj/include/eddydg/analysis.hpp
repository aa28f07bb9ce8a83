#pragma once

#include "eddydg/mms.hpp"
#include "eddydg/solver.hpp"

#include <array>
#include <cstdint>
#include <optional>

namespace eddydg {

enum NormComponent { L2C = 0, CurlC, GradI, JumpC, JumpI, JumpE, AvgC, AvgI, AvgE, kNormComponents };

/// DG norm split into its terms. Components 0-5 form the plain norm, 6-8 are
/// the extra average terms of the star norm.
struct NormReport {
  std::array<double, kNormComponents> component{};
  bool star = false;

  double total() const;
  double volume() const;  // sqrt of the three volume terms squared
  double jumps() const;   // sqrt of the three jump terms squared
};

/// Real symmetric matrices N_c with component_c^2 = Re(x^H N_c x).
struct NormMatrices {
  std::array<SparseMatrixR, kNormComponents> N;
  SparseMatrixR plain() const;
  SparseMatrixR star() const;
};

NormMatrices norm_matrices(const DgSpace& space, const HarmonicField& field, const MaterialConfig& materials);

NormReport dg_norm(const NormMatrices& nm, const VectorXc& x);
NormReport dg_star_norm(const NormMatrices& nm, const VectorXc& x);

/// Componentwise DG (star) norm of exact - discrete, evaluated pointwise with
/// quadrature of degree 2m+4. Exact jumps vanish except on Sigma, where the
/// exact jump is psi* n. A null exact measures x itself.
NormReport error_against_exact(const DgSpace& space, const HarmonicField& field, const MaterialConfig& materials,
                               const VectorXc& x, const ExactSolution* exact, bool star = false);

struct SampleOptions {
  int samples = 100;
  std::uint64_t seed = 20240611;
};

/// Max over pairs of |x^T A y - y^T A x| / max(|x^T A y|, 1).
double check_symmetry(const SparseMatrixC& A, const SampleOptions& opt = {});

/// Min over samples of Re[(1 - i) x^H A x] / ||x||^2 (zero-norm samples skipped).
double check_coercivity(const SparseMatrixC& A, const SparseMatrixR& norm, const SampleOptions& opt = {});

/// Observed orders log(e_i/e_{i+1}) / log(h_i/h_{i+1}).
std::vector<double> eoc(const std::vector<double>& errors, const std::vector<double>& h);

/// max_K max_v h_K ||v||^2_{0,dK} / ||v||^2_{0,K} over scalar polynomials of
/// the given degree (largest generalized eigenvalue per cell).
double trace_constant(const Mesh& mesh, int degree);

/// Largest ratio of the star-minus-plain part to the volume part over samples.
double star_excess_constant(const NormMatrices& nm, const SampleOptions& opt = {});

}  // namespace eddydg
