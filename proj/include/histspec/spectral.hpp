#pragma once

#include <cstdint>
#include <vector>

#include "histspec/hamiltonian.hpp"

namespace histspec {

enum class SolverMethod { Dense, Krylov };

struct SpectralOptions {
  double tol = 1e-8;              // required eigenpair residual
  int max_restarts = 400;
  int block = 96;                 // Krylov subspace size per sweep
  std::uint64_t dense_cap = 4096;
  std::uint64_t krylov_cap = kDefaultDimCap;
  double degeneracy_tol = 1e-10;  // E1 - E0 below this counts as degenerate
  int level_deflate_cap = 160;    // max eigenpairs walked to find the level gap
  bool want_level_gap = true;
  std::uint64_t seed = 0x85EBCA6B;
};

struct SpectrumResult {
  double e0 = 0.0;
  double gap = 0.0;        // E1 - E0 between the two lowest eigenvalues
  bool degenerate = false;
  double level_gap = 0.0;  // first eigenvalue above E0 + degeneracy_tol, minus E0
  bool level_gap_truncated = false;
  int ground_multiplicity = 1;
  Vector ground_vector;
  std::vector<double> eigenvalues;  // found, ascending
  std::vector<double> residuals;    // per reported eigenpair
  SolverMethod method = SolverMethod::Dense;
};

/// Two lowest eigenpairs (plus the lowest distinct level above a degenerate
/// ground space when requested). Dense path diagonalizes fully; the Krylov
/// path runs restarted Lanczos with full reorthogonalization, deflating each
/// converged vector before the next solve.
SpectrumResult ground_and_gap(const SparseOperator& op, SolverMethod method,
                              const SpectralOptions& opts = {});

/// <v|H|v> computed term-by-term without assembling; requires ||v|| = 1 to
/// 1e-10 and asserts the imaginary residue stays below 1e-10.
double energy(const Vector& v, const LocalHamiltonian& h);

struct LowEnergyCount {
  std::uint64_t count = 0;
  bool lower_bound_only = false;  // deflation cap reached before crossing threshold
};

/// Number of eigenvalues <= threshold (exact when dense, deflation-walk with
/// a cap when Krylov).
LowEnergyCount low_energy_dimension(const SparseOperator& op, double threshold,
                                    SolverMethod method, const SpectralOptions& opts = {});

}  // namespace histspec
