#pragma once

#include <Eigen/Sparse>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "histspec/qcircuit.hpp"

namespace histspec {

/// One Hermitian interaction term. `support` lists the qudits (0-based,
/// over the full clock+computational system) the term acts on, sorted
/// ascending; `matrix` has dimension prod of the local dims over support,
/// with the first support site most significant.
struct LocalTerm {
  std::vector<int> support;
  Matrix matrix;
};

struct LocalHamiltonian {
  std::vector<int> dims;  // per-qudit local dimensions, length m
  std::vector<LocalTerm> terms;

  int num_qudits() const { return static_cast<int>(dims.size()); }
  std::uint64_t dim(std::uint64_t cap = kDefaultDimCap) const;
  std::uint64_t term_dim(const LocalTerm& t) const;
  void validate(double herm_tol = 1e-12) const;
};

struct NormalizationReport {
  double gamma = 0.0;
  std::vector<double> per_qudit;
  std::optional<double> epsilon;  // set when the quasi-local weight was used
};

/// Per-qudit sums of term operator norms; gamma is the max over qudits.
NormalizationReport gamma_norm(const LocalHamiltonian& h);

/// Same sums with each term weighted by exp(k^{1+eps}), k = |support|.
NormalizationReport quasi_local_norm(const LocalHamiltonian& h, double eps);

enum class ClockKind { Register, Unary };
enum class Rescale { None, ByT };

struct CompileOptions {
  ClockKind clock = ClockKind::Register;
  bool include_input_penalty = true;
  std::vector<int> witness_sites;  // 1-based computational sites exempt from the input penalty
  Rescale rescale = Rescale::None;
  std::uint64_t dim_cap = kDefaultDimCap;
};

/// Compiled clock Hamiltonian plus the layout needed to embed history states.
struct CompiledHamiltonian {
  LocalHamiltonian hamiltonian;
  CompileOptions options;
  int n = 0, d = 2, T = 0;
  int clock_qudits = 0;  // 1 for register clock, T+1 for unary
  std::vector<std::string> warnings;

  std::uint64_t dim() const { return hamiltonian.dim(options.dim_cap); }
  std::uint64_t clock_dim() const;
  /// Index of the clock basis state encoding time t within the clock factor.
  std::uint64_t clock_basis_index(int t) const;
  /// Full-space index of |t> (clock) tensor |comp>.
  std::uint64_t basis_index(int t, std::uint64_t comp) const;
};

/// Standard propagation + input penalty (+ clock validity, for the unary
/// clock) construction. The uniform-amplitude history state of the circuit
/// is a ground state with energy 0; with input penalties on all sites it is
/// the unique one. Gates that are exact identity placeholders compile to
/// clock-only propagation terms.
CompiledHamiltonian compile_feynman_kitaev(const Circuit& circuit, const CompileOptions& options);

struct SparseOperator {
  std::uint64_t dim = 0;
  Eigen::SparseMatrix<Complex, Eigen::RowMajor> mat;
};

/// Sum of terms tensored with identity elsewhere, deterministic insertion
/// order, Hermiticity verified to 1e-12.
SparseOperator assemble(const LocalHamiltonian& h, std::uint64_t dim_cap = kDefaultDimCap);

/// y += scale * (term acting on x), contracting only the support indices.
void apply_term_add(const std::vector<int>& dims, const LocalTerm& term, const Vector& x,
                    Vector& y, Complex scale = Complex(1, 0));

/// Matrix-free H|x>.
Vector apply_hamiltonian(const LocalHamiltonian& h, const Vector& x);

// --- fixtures -------------------------------------------------------------

/// m identical copies of a single term: gamma grows linearly in m.
LocalHamiltonian duplicated_term_fixture(const LocalTerm& term, int copies);

/// Clock Hamiltonian whose clock graph is the cube_dim-dimensional unit
/// hypercube (cube_dim = log2 T): sum over directions j of
/// (1/2)(I - X_j (x) Z_comp) on cube_dim clock qubits plus one qubit.
/// Constant spectral gap 1, but the per-qudit interaction sum on the shared
/// qubit grows as cube_dim.
LocalHamiltonian hypercube_clock_fixture(int cube_dim);

/// H_FK minus an energy bonus |0><0|_clock (x) |psi_0><psi_0| on the circuit
/// input: gapped, with geometrically decaying history-state amplitudes.
CompiledHamiltonian input_bonus_fixture(const Circuit& circuit, const CompileOptions& options);

}  // namespace histspec
