#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "histspec/hamiltonian.hpp"

namespace histspec {

/// Partially ordered time structure. `relations` are generating pairs
/// (a <= b); validation computes the reflexive-transitive closure, rejects
/// antisymmetry violations and checks that `chain` is totally ordered.
/// For every element the latest chain time below it (t_p) is cached.
struct TimePoset {
  int size = 0;
  std::vector<std::pair<int, int>> relations;
  std::vector<int> chain;  // chain[t] is the element playing time t

  static TimePoset chain_poset(int T);

  void finalize();
  bool leq(int a, int b) const;
  const std::optional<int>& t_of(int p) const;
  int T() const { return int(chain.size()) - 1; }
  bool finalized() const { return !leq_.empty(); }

 private:
  std::vector<std::vector<bool>> leq_;
  std::vector<std::optional<int>> t_of_;
};

/// Standard history state: amplitudes over poset labels, one computational
/// vector per label, clock labels kept as distinct product-basis strings.
struct HistoryState {
  int n = 1, d = 2;
  TimePoset poset;
  std::vector<std::string> clock_labels;
  Vector amplitudes;
  std::vector<Vector> comp_states;
  std::map<int, Matrix> junk_unitaries;  // V_p actually used for p outside the chain

  void validate(double tol = 1e-10) const;
};

Vector uniform_amplitudes(int count);
Vector geometric_amplitudes(int count, double rate);  // alpha_t proportional to e^{-rate t}
/// Uniform profile with alpha_t = 0 on the window lo <= t <= hi.
Vector zero_window_amplitudes(int count, int lo, int hi);

/// Builds the history state of a circuit: chain states from evolve(), junk
/// labels via psi_p = V_p psi_{t_p}. Labels with neither a chain time below
/// them nor an explicit state are an error.
HistoryState standard_history_state(const Circuit& circuit, const Vector& amplitudes,
                                    const Vector& initial, const TimePoset& poset,
                                    const std::map<int, Matrix>& junk = {},
                                    const std::map<int, Vector>& explicit_states = {});

/// <a|b> assuming both states share the same poset and clock labels.
Complex history_overlap(const HistoryState& a, const HistoryState& b);

/// Embed a chain-poset history state into the full space of a compiled
/// Feynman-Kitaev Hamiltonian.
Vector embed_history_state(const HistoryState& hs, const CompiledHamiltonian& ch);

// --- proof-machinery states -------------------------------------------------

struct TruncatedStates {
  HistoryState psi_tilde;  // renormalized restriction of the input to R
  HistoryState phi_tilde;  // same restriction, trajectory from the flipped initial
  double truncated_mass = 0.0;  // alpha = sum over P \ R of |alpha_p|^2
};

/// R = {p : t_p >= r+1}. phi runs the flipped initial through the same gates
/// and junk unitaries, so <phi_tilde | psi> = 0 exactly.
TruncatedStates truncated_states(const Circuit& circuit, const HistoryState& hs, int r,
                                 const Vector& flipped_initial);

struct XiSplit {
  HistoryState xi0;  // restriction to P \ B_{x0}
  HistoryState xi1;  // restriction to B_{x0}
  double lambda = 0.0;
};

/// B_{x0} = {p : t_p >= x0 * r}; Psi = sqrt(lambda) xi0 + sqrt(1-lambda) xi1.
XiSplit xi_split(const HistoryState& hs, long long x0, long long r);

// --- amplitude-distribution checkers ----------------------------------------

struct AmplitudeCheckParams {
  int n = 4, d = 2;
  long long r = 1, r1 = 1;
  double theta = 2.0;          // tail threshold is 1/n^{theta-1}
  double ratio_constant = 1.0; // ratio threshold is ratio_constant / n
  double q_poly = 1.0;         // q(n) entering the design-depth scale
  double C = 1.0;
  std::optional<double> scaled_constant;  // user replacement for the literal scale
  std::optional<long long> x0;            // case 2: check only this cut
};

struct Case1Report {
  double numerator = 0, denominator = 0, ratio = 0, tail_mass = 0;
  double ratio_threshold = 0, tail_threshold = 0;
  bool ratio_ok = false, tail_ok = false, pass = false;
  double literal_scale_log10 = 0;
  bool r_clears_literal = false, r_clears_scaled = false;
};

struct Case2SliceInfo {
  long long x0 = 0;
  double slice_mass = 0, lambda = 0, one_minus_lambda = 0;
  bool ineq1 = false, ineq2 = false, ineq3 = false;
};

struct Case2Report {
  long long u = 0;
  double kappa = 0;
  long long x_min = 2, x_max = 1;  // admissible cut range searched (empty if x_max < x_min)
  double slice_threshold = 0, mass_threshold = 0;
  std::vector<Case2SliceInfo> slices;
  std::optional<long long> x0_found;
  bool pass = false;
  double literal_scale_log10 = 0;
  bool r_clears_literal = false, r_clears_scaled = false;
};

Case1Report check_amplitudes_case1(const HistoryState& hs, const AmplitudeCheckParams& p);
Case2Report check_amplitudes_case2(const HistoryState& hs, const AmplitudeCheckParams& p);

// --- generalized history states and the reduction ---------------------------

struct SiteSector {
  std::vector<int> symbol_dims;
  int dim() const;
  int offset(int symbol) const;  // index of the symbol block inside the site space
};

struct GeneralizedHistoryState {
  int n = 1, d = 2;
  std::vector<SiteSector> sites;
  TimePoset poset;
  std::vector<std::vector<int>> assignments;   // x(p): one symbol index per site
  std::vector<std::vector<int>> active_sites;  // xi(p): the n sites carrying the computation
  Vector amplitudes;
  std::vector<Vector> comp_states;

  enum class JunkFlavor { CircuitIndependent, SmallCircuit };
  struct Junk {
    Matrix v;
    JunkFlavor flavor = JunkFlavor::CircuitIndependent;
    int circuit_size = 0;
  };
  std::map<int, Junk> junk;

  int num_sites() const { return int(sites.size()); }
  std::vector<int> site_dims() const;
  void validate() const;
  Vector to_vector() const;  // in the full product of site spaces
};

struct ReductionResult {
  LocalHamiltonian reduced;  // on 2N factors: [d, L_1, d, L_2, ...]
  HistoryState history;      // Psi' with product clock labels
  std::vector<std::vector<int>> kept_symbols;    // per site, sorted symbol indices kept
  std::vector<std::uint64_t> subspace_indices;   // H'-subspace basis inside the input space
  int k_input = 0, k_output = 0;                 // max term localities before/after
};

/// Theorem-3 style reduction: restrict to the referenced symbol blocks, split
/// every site into a d-dimensional slot plus a label slot, and re-express each
/// term over at most twice as many factors. Spectral comparisons against the
/// input go through subspace_indices (the restriction map).
ReductionResult reduce_to_standard(const GeneralizedHistoryState& gen, const LocalHamiltonian& h);

/// Dense compression of an assembled operator onto a basis subset.
Matrix restrict_dense(const SparseOperator& op, const std::vector<std::uint64_t>& idx);
Vector restrict_vector(const Vector& v, const std::vector<std::uint64_t>& idx);

// --- fixtures ----------------------------------------------------------------

struct GeneralizedInstance {
  GeneralizedHistoryState gen;
  LocalHamiltonian hamiltonian;
  Circuit circuit;
};

/// Unary-clock shape with T clock qubits next to the computational sites,
/// paired with the matching domain-wall Hamiltonian whose unique ground state
/// is the uniform history state.
GeneralizedInstance kitaev_unary_instance(const Circuit& circuit);

/// Poset-clock instances used for randomized reduction tests: a chain with
/// junk labels hanging off it, label sites encoding the poset element, and a
/// frustration-free propagation Hamiltonian pinned at the input.
GeneralizedInstance random_generalized_instance(Rng& rng);

/// Location-encoded clock shape: the active qudit walks along the chain.
GeneralizedHistoryState agik_location_shape(int T);

/// Per-qudit clock shape over valid time configurations (poset time).
GeneralizedHistoryState spacetime_shape(int n, int T);

}  // namespace histspec
