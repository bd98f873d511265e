#pragma once

#include <cstdint>
#include <vector>

#include "histspec/qcircuit.hpp"

namespace histspec {

struct CrossOverlapResult {
  double value = 0.0;                     // max over windows and the theta grid
  std::vector<double> per_subset;         // grid max per window
  std::vector<double> envelope;           // per-window upper bound
  std::vector<std::vector<int>> subsets;  // the k-site windows, 0-based
  int grid = 64;
};

/// max_{h k-local Hermitian, ||h|| <= 1} |<psi| h |phi>| via windowed partial
/// traces: for each k-subset A form M_A = Tr_{A^c} |phi><psi| and take the
/// trace norm of cos(theta) Herm(M_A) + sin(theta) AntiHerm(M_A)/i over a
/// theta grid. Nondecreasing under grid refinement; the envelope column is
/// sqrt(||Herm||_1^2 + ||AntiHerm||_1^2) per window.
CrossOverlapResult local_cross_overlap_max(const Vector& psi, const Vector& phi, int n, int d,
                                           int k, int theta_grid = 64);

struct FhProfilePoint {
  int depth = 0;
  double value = 0.0;
};

/// Local distinguishability decay along a circuit: both trajectories start
/// from |0^n> and |0^{n-1}1> and share every gate. The reported value at each
/// checkpoint is the squared windowed trace distance
/// max_A (||rho_psi_A - rho_phi_A||_1 / 2)^2, the squared functional that the
/// design-based concentration statements control; orthogonal single-site
/// states read exactly 1.
std::vector<FhProfilePoint> fh_decay_profile(const Circuit& circuit, int k,
                                             const std::vector<int>& checkpoints);

struct DesignEnsembleSpec {
  enum class Kind { Haar, LocalRandomCircuit };
  Kind kind = Kind::Haar;
  int n = 2, d = 2;
  int depth = 0;  // circuit length for the local random circuit ensemble
  int samples = 100;
  std::uint64_t seed = 1;
};

struct FramePotentialResult {
  double estimate = 0.0;
  double stderr_ = 0.0;
  double haar_reference = 0.0;  // s! (valid once the dimension reaches s)
  int s = 1;
  int samples = 0;
};

/// Monte-Carlo estimate of E |Tr(U^dag V)|^{2s} over i.i.d. pairs.
FramePotentialResult frame_potential(const DesignEnsembleSpec& spec, int s);

/// Dense matrix of a circuit (columns = evolved basis states).
Matrix circuit_unitary(const Circuit& circuit);

}  // namespace histspec
