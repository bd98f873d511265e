#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "histspec/rng.hpp"

namespace histspec {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

constexpr std::uint64_t kDefaultDimCap = std::uint64_t(1) << 22;

struct QuditRegister {
  int n = 1;  // computational qudits
  int d = 2;  // local dimension
  std::uint64_t dim_cap = kDefaultDimCap;

  std::uint64_t dim() const;  // d^n, validated against dim_cap
  void validate() const;
};

/// One two-qudit gate. Gates act on the adjacent pair (site, site+1),
/// sites 1-based as positions 1..n-1. site == 0 encodes a placeholder
/// identity gate (the only way to express a do-nothing circuit on n = 1).
struct Gate {
  int time_index = 1;
  int site = 1;
  Matrix u;  // d^2 x d^2
};

struct Circuit {
  QuditRegister reg;
  std::vector<Gate> gates;
  std::optional<std::uint64_t> seed;

  int T() const { return static_cast<int>(gates.size()); }
  void validate(double unitary_tol = 1e-12) const;

  static Circuit identity(const QuditRegister& reg, int T);
};

/// Haar-distributed unitary: complex Ginibre sample, QR factorization,
/// R-diagonal phases folded back into Q.
Matrix haar_unitary(int dim, Rng& rng);

/// The local random circuit model: at every step a site is drawn uniformly
/// from 1..n-1 and a Haar gate from U(d^2) is applied to that adjacent pair.
Circuit sample_local_random_circuit(const QuditRegister& reg, int T, Rng& rng);

/// Computational basis state |index> of the register (site 1 most significant).
Vector basis_state(const QuditRegister& reg, std::uint64_t index);

/// Apply gate to a state of dimension d^n, contracting only the two target
/// site indices (never forms the d^n x d^n matrix).
void apply_gate(const QuditRegister& reg, const Gate& gate, Vector& state);

/// Full trajectory psi_0..psi_T with psi_t = U_t psi_{t-1}.
std::vector<Vector> evolve(const Circuit& circuit, const Vector& initial);

double operator_norm(const Matrix& m);  // largest singular value

}  // namespace histspec
