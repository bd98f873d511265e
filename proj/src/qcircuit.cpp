#include "histspec/qcircuit.hpp"

#include <cmath>

#include "histspec/errors.hpp"

namespace histspec {

std::uint64_t QuditRegister::dim() const {
  std::uint64_t total = 1;
  for (int i = 0; i < n; ++i) {
    total *= std::uint64_t(d);
    if (total > dim_cap)
      throw ResourceError("register dimension d^n exceeds cap: required > " +
                          std::to_string(dim_cap));
  }
  return total;
}

void QuditRegister::validate() const {
  if (n < 1) throw ValidationError("register needs n >= 1 qudits");
  if (d < 2) throw ValidationError("local dimension must satisfy d >= 2");
  dim();
}

void Circuit::validate(double unitary_tol) const {
  reg.validate();
  const int dsq = reg.d * reg.d;
  for (int t = 0; t < T(); ++t) {
    const Gate& g = gates[t];
    if (g.time_index != t + 1)
      throw ValidationError("gate time indices must be exactly 1..T in order");
    if (g.u.rows() != dsq || g.u.cols() != dsq)
      throw ValidationError("gate matrix must be d^2 x d^2");
    if (g.site == 0) {
      if (!g.u.isIdentity(unitary_tol))
        throw ValidationError("site 0 is reserved for identity placeholder gates");
    } else if (g.site < 1 || g.site > reg.n - 1) {
      throw ValidationError("gate site out of range 1..n-1 at t=" + std::to_string(t + 1));
    }
    const Matrix defect = g.u * g.u.adjoint() - Matrix::Identity(dsq, dsq);
    if (operator_norm(defect) > unitary_tol)
      throw ValidationError("gate at t=" + std::to_string(t + 1) + " is not unitary to 1e-12");
  }
}

Circuit Circuit::identity(const QuditRegister& reg, int T) {
  reg.validate();
  if (T < 0) throw ValidationError("T must be >= 0");
  Circuit c;
  c.reg = reg;
  const int dsq = reg.d * reg.d;
  for (int t = 1; t <= T; ++t)
    c.gates.push_back(Gate{t, 0, Matrix::Identity(dsq, dsq)});
  return c;
}

Matrix haar_unitary(int dim, Rng& rng) {
  if (dim < 1) throw ValidationError("haar_unitary needs dim >= 1");
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      const double re = rng.gaussian();
      const double im = rng.gaussian();
      g(i, j) = Complex(re, im);
    }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix& qrm = qr.matrixQR();
  for (int j = 0; j < dim; ++j) {
    Complex r = qrm(j, j);
    const double a = std::abs(r);
    const Complex phase = (a > 0) ? r / a : Complex(1, 0);
    q.col(j) *= phase;
  }
  return q;
}

Circuit sample_local_random_circuit(const QuditRegister& reg, int T, Rng& rng) {
  reg.validate();
  if (reg.n < 2) throw ValidationError("local random circuit needs n >= 2 (no valid site)");
  if (T < 1) throw ValidationError("local random circuit needs T >= 1");
  Circuit c;
  c.reg = reg;
  c.gates.reserve(T);
  for (int t = 1; t <= T; ++t) {
    const int site = 1 + int(rng.below(std::uint64_t(reg.n - 1)));
    c.gates.push_back(Gate{t, site, haar_unitary(reg.d * reg.d, rng)});
  }
  return c;
}

Vector basis_state(const QuditRegister& reg, std::uint64_t index) {
  const std::uint64_t dim = reg.dim();
  if (index >= dim) throw ValidationError("basis index out of range");
  Vector v = Vector::Zero(dim);
  v[index] = Complex(1, 0);
  return v;
}

void apply_gate(const QuditRegister& reg, const Gate& gate, Vector& state) {
  const std::uint64_t dim = reg.dim();
  if (std::uint64_t(state.size()) != dim)
    throw ValidationError("state dimension mismatch with register");
  if (gate.site == 0) return;  // identity placeholder
  const int d = reg.d;
  const int dsq = d * d;
  std::uint64_t pre = 1, post = 1;
  for (int i = 1; i < gate.site; ++i) pre *= d;
  for (int i = gate.site + 2; i <= reg.n; ++i) post *= d;
  Vector block(dsq);
  for (std::uint64_t a = 0; a < pre; ++a) {
    const std::uint64_t abase = a * dsq * post;
    for (std::uint64_t b = 0; b < post; ++b) {
      for (int g = 0; g < dsq; ++g) block[g] = state[abase + std::uint64_t(g) * post + b];
      block = gate.u * block;
      for (int g = 0; g < dsq; ++g) state[abase + std::uint64_t(g) * post + b] = block[g];
    }
  }
}

std::vector<Vector> evolve(const Circuit& circuit, const Vector& initial) {
  const std::uint64_t dim = circuit.reg.dim();
  if (std::uint64_t(initial.size()) != dim)
    throw ValidationError("initial state dimension mismatch");
  if (std::abs(initial.norm() - 1.0) > 1e-12)
    throw ValidationError("initial state must be normalized to 1e-12");
  std::vector<Vector> traj;
  traj.reserve(circuit.T() + 1);
  traj.push_back(initial);
  Vector cur = initial;
  for (const Gate& g : circuit.gates) {
    apply_gate(circuit.reg, g, cur);
    traj.push_back(cur);
  }
  return traj;
}

double operator_norm(const Matrix& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()[0];
}

}  // namespace histspec
