#include "histspec/hamiltonian.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "histspec/errors.hpp"

namespace histspec {

namespace {

Matrix kron2(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double hermitian_norm(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
}

double hermiticity_defect(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

std::vector<std::uint64_t> strides_of(const std::vector<int>& dims) {
  std::vector<std::uint64_t> s(dims.size());
  std::uint64_t acc = 1;
  for (int q = int(dims.size()) - 1; q >= 0; --q) {
    s[q] = acc;
    acc *= std::uint64_t(dims[q]);
  }
  return s;
}

// Offsets of the support sub-index inside the full index, one per support
// configuration (first support site most significant).
std::vector<std::uint64_t> support_offsets(const std::vector<int>& dims,
                                           const std::vector<int>& support,
                                           const std::vector<std::uint64_t>& strides) {
  std::uint64_t block = 1;
  for (int q : support) block *= std::uint64_t(dims[q]);
  std::vector<std::uint64_t> offs(block, 0);
  std::uint64_t repeat = block;
  for (int j = 0; j < int(support.size()); ++j) {
    const int q = support[j];
    const std::uint64_t dq = std::uint64_t(dims[q]);
    repeat /= dq;
    for (std::uint64_t a = 0; a < block; ++a) {
      const std::uint64_t digit = (a / repeat) % dq;
      offs[a] += digit * strides[q];
    }
  }
  return offs;
}

}  // namespace

std::uint64_t LocalHamiltonian::dim(std::uint64_t cap) const {
  std::uint64_t total = 1;
  for (int d : dims) {
    total *= std::uint64_t(d);
    if (total > cap)
      throw ResourceError("total dimension exceeds cap: required > " + std::to_string(cap) +
                          ", available " + std::to_string(cap));
  }
  return total;
}

std::uint64_t LocalHamiltonian::term_dim(const LocalTerm& t) const {
  std::uint64_t p = 1;
  for (int q : t.support) p *= std::uint64_t(dims[q]);
  return p;
}

void LocalHamiltonian::validate(double herm_tol) const {
  for (int d : dims)
    if (d < 1) throw ValidationError("local dimensions must be >= 1");
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const LocalTerm& t = terms[i];
    if (t.support.empty())
      throw ValidationError("term " + std::to_string(i) + " has empty support");
    if (!std::is_sorted(t.support.begin(), t.support.end()) ||
        std::adjacent_find(t.support.begin(), t.support.end()) != t.support.end())
      throw ValidationError("term " + std::to_string(i) + " support must be sorted and unique");
    for (int q : t.support)
      if (q < 0 || q >= num_qudits())
        throw ValidationError("term " + std::to_string(i) + " support index out of range");
    const std::uint64_t p = term_dim(t);
    if (std::uint64_t(t.matrix.rows()) != p || std::uint64_t(t.matrix.cols()) != p)
      throw ValidationError("term " + std::to_string(i) + " matrix dimension mismatch");
    if (hermiticity_defect(t.matrix) > herm_tol)
      throw ValidationError("term " + std::to_string(i) + " is not Hermitian to tolerance");
  }
}

NormalizationReport gamma_norm(const LocalHamiltonian& h) {
  h.validate();
  NormalizationReport rep;
  rep.per_qudit.assign(h.num_qudits(), 0.0);
  for (const LocalTerm& t : h.terms) {
    const double nrm = hermitian_norm(t.matrix);
    for (int q : t.support) rep.per_qudit[q] += nrm;
  }
  rep.gamma = rep.per_qudit.empty()
                  ? 0.0
                  : *std::max_element(rep.per_qudit.begin(), rep.per_qudit.end());
  return rep;
}

NormalizationReport quasi_local_norm(const LocalHamiltonian& h, double eps) {
  if (eps <= 0) throw ValidationError("quasi-local norm needs eps > 0");
  h.validate();
  NormalizationReport rep;
  rep.epsilon = eps;
  rep.per_qudit.assign(h.num_qudits(), 0.0);
  for (const LocalTerm& t : h.terms) {
    const double k = double(t.support.size());
    const double weight = std::exp(std::pow(k, 1.0 + eps));
    const double nrm = hermitian_norm(t.matrix) * weight;
    for (int q : t.support) rep.per_qudit[q] += nrm;
  }
  rep.gamma = rep.per_qudit.empty()
                  ? 0.0
                  : *std::max_element(rep.per_qudit.begin(), rep.per_qudit.end());
  return rep;
}

std::uint64_t CompiledHamiltonian::clock_dim() const {
  if (options.clock == ClockKind::Register) return std::uint64_t(T) + 1;
  return std::uint64_t(1) << (T + 1);
}

std::uint64_t CompiledHamiltonian::clock_basis_index(int t) const {
  if (t < 0 || t > T) throw ValidationError("clock time out of range");
  if (options.clock == ClockKind::Register) return std::uint64_t(t);
  // Unary string 1^t 0^{T+1-t} over T+1 clock qubits, first qubit most significant.
  const std::uint64_t full = std::uint64_t(1) << (T + 1);
  return full - (full >> t);
}

std::uint64_t CompiledHamiltonian::basis_index(int t, std::uint64_t comp) const {
  std::uint64_t dn = 1;
  for (int i = 0; i < n; ++i) dn *= std::uint64_t(d);
  if (comp >= dn) throw ValidationError("computational index out of range");
  return clock_basis_index(t) * dn + comp;
}

CompiledHamiltonian compile_feynman_kitaev(const Circuit& circuit, const CompileOptions& options) {
  circuit.validate();
  CompiledHamiltonian out;
  out.options = options;
  out.n = circuit.reg.n;
  out.d = circuit.reg.d;
  out.T = circuit.T();
  const int n = out.n, d = out.d, T = out.T;
  const int dsq = d * d;

  LocalHamiltonian& H = out.hamiltonian;
  int comp_base = 0;
  if (options.clock == ClockKind::Register) {
    out.clock_qudits = 1;
    H.dims.push_back(T + 1);
    comp_base = 1;
  } else {
    if (T + 1 >= 62)
      throw ResourceError("unary clock with T=" + std::to_string(T) + " exceeds memory budget");
    out.clock_qudits = T + 1;
    H.dims.assign(T + 1, 2);
    comp_base = T + 1;
  }
  for (int i = 0; i < n; ++i) H.dims.push_back(d);
  H.dim(options.dim_cap);  // throws ResourceError on overflow

  auto comp_support = [&](const Gate& g) {
    std::vector<int> s;
    if (g.site != 0) {
      s.push_back(comp_base + g.site - 1);
      s.push_back(comp_base + g.site);
    }
    return s;
  };

  // Propagation terms, t = 1..T.
  for (int t = 1; t <= T; ++t) {
    const Gate& g = circuit.gates[t - 1];
    const std::vector<int> cs = comp_support(g);
    const Matrix gate_id = Matrix::Identity(cs.empty() ? 1 : dsq, cs.empty() ? 1 : dsq);
    const Matrix& U = g.u;

    LocalTerm term;
    if (options.clock == ClockKind::Register) {
      Matrix pt = Matrix::Zero(T + 1, T + 1), pt1 = Matrix::Zero(T + 1, T + 1);
      Matrix hop = Matrix::Zero(T + 1, T + 1);
      pt(t, t) = 1;
      pt1(t - 1, t - 1) = 1;
      hop(t, t - 1) = 1;
      term.support = {0};
      if (cs.empty()) {
        term.matrix = 0.5 * (pt + pt1) - 0.5 * (hop + hop.adjoint());
      } else {
        term.support.insert(term.support.end(), cs.begin(), cs.end());
        term.matrix = 0.5 * kron2(pt + pt1, gate_id) -
                      0.5 * (kron2(hop, U) + kron2(hop.adjoint(), U.adjoint()));
      }
    } else {
      // Domain-wall clock: the t-1 -> t transition flips clock qubit t
      // (1-based), conditioned on qubit t-1 = 1 (when it exists) and
      // qubit t+1 = 0 (always present with T+1 clock qubits).
      std::vector<int> cl;
      int dim_cl;
      Eigen::Index ia, ib;  // basis indices of the pre/post clock patterns
      if (t == 1) {
        cl = {0, 1};
        dim_cl = 4;
        ia = 0;  // |00>
        ib = 2;  // |10>
      } else {
        cl = {t - 2, t - 1, t};
        dim_cl = 8;
        ia = 4;  // |100>
        ib = 6;  // |110>
      }
      Matrix pa = Matrix::Zero(dim_cl, dim_cl), pb = Matrix::Zero(dim_cl, dim_cl);
      Matrix hop = Matrix::Zero(dim_cl, dim_cl);
      pa(ia, ia) = 1;
      pb(ib, ib) = 1;
      hop(ib, ia) = 1;
      term.support = cl;
      if (cs.empty()) {
        term.matrix = 0.5 * (pa + pb) - 0.5 * (hop + hop.adjoint());
      } else {
        term.support.insert(term.support.end(), cs.begin(), cs.end());
        term.matrix = 0.5 * kron2(pa + pb, gate_id) -
                      0.5 * (kron2(hop, U) + kron2(hop.adjoint(), U.adjoint()));
      }
    }
    H.terms.push_back(std::move(term));
  }

  // Clock validity (unary only): penalize "01" patterns and a 1 in the last
  // clock qubit, leaving exactly the T+1 domain-wall strings unpunished.
  if (options.clock == ClockKind::Unary) {
    for (int j = 0; j + 1 <= T; ++j) {
      Matrix p01 = Matrix::Zero(4, 4);
      p01(1, 1) = 1;
      H.terms.push_back(LocalTerm{{j, j + 1}, p01});
    }
    Matrix p1 = Matrix::Zero(2, 2);
    p1(1, 1) = 1;
    H.terms.push_back(LocalTerm{{T}, p1});
  }

  // Input penalties: |0><0|_clock (x) (I - |0><0|) per non-witness site.
  if (options.include_input_penalty) {
    std::vector<bool> witness(n + 1, false);
    for (int w : options.witness_sites) {
      if (w < 1 || w > n) throw ValidationError("witness site out of range");
      witness[w] = true;
    }
    bool any = false;
    Matrix clock0;
    if (options.clock == ClockKind::Register) {
      clock0 = Matrix::Zero(T + 1, T + 1);
      clock0(0, 0) = 1;
    } else {
      clock0 = Matrix::Zero(2, 2);
      clock0(0, 0) = 1;  // first clock qubit = 0 iff t = 0
    }
    Matrix not0 = Matrix::Identity(d, d);
    not0(0, 0) = 0;
    for (int i = 1; i <= n; ++i) {
      if (witness[i]) continue;
      any = true;
      H.terms.push_back(LocalTerm{{0, comp_base + i - 1}, kron2(clock0, not0)});
    }
    if (!any)
      out.warnings.push_back("witness mask covers all sites: no input constraint emitted");
  }

  if (options.rescale == Rescale::ByT && T >= 1) {
    for (LocalTerm& t : H.terms) t.matrix /= double(T);
  }
  return out;
}

SparseOperator assemble(const LocalHamiltonian& h, std::uint64_t dim_cap) {
  h.validate();
  const std::uint64_t dim = h.dim(dim_cap);
  const auto strides = strides_of(h.dims);

  std::vector<Eigen::Triplet<Complex>> triplets;
  for (const LocalTerm& term : h.terms) {
    const auto offs = support_offsets(h.dims, term.support, strides);
    const std::uint64_t block = offs.size();
    std::uint64_t complement = dim;
    for (int q : term.support) complement /= std::uint64_t(h.dims[q]);

    // Odometer over the complement sites.
    std::vector<int> comp_sites;
    for (int q = 0; q < h.num_qudits(); ++q)
      if (!std::binary_search(term.support.begin(), term.support.end(), q))
        comp_sites.push_back(q);
    std::vector<int> digit(comp_sites.size(), 0);
    std::uint64_t base = 0;
    for (std::uint64_t c = 0; c < complement; ++c) {
      for (std::uint64_t a = 0; a < block; ++a)
        for (std::uint64_t b = 0; b < block; ++b) {
          const Complex v = term.matrix(a, b);
          if (v != Complex(0, 0))
            triplets.emplace_back(Eigen::Index(base + offs[a]), Eigen::Index(base + offs[b]), v);
        }
      for (int j = int(comp_sites.size()) - 1; j >= 0; --j) {
        const int q = comp_sites[j];
        base += strides[q];
        if (++digit[j] < h.dims[q]) break;
        base -= strides[q] * std::uint64_t(h.dims[q]);
        digit[j] = 0;
      }
    }
  }

  SparseOperator op;
  op.dim = dim;
  op.mat.resize(Eigen::Index(dim), Eigen::Index(dim));
  op.mat.setFromTriplets(triplets.begin(), triplets.end());
  op.mat.makeCompressed();

  const Eigen::SparseMatrix<Complex, Eigen::RowMajor> adj = op.mat.adjoint();
  const Eigen::SparseMatrix<Complex, Eigen::RowMajor> defect = op.mat - adj;
  double worst = 0.0;
  for (int k = 0; k < defect.outerSize(); ++k)
    for (Eigen::SparseMatrix<Complex, Eigen::RowMajor>::InnerIterator it(defect, k); it; ++it)
      worst = std::max(worst, std::abs(it.value()));
  if (worst > 1e-12)
    throw ValidationError("assembled operator is not Hermitian: defect " + std::to_string(worst));
  return op;
}

void apply_term_add(const std::vector<int>& dims, const LocalTerm& term, const Vector& x,
                    Vector& y, Complex scale) {
  const auto strides = strides_of(dims);
  const auto offs = support_offsets(dims, term.support, strides);
  const std::uint64_t block = offs.size();
  std::uint64_t dim = 1;
  for (int d : dims) dim *= std::uint64_t(d);
  std::uint64_t complement = dim;
  for (int q : term.support) complement /= std::uint64_t(dims[q]);

  std::vector<int> comp_sites;
  for (int q = 0; q < int(dims.size()); ++q)
    if (!std::binary_search(term.support.begin(), term.support.end(), q)) comp_sites.push_back(q);

  Vector in(block), outb(block);
  std::vector<int> digit(comp_sites.size(), 0);
  std::uint64_t base = 0;
  for (std::uint64_t c = 0; c < complement; ++c) {
    for (std::uint64_t a = 0; a < block; ++a) in[a] = x[base + offs[a]];
    outb.noalias() = term.matrix * in;
    for (std::uint64_t a = 0; a < block; ++a) y[base + offs[a]] += scale * outb[a];
    for (int j = int(comp_sites.size()) - 1; j >= 0; --j) {
      const int q = comp_sites[j];
      base += strides[q];
      if (++digit[j] < dims[q]) break;
      base -= strides[q] * std::uint64_t(dims[q]);
      digit[j] = 0;
    }
  }
}

Vector apply_hamiltonian(const LocalHamiltonian& h, const Vector& x) {
  if (std::uint64_t(x.size()) != h.dim())
    throw ValidationError("vector dimension mismatch in apply_hamiltonian");
  Vector y = Vector::Zero(x.size());
  for (const LocalTerm& t : h.terms) apply_term_add(h.dims, t, x, y);
  return y;
}

LocalHamiltonian duplicated_term_fixture(const LocalTerm& term, int copies) {
  if (copies < 1) throw ValidationError("need at least one copy");
  LocalHamiltonian h;
  int max_site = 0;
  for (int q : term.support) max_site = std::max(max_site, q);
  const int dloc = int(std::llround(std::pow(double(term.matrix.rows()), 1.0 / term.support.size())));
  h.dims.assign(max_site + 1, dloc);
  for (int i = 0; i < copies; ++i) h.terms.push_back(term);
  return h;
}

LocalHamiltonian hypercube_clock_fixture(int cube_dim) {
  if (cube_dim < 1) throw ValidationError("hypercube dimension must be >= 1");
  LocalHamiltonian h;
  h.dims.assign(cube_dim + 1, 2);
  Matrix x(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  z << 1, 0, 0, -1;
  const Matrix term = 0.5 * (Matrix::Identity(4, 4) - kron2(x, z));
  for (int j = 0; j < cube_dim; ++j) h.terms.push_back(LocalTerm{{j, cube_dim}, term});
  return h;
}

CompiledHamiltonian input_bonus_fixture(const Circuit& circuit, const CompileOptions& options) {
  CompiledHamiltonian out = compile_feynman_kitaev(circuit, options);
  const int n = out.n, d = out.d;
  std::uint64_t dn = 1;
  for (int i = 0; i < n; ++i) dn *= std::uint64_t(d);
  Matrix psi0 = Matrix::Zero(dn, dn);
  psi0(0, 0) = 1;

  Matrix clock0;
  if (options.clock == ClockKind::Register) {
    clock0 = Matrix::Zero(out.T + 1, out.T + 1);
    clock0(0, 0) = 1;
  } else {
    clock0 = Matrix::Zero(2, 2);
    clock0(0, 0) = 1;
  }
  LocalTerm bonus;
  bonus.support = {0};
  const int comp_base = (options.clock == ClockKind::Register) ? 1 : out.T + 1;
  for (int i = 0; i < n; ++i) bonus.support.push_back(comp_base + i);
  bonus.matrix = -kron2(clock0, psi0);
  out.hamiltonian.terms.push_back(std::move(bonus));
  return out;
}

}  // namespace histspec
