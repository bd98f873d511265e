#include "histspec/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "histspec/errors.hpp"
#include "histspec/rng.hpp"

namespace histspec {

namespace {

double gershgorin_lower(const SparseOperator& op) {
  double lower = 0.0;
  bool first = true;
  for (int row = 0; row < op.mat.outerSize(); ++row) {
    double diag = 0.0, off = 0.0;
    for (Eigen::SparseMatrix<Complex, Eigen::RowMajor>::InnerIterator it(op.mat, row); it; ++it) {
      if (it.col() == row)
        diag = it.value().real();
      else
        off += std::abs(it.value());
    }
    const double bound = diag - off;
    if (first || bound < lower) lower = bound;
    first = false;
  }
  return lower;
}

Vector random_vector(std::uint64_t dim, Rng& rng) {
  Vector v(Eigen::Index(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = Complex(rng.gaussian(), rng.gaussian());
  v.normalize();
  return v;
}

void project_out(Vector& w, const std::vector<Vector>& basis) {
  for (const Vector& b : basis) w -= b.dot(w) * b;
}

struct RitzPair {
  double value = 0.0;
  Vector vector;
  double residual = 0.0;
  bool converged = false;
};

// One restarted Lanczos solve for the lowest eigenpair of A restricted to the
// orthogonal complement of `deflated`. Full reorthogonalization against both
// the Krylov basis and the deflated set at every step.
RitzPair lanczos_lowest(const SparseOperator& op, const std::vector<Vector>& deflated,
                        const SpectralOptions& opts, Rng& rng, double shift) {
  const std::uint64_t dim = op.dim;
  const int max_block =
      int(std::min<std::uint64_t>(std::uint64_t(opts.block), dim - deflated.size()));
  if (max_block < 1)
    throw ValidationError("no directions left to search: deflated set spans the space");

  Vector start = random_vector(dim, rng);
  project_out(start, deflated);
  if (start.norm() < 1e-8) start = random_vector(dim, rng), project_out(start, deflated);
  start.normalize();

  RitzPair best;
  for (int restart = 0; restart < opts.max_restarts; ++restart) {
    std::vector<Vector> basis;
    basis.reserve(max_block);
    std::vector<double> alpha, beta;  // tridiagonal entries
    basis.push_back(start);
    bool breakdown = false;
    for (int j = 0; j < max_block; ++j) {
      Vector w = op.mat * basis[j];
      w -= shift * basis[j];
      alpha.push_back(basis[j].dot(w).real());
      w -= alpha[j] * basis[j];
      if (j > 0) w -= beta[j - 1] * basis[j - 1];
      project_out(w, deflated);
      project_out(w, basis);
      project_out(w, basis);  // second pass for orthogonality at 1e-14 level
      const double nb = w.norm();
      if (j + 1 >= max_block) break;
      if (nb < 1e-13) {
        breakdown = true;
        break;
      }
      beta.push_back(nb);
      basis.push_back(w / nb);
    }

    const int k = int(basis.size());
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(k, k);
    for (int j = 0; j < k; ++j) {
      tri(j, j) = alpha[j];
      if (j + 1 < k) tri(j, j + 1) = tri(j + 1, j) = beta[j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
    Vector ritz = Vector::Zero(Eigen::Index(dim));
    for (int j = 0; j < k; ++j) ritz += Complex(es.eigenvectors()(j, 0), 0) * basis[j];
    project_out(ritz, deflated);
    ritz.normalize();

    const double theta = (op.mat * ritz).dot(ritz).real();
    const double resid = (op.mat * ritz - theta * ritz).norm();
    if (!best.converged && (restart == 0 || resid < best.residual)) {
      best.value = theta;
      best.vector = ritz;
      best.residual = resid;
    }
    if (resid <= opts.tol) {
      best.value = theta;
      best.vector = ritz;
      best.residual = resid;
      best.converged = true;
      return best;
    }
    start = breakdown ? random_vector(dim, rng) : ritz;
    project_out(start, deflated);
    if (start.norm() < 1e-10) start = random_vector(dim, rng), project_out(start, deflated);
    start.normalize();
  }
  throw ConvergenceError("Lanczos failed to reach residual " + std::to_string(opts.tol) +
                             " after " + std::to_string(opts.max_restarts) +
                             " restarts (achieved " + std::to_string(best.residual) + ")",
                         best.residual);
}

std::vector<std::pair<double, double>> dense_spectrum(const SparseOperator& op,
                                                      Vector* ground_out) {
  Matrix dense = Matrix(op.mat);
  Eigen::SelfAdjointEigenSolver<Matrix> es(dense);
  if (es.info() != Eigen::Success)
    throw ConvergenceError("dense eigensolver failed", 1.0);
  std::vector<std::pair<double, double>> pairs;  // (eigenvalue, residual)
  pairs.reserve(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    double resid = 0.0;
    if (i < 8) {  // residuals only spot-checked on the low end of the spectrum
      const Vector v = es.eigenvectors().col(i);
      resid = (op.mat * v - es.eigenvalues()[i] * v).norm();
    }
    pairs.emplace_back(es.eigenvalues()[i], resid);
  }
  if (ground_out) *ground_out = es.eigenvectors().col(0);
  return pairs;
}

}  // namespace

SpectrumResult ground_and_gap(const SparseOperator& op, SolverMethod method,
                              const SpectralOptions& opts) {
  if (op.dim < 2) throw ValidationError("spectrum needs dimension >= 2");
  SpectrumResult out;
  out.method = method;

  if (method == SolverMethod::Dense) {
    if (op.dim > opts.dense_cap)
      throw ResourceError("dense method limited to dim <= " + std::to_string(opts.dense_cap));
    auto pairs = dense_spectrum(op, &out.ground_vector);
    out.e0 = pairs[0].first;
    out.gap = pairs[1].first - pairs[0].first;
    out.degenerate = out.gap <= opts.degeneracy_tol;
    out.ground_multiplicity = 0;
    for (auto& [v, r] : pairs) {
      out.eigenvalues.push_back(v);
      if (v <= out.e0 + opts.degeneracy_tol) ++out.ground_multiplicity;
    }
    out.level_gap = 0.0;
    out.level_gap_truncated = true;
    for (auto& [v, r] : pairs)
      if (v > out.e0 + opts.degeneracy_tol) {
        out.level_gap = v - out.e0;
        out.level_gap_truncated = false;
        break;
      }
    out.residuals = {pairs[0].second, pairs[1].second};
    return out;
  }

  if (op.dim > opts.krylov_cap)
    throw ResourceError("krylov method limited to dim <= " + std::to_string(opts.krylov_cap));
  Rng rng(opts.seed, 0x6b79726c);  // solver-private stream
  const double shift = gershgorin_lower(op);

  std::vector<Vector> deflated;
  RitzPair ground = lanczos_lowest(op, deflated, opts, rng, shift);
  out.e0 = ground.value;
  out.ground_vector = ground.vector;
  out.eigenvalues.push_back(ground.value);
  out.residuals.push_back(ground.residual);
  deflated.push_back(ground.vector);

  RitzPair second = lanczos_lowest(op, deflated, opts, rng, shift);
  out.gap = second.value - out.e0;
  out.eigenvalues.push_back(second.value);
  out.residuals.push_back(second.residual);
  deflated.push_back(second.vector);
  out.degenerate = out.gap <= opts.degeneracy_tol;
  out.ground_multiplicity = out.degenerate ? 2 : 1;

  if (!out.degenerate) {
    out.level_gap = out.gap;
  } else if (opts.want_level_gap) {
    out.level_gap_truncated = true;
    while (int(deflated.size()) < opts.level_deflate_cap &&
           deflated.size() + 1 < op.dim) {
      RitzPair next = lanczos_lowest(op, deflated, opts, rng, shift);
      out.eigenvalues.push_back(next.value);
      out.residuals.push_back(next.residual);
      deflated.push_back(next.vector);
      if (next.value > out.e0 + opts.degeneracy_tol) {
        out.level_gap = next.value - out.e0;
        out.level_gap_truncated = false;
        break;
      }
      ++out.ground_multiplicity;
    }
  }
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
  return out;
}

double energy(const Vector& v, const LocalHamiltonian& h) {
  if (std::abs(v.norm() - 1.0) > 1e-10)
    throw ValidationError("energy: state must be normalized to 1e-10");
  const Vector hv = apply_hamiltonian(h, v);
  const Complex e = v.dot(hv);
  if (std::abs(e.imag()) > 1e-10)
    throw ValidationError("energy: imaginary residue exceeds 1e-10");
  return e.real();
}

LowEnergyCount low_energy_dimension(const SparseOperator& op, double threshold,
                                    SolverMethod method, const SpectralOptions& opts) {
  LowEnergyCount out;
  if (method == SolverMethod::Dense) {
    if (op.dim > opts.dense_cap)
      throw ResourceError("dense method limited to dim <= " + std::to_string(opts.dense_cap));
    Matrix dense = Matrix(op.mat);
    Eigen::SelfAdjointEigenSolver<Matrix> es(dense, Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      if (es.eigenvalues()[i] <= threshold) ++out.count;
    return out;
  }

  Rng rng(opts.seed, 0x6c6f7765);
  const double shift = gershgorin_lower(op);
  std::vector<Vector> deflated;
  while (true) {
    if (int(deflated.size()) >= opts.level_deflate_cap || deflated.size() + 1 >= op.dim) {
      out.lower_bound_only = true;
      break;
    }
    RitzPair next = lanczos_lowest(op, deflated, opts, rng, shift);
    if (next.value > threshold) break;
    ++out.count;
    deflated.push_back(next.vector);
  }
  return out;
}

}  // namespace histspec
