#include "histspec/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>

#include "histspec/errors.hpp"

namespace histspec {

namespace {

std::vector<std::vector<int>> k_subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(k);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == k) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < n; ++i) {
      cur[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  return out;
}

// M_A = Tr_{A^c} |phi><psi| for the window A (ascending site list, 0-based).
Matrix windowed_cross(const Vector& psi, const Vector& phi, int n, int d,
                      const std::vector<int>& window) {
  std::uint64_t block = 1;
  for (std::size_t j = 0; j < window.size(); ++j) block *= std::uint64_t(d);
  std::vector<std::uint64_t> strides(n);
  std::uint64_t acc = 1;
  for (int i = n - 1; i >= 0; --i) {
    strides[i] = acc;
    acc *= std::uint64_t(d);
  }
  Matrix m = Matrix::Zero(block, block);
  const std::uint64_t dim = acc;
  // offsets of the window sub-index inside the full index
  std::vector<std::uint64_t> in_window_stride(window.size());
  {
    std::uint64_t s = 1;
    for (int j = int(window.size()) - 1; j >= 0; --j) {
      in_window_stride[j] = s;
      s *= std::uint64_t(d);
    }
  }
  std::vector<std::uint64_t> offs(block, 0);
  for (std::uint64_t a = 0; a < block; ++a) {
    std::uint64_t off = 0;
    for (std::size_t j = 0; j < window.size(); ++j) {
      const std::uint64_t digit = (a / in_window_stride[j]) % std::uint64_t(d);
      off += digit * strides[window[j]];
    }
    offs[a] = off;
  }
  std::uint64_t complement = dim / block;
  std::vector<int> comp_sites;
  for (int i = 0; i < n; ++i)
    if (std::find(window.begin(), window.end(), i) == window.end()) comp_sites.push_back(i);
  std::vector<int> digit(comp_sites.size(), 0);
  std::uint64_t base = 0;
  for (std::uint64_t c = 0; c < complement; ++c) {
    for (std::uint64_t x = 0; x < block; ++x)
      for (std::uint64_t y = 0; y < block; ++y)
        m(Eigen::Index(x), Eigen::Index(y)) +=
            phi[Eigen::Index(base + offs[x])] * std::conj(psi[Eigen::Index(base + offs[y])]);
    for (int j = int(comp_sites.size()) - 1; j >= 0; --j) {
      const int q = comp_sites[j];
      base += strides[q];
      if (++digit[j] < d) break;
      base -= strides[q] * std::uint64_t(d);
      digit[j] = 0;
    }
  }
  return m;
}

double trace_norm_hermitian(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  double s = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    s += std::abs(es.eigenvalues()[i]);
  return s;
}

double theta_grid_max(const Matrix& m, int grid, double* envelope_out) {
  const Matrix h1 = 0.5 * (m + m.adjoint());
  const Matrix h2 = (m - m.adjoint()) / Complex(0, 2);
  double best = 0.0;
  for (int j = 0; j < grid; ++j) {
    const double theta = M_PI * double(j) / double(grid);
    best = std::max(best,
                    trace_norm_hermitian(std::cos(theta) * h1 + std::sin(theta) * h2));
  }
  if (envelope_out) {
    const double a = trace_norm_hermitian(h1), b = trace_norm_hermitian(h2);
    *envelope_out = std::sqrt(a * a + b * b);
  }
  return best;
}

}  // namespace

CrossOverlapResult local_cross_overlap_max(const Vector& psi, const Vector& phi, int n, int d,
                                           int k, int theta_grid) {
  if (k < 1 || k > n) throw ValidationError("cross overlap needs 1 <= k <= n");
  if (theta_grid < 4) throw ValidationError("theta grid must have at least 4 angles");
  std::uint64_t dim = 1;
  for (int i = 0; i < n; ++i) dim *= std::uint64_t(d);
  if (std::uint64_t(psi.size()) != dim || std::uint64_t(phi.size()) != dim)
    throw ValidationError("state dimension mismatch");
  if (std::abs(psi.norm() - 1.0) > 1e-10 || std::abs(phi.norm() - 1.0) > 1e-10)
    throw ValidationError("states must be normalized");

  CrossOverlapResult out;
  out.grid = theta_grid;
  out.subsets = k_subsets(n, k);
  for (const auto& window : out.subsets) {
    const Matrix m = windowed_cross(psi, phi, n, d, window);
    double env = 0;
    const double v = theta_grid_max(m, theta_grid, &env);
    out.per_subset.push_back(v);
    out.envelope.push_back(env);
    out.value = std::max(out.value, v);
  }
  return out;
}

std::vector<FhProfilePoint> fh_decay_profile(const Circuit& circuit, int k,
                                             const std::vector<int>& checkpoints) {
  circuit.validate();
  const int n = circuit.reg.n, d = circuit.reg.d;
  if (k < 1 || k > n) throw ValidationError("profile needs 1 <= k <= n");
  for (int c : checkpoints)
    if (c < 0 || c > circuit.T())
      throw ValidationError("checkpoint beyond circuit depth");

  const std::vector<Vector> psi = evolve(circuit, basis_state(circuit.reg, 0));
  const std::vector<Vector> phi = evolve(circuit, basis_state(circuit.reg, 1));
  const auto windows = k_subsets(n, k);

  std::vector<FhProfilePoint> out;
  for (int c : checkpoints) {
    double best = 0.0;
    for (const auto& window : windows) {
      const Matrix mp = windowed_cross(psi[c], psi[c], n, d, window);
      const Matrix mf = windowed_cross(phi[c], phi[c], n, d, window);
      const double dist = 0.5 * trace_norm_hermitian(mp - mf);
      best = std::max(best, dist * dist);
    }
    out.push_back(FhProfilePoint{c, best});
  }
  return out;
}

Matrix circuit_unitary(const Circuit& circuit) {
  const std::uint64_t dim = circuit.reg.dim();
  Matrix u = Matrix::Identity(Eigen::Index(dim), Eigen::Index(dim));
  for (const Gate& g : circuit.gates) {
    for (Eigen::Index col = 0; col < u.cols(); ++col) {
      Vector v = u.col(col);
      apply_gate(circuit.reg, g, v);
      u.col(col) = v;
    }
  }
  return u;
}

FramePotentialResult frame_potential(const DesignEnsembleSpec& spec, int s) {
  if (s < 1 || s > 3) throw ValidationError("frame potential supports s in {1,2,3}");
  if (spec.samples < 2) throw ValidationError("frame potential needs at least 2 samples");
  const QuditRegister reg{spec.n, spec.d};
  const std::uint64_t dim = reg.dim();

  auto draw = [&](std::uint64_t subseed) -> Matrix {
    Rng rng(subseed);
    if (spec.kind == DesignEnsembleSpec::Kind::Haar) return haar_unitary(int(dim), rng);
    const Circuit c = sample_local_random_circuit(reg, spec.depth, rng);
    return circuit_unitary(c);
  };

  double sum = 0, sumsq = 0;
  for (int i = 0; i < spec.samples; ++i) {
    const Matrix u = draw(Rng::derive(spec.seed, {std::uint64_t(i), 0}));
    const Matrix v = draw(Rng::derive(spec.seed, {std::uint64_t(i), 1}));
    const Complex tr = (u.adjoint() * v).trace();
    const double x = std::pow(std::norm(tr), double(s));
    sum += x;
    sumsq += x * x;
  }
  FramePotentialResult out;
  out.s = s;
  out.samples = spec.samples;
  out.estimate = sum / spec.samples;
  const double var = std::max(0.0, sumsq / spec.samples - out.estimate * out.estimate);
  out.stderr_ = std::sqrt(var / spec.samples);
  double fact = 1;
  for (int j = 2; j <= s; ++j) fact *= j;
  out.haar_reference = fact;
  return out;
}

}  // namespace histspec
