#include "histspec/history.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>

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

double mass_of(const Vector& amps, const std::vector<char>& mask) {
  double m = 0;
  for (Eigen::Index p = 0; p < amps.size(); ++p)
    if (mask[p]) m += std::norm(amps[p]);
  return m;
}

HistoryState restrict_history(const HistoryState& hs, const std::vector<char>& keep,
                              double mass) {
  HistoryState out = hs;
  const double scale = 1.0 / std::sqrt(mass);
  for (Eigen::Index p = 0; p < out.amplitudes.size(); ++p)
    out.amplitudes[p] = keep[p] ? hs.amplitudes[p] * scale : Complex(0, 0);
  return out;
}

// log10 of the literal design-depth requirement 11050 n^2 log(d) max{(4 q d^4)^11, n^C}.
double literal_scale_log10(int n, int d, double q_poly, double C) {
  const double base = std::log10(11050.0) + 2 * std::log10(double(n)) +
                      std::log10(std::log(double(d)));
  const double a = 11.0 * std::log10(4.0 * q_poly * std::pow(double(d), 4));
  const double b = C * std::log10(double(n));
  return base + std::max(a, b);
}

}  // namespace

// --- TimePoset ---------------------------------------------------------------

TimePoset TimePoset::chain_poset(int T) {
  if (T < 0) throw ValidationError("chain poset needs T >= 0");
  TimePoset p;
  p.size = T + 1;
  for (int t = 0; t < T; ++t) p.relations.emplace_back(t, t + 1);
  p.chain.resize(T + 1);
  for (int t = 0; t <= T; ++t) p.chain[t] = t;
  p.finalize();
  return p;
}

void TimePoset::finalize() {
  if (size < 1) throw ValidationError("poset must be non-empty");
  leq_.assign(size, std::vector<bool>(size, false));
  for (int i = 0; i < size; ++i) leq_[i][i] = true;
  for (auto& [a, b] : relations) {
    if (a < 0 || a >= size || b < 0 || b >= size)
      throw ValidationError("poset relation references unknown element");
    leq_[a][b] = true;
  }
  // transitive closure
  for (int k = 0; k < size; ++k)
    for (int i = 0; i < size; ++i)
      if (leq_[i][k])
        for (int j = 0; j < size; ++j)
          if (leq_[k][j]) leq_[i][j] = true;
  for (int i = 0; i < size; ++i)
    for (int j = i + 1; j < size; ++j)
      if (leq_[i][j] && leq_[j][i])
        throw ValidationError("order is not antisymmetric: " + std::to_string(i) + " and " +
                              std::to_string(j));
  if (chain.empty()) throw ValidationError("poset needs a non-empty chain");
  std::set<int> seen;
  for (std::size_t t = 0; t < chain.size(); ++t) {
    const int c = chain[t];
    if (c < 0 || c >= size) throw ValidationError("chain references unknown element");
    if (!seen.insert(c).second) throw ValidationError("chain elements must be distinct");
    if (t > 0 && !leq_[chain[t - 1]][c])
      throw ValidationError("chain is not totally ordered under the relation");
  }
  t_of_.assign(size, std::nullopt);
  for (int p = 0; p < size; ++p)
    for (int t = int(chain.size()) - 1; t >= 0; --t)
      if (leq_[chain[t]][p]) {
        t_of_[p] = t;
        break;
      }
}

bool TimePoset::leq(int a, int b) const {
  if (leq_.empty()) throw ValidationError("poset not finalized");
  return leq_[a][b];
}

const std::optional<int>& TimePoset::t_of(int p) const {
  if (t_of_.empty()) throw ValidationError("poset not finalized");
  return t_of_[p];
}

// --- HistoryState ------------------------------------------------------------

void HistoryState::validate(double tol) const {
  if (!poset.finalized()) throw ValidationError("history state poset not finalized");
  const int q = poset.size;
  if (int(clock_labels.size()) != q || amplitudes.size() != q || int(comp_states.size()) != q)
    throw ValidationError("history state field lengths must match the poset size");
  std::set<std::string> labels(clock_labels.begin(), clock_labels.end());
  if (int(labels.size()) != q)
    throw ValidationError("clock labels must be pairwise distinct product states");
  if (std::abs(amplitudes.norm() - 1.0) > tol)
    throw ValidationError("amplitudes must be normalized");
  std::uint64_t dn = 1;
  for (int i = 0; i < n; ++i) dn *= std::uint64_t(d);
  for (int p = 0; p < q; ++p) {
    if (std::uint64_t(comp_states[p].size()) != dn)
      throw ValidationError("computational state dimension mismatch at label " +
                            std::to_string(p));
    if (std::abs(comp_states[p].norm() - 1.0) > tol)
      throw ValidationError("computational state not normalized at label " + std::to_string(p));
  }
}

Vector uniform_amplitudes(int count) {
  if (count < 1) throw ValidationError("need at least one amplitude");
  return Vector::Constant(count, Complex(1.0 / std::sqrt(double(count)), 0));
}

Vector geometric_amplitudes(int count, double rate) {
  if (count < 1) throw ValidationError("need at least one amplitude");
  Vector v(count);
  for (int t = 0; t < count; ++t) v[t] = Complex(std::exp(-rate * t), 0);
  v.normalize();
  return v;
}

Vector zero_window_amplitudes(int count, int lo, int hi) {
  if (lo > hi || lo < 0 || hi >= count)
    throw ValidationError("zero window out of range");
  Vector v = Vector::Zero(count);
  for (int t = 0; t < count; ++t)
    if (t < lo || t > hi) v[t] = Complex(1, 0);
  const double norm = v.norm();
  if (norm == 0) throw ValidationError("zero window covers every time");
  v /= norm;
  return v;
}

HistoryState standard_history_state(const Circuit& circuit, const Vector& amplitudes,
                                    const Vector& initial, const TimePoset& poset,
                                    const std::map<int, Matrix>& junk,
                                    const std::map<int, Vector>& explicit_states) {
  if (!poset.finalized()) throw ValidationError("poset must be finalized");
  if (poset.T() != circuit.T())
    throw ValidationError("poset chain length must be T+1 for the circuit");
  if (amplitudes.size() != poset.size)
    throw ValidationError("amplitude count must match the poset size");
  if (std::abs(amplitudes.norm() - 1.0) > 1e-10)
    throw ValidationError("amplitudes must be normalized");

  HistoryState hs;
  hs.n = circuit.reg.n;
  hs.d = circuit.reg.d;
  hs.poset = poset;
  hs.amplitudes = amplitudes;
  hs.comp_states.resize(poset.size);

  const std::vector<Vector> traj = evolve(circuit, initial);
  std::vector<char> is_chain(poset.size, 0);
  for (int t = 0; t <= poset.T(); ++t) {
    hs.comp_states[poset.chain[t]] = traj[t];
    is_chain[poset.chain[t]] = 1;
  }
  for (int p = 0; p < poset.size; ++p) {
    if (is_chain[p]) continue;
    if (auto it = explicit_states.find(p); it != explicit_states.end()) {
      hs.comp_states[p] = it->second;
      continue;
    }
    const auto& tp = poset.t_of(p);
    if (!tp)
      throw ValidationError("incomplete specification: label " + std::to_string(p) +
                            " has no chain time below it and no explicit state");
    if (auto it = junk.find(p); it != junk.end()) {
      hs.comp_states[p] = it->second * traj[*tp];
      hs.junk_unitaries[p] = it->second;
    } else {
      hs.comp_states[p] = traj[*tp];
    }
  }

  // Unary-style lexicographic label strings: distinct products by construction.
  hs.clock_labels.resize(poset.size);
  for (int p = 0; p < poset.size; ++p)
    hs.clock_labels[p] = std::string(p, '1') + std::string(poset.size - 1 - p, '0');
  hs.validate();
  return hs;
}

Complex history_overlap(const HistoryState& a, const HistoryState& b) {
  if (a.poset.size != b.poset.size || a.clock_labels != b.clock_labels)
    throw ValidationError("history overlap needs matching posets and clock labels");
  Complex acc(0, 0);
  for (int p = 0; p < a.poset.size; ++p) {
    if (a.amplitudes[p] == Complex(0, 0) || b.amplitudes[p] == Complex(0, 0)) continue;
    acc += std::conj(a.amplitudes[p]) * b.amplitudes[p] * a.comp_states[p].dot(b.comp_states[p]);
  }
  return acc;
}

Vector embed_history_state(const HistoryState& hs, const CompiledHamiltonian& ch) {
  if (hs.n != ch.n || hs.d != ch.d)
    throw ValidationError("history state register mismatch with compiled Hamiltonian");
  if (int(hs.poset.chain.size()) != hs.poset.size)
    throw ValidationError("embedding requires a chain-only poset");
  if (hs.poset.T() != ch.T) throw ValidationError("history state and Hamiltonian disagree on T");
  Vector out = Vector::Zero(Eigen::Index(ch.dim()));
  for (int t = 0; t <= ch.T; ++t) {
    const int p = hs.poset.chain[t];
    if (hs.amplitudes[p] == Complex(0, 0)) continue;
    const Vector& psi = hs.comp_states[p];
    for (Eigen::Index c = 0; c < psi.size(); ++c)
      if (psi[c] != Complex(0, 0))
        out[Eigen::Index(ch.basis_index(t, std::uint64_t(c)))] = hs.amplitudes[p] * psi[c];
  }
  return out;
}

// --- truncation and splitting -------------------------------------------------

TruncatedStates truncated_states(const Circuit& circuit, const HistoryState& hs, int r,
                                 const Vector& flipped_initial) {
  hs.validate();
  std::vector<char> in_r(hs.poset.size, 0);
  for (int p = 0; p < hs.poset.size; ++p) {
    const auto& tp = hs.poset.t_of(p);
    in_r[p] = (tp && *tp >= r + 1) ? 1 : 0;
  }
  const double kept = mass_of(hs.amplitudes, in_r);
  if (kept <= 0)
    throw ValidationError("degenerate truncation: no amplitude mass above time r");

  TruncatedStates out;
  out.truncated_mass = 1.0 - kept;
  out.psi_tilde = restrict_history(hs, in_r, kept);

  // phi: same gates, same junk unitaries, orthogonal initial state.
  HistoryState phi = standard_history_state(circuit, hs.amplitudes, flipped_initial, hs.poset,
                                            hs.junk_unitaries);
  phi.clock_labels = hs.clock_labels;
  out.phi_tilde = restrict_history(phi, in_r, kept);
  return out;
}

XiSplit xi_split(const HistoryState& hs, long long x0, long long r) {
  hs.validate();
  std::vector<char> in_b(hs.poset.size, 0);
  for (int p = 0; p < hs.poset.size; ++p) {
    const auto& tp = hs.poset.t_of(p);
    in_b[p] = (tp && *tp >= x0 * r) ? 1 : 0;
  }
  const double mass_b = mass_of(hs.amplitudes, in_b);
  const double lambda = 1.0 - mass_b;
  if (mass_b <= 0 || lambda <= 0)
    throw ValidationError("degenerate split: lambda is 0 or 1");

  XiSplit out;
  out.lambda = lambda;
  std::vector<char> not_b(hs.poset.size);
  for (int p = 0; p < hs.poset.size; ++p) not_b[p] = !in_b[p];
  out.xi0 = restrict_history(hs, not_b, lambda);
  out.xi1 = restrict_history(hs, in_b, mass_b);
  return out;
}

// --- amplitude checkers --------------------------------------------------------

Case1Report check_amplitudes_case1(const HistoryState& hs, const AmplitudeCheckParams& p) {
  hs.validate();
  const int T = hs.poset.T();
  if (p.r + p.r1 > T)
    throw ValidationError("case 1 requires T >= r + r1");

  double sum_r2_abs = 0, sum_out_abs = 0, tail = 0;
  for (int q = 0; q < hs.poset.size; ++q) {
    const auto& tp = hs.poset.t_of(q);
    const double a = std::abs(hs.amplitudes[q]);
    const bool in_r = tp && *tp >= p.r + 1;
    if (in_r) {
      tail += a * a;
      if (*tp <= p.r + p.r1) sum_r2_abs += a;
    } else {
      sum_out_abs += a;
    }
  }

  Case1Report rep;
  rep.numerator = sum_r2_abs * sum_out_abs;
  rep.denominator = tail;
  rep.tail_mass = tail;
  rep.ratio = (tail > 0) ? rep.numerator / tail
                         : std::numeric_limits<double>::infinity();
  rep.ratio_threshold = p.ratio_constant / double(p.n);
  rep.tail_threshold = std::pow(double(p.n), -(p.theta - 1.0));
  rep.ratio_ok = rep.ratio <= rep.ratio_threshold;
  rep.tail_ok = tail >= rep.tail_threshold;
  rep.pass = rep.ratio_ok && rep.tail_ok;

  rep.literal_scale_log10 = literal_scale_log10(p.n, p.d, p.q_poly, p.C);
  const double rlog = std::log10(double(std::min(p.r, p.r1)));
  rep.r_clears_literal = rlog >= rep.literal_scale_log10;
  const double scaled = p.scaled_constant.value_or(std::pow(10.0, rep.literal_scale_log10));
  rep.r_clears_scaled = double(p.r) >= scaled && double(p.r1) >= scaled;
  return rep;
}

Case2Report check_amplitudes_case2(const HistoryState& hs, const AmplitudeCheckParams& p) {
  hs.validate();
  const int T = hs.poset.T();
  if (p.r < 2) throw ValidationError("case 2 requires r >= 2");
  if (T < 2 * p.r) throw ValidationError("case 2 requires T >= 2r");

  Case2Report rep;
  rep.u = (long long)(std::floor(std::log(double(T) / 2.0) / std::log(double(p.r)))) - 1;
  const double log_r = std::log(double(p.r));
  rep.kappa = std::min(2.0 * double(rep.u) - 2.0,
                       (p.theta - 1.0) * std::log(double(p.n)) / log_r);
  rep.slice_threshold = std::pow(double(p.r), -double(rep.u));
  rep.mass_threshold = std::pow(double(p.r), -rep.kappa);

  // Admissible cuts: x0 > 1 with both A_{x0}, A_{x0+1} defined, range implied
  // by T >= 2 r^{u+1}.
  double max_x_f = 2.0 * std::pow(double(p.r), double(rep.u)) - 1.0;
  long long max_x = (max_x_f > 4e6) ? 4000000 : (long long)(max_x_f);
  rep.x_min = 2;
  rep.x_max = max_x;

  // Slice masses by scanning t_p once.
  auto slice_of = [&](int t) -> long long {
    if (t <= p.r - 1) return 1;
    return t / p.r + 1;  // (x-1) r <= t <= x r - 1  =>  x = floor(t/r) + 1
  };
  std::map<long long, double> slice_mass;  // A_x
  std::vector<double> mass_at_or_above(T + 2, 0.0);
  double no_t_mass = 0.0;
  for (int q = 0; q < hs.poset.size; ++q) {
    const auto& tp = hs.poset.t_of(q);
    const double m = std::norm(hs.amplitudes[q]);
    if (!tp) {
      no_t_mass += m;
      slice_mass[1] += m;
      continue;
    }
    slice_mass[slice_of(*tp)] += m;
    mass_at_or_above[*tp] += m;
  }
  for (int t = T; t >= 0; --t) mass_at_or_above[t] += mass_at_or_above[t + 1];

  std::vector<long long> cuts;
  if (p.x0) {
    if (*p.x0 >= rep.x_min && *p.x0 <= rep.x_max) cuts.push_back(*p.x0);
  } else {
    for (long long x = rep.x_min; x <= rep.x_max; ++x) cuts.push_back(x);
  }

  for (long long x0 : cuts) {
    Case2SliceInfo info;
    info.x0 = x0;
    const auto sm = [&](long long x) {
      auto it = slice_mass.find(x);
      return it == slice_mass.end() ? 0.0 : it->second;
    };
    info.slice_mass = sm(x0) + sm(x0 + 1);
    const long long cut_t = x0 * p.r;
    info.one_minus_lambda = (cut_t <= T) ? mass_at_or_above[cut_t] : 0.0;
    info.lambda = 1.0 - info.one_minus_lambda;
    info.ineq1 = info.slice_mass <= rep.slice_threshold;
    info.ineq2 = info.lambda >= rep.mass_threshold;
    info.ineq3 = info.one_minus_lambda >= rep.mass_threshold;
    rep.slices.push_back(info);
    if (info.ineq1 && info.ineq2 && info.ineq3 && !rep.x0_found) rep.x0_found = x0;
  }
  rep.pass = rep.x0_found.has_value();

  rep.literal_scale_log10 = literal_scale_log10(p.n, p.d, p.q_poly, p.C);
  const double rlog = std::log10(double(std::min(p.r, p.r1 > 0 ? p.r1 : p.r)));
  rep.r_clears_literal = rlog >= rep.literal_scale_log10;
  const double scaled = p.scaled_constant.value_or(std::pow(10.0, rep.literal_scale_log10));
  rep.r_clears_scaled = double(p.r) >= scaled;
  return rep;
}

// --- generalized history states -------------------------------------------------

int SiteSector::dim() const {
  int s = 0;
  for (int d : symbol_dims) s += d;
  return s;
}

int SiteSector::offset(int symbol) const {
  int off = 0;
  for (int x = 0; x < symbol; ++x) off += symbol_dims[x];
  return off;
}

std::vector<int> GeneralizedHistoryState::site_dims() const {
  std::vector<int> out;
  out.reserve(sites.size());
  for (const SiteSector& s : sites) out.push_back(s.dim());
  return out;
}

void GeneralizedHistoryState::validate() const {
  if (!poset.finalized()) throw ValidationError("poset not finalized");
  const int q = poset.size;
  const int N = num_sites();
  if (N < 1) throw ValidationError("need at least one site");
  for (const SiteSector& s : sites) {
    if (s.symbol_dims.empty()) throw ValidationError("site with empty alphabet");
    for (int sd : s.symbol_dims)
      if (sd < 1) throw ValidationError("symbol dimension must be >= 1");
  }
  if (int(assignments.size()) != q || amplitudes.size() != q || int(comp_states.size()) != q ||
      int(active_sites.size()) != q)
    throw ValidationError("generalized state field lengths must match the poset size");
  std::set<std::vector<int>> distinct;
  for (int p = 0; p < q; ++p) {
    const auto& x = assignments[p];
    if (int(x.size()) != N) throw ValidationError("assignment length mismatch");
    for (int i = 0; i < N; ++i)
      if (x[i] < 0 || x[i] >= int(sites[i].symbol_dims.size()))
        throw ValidationError("assignment symbol out of range");
    if (!distinct.insert(x).second)
      throw ValidationError("assignments x(p) must be pairwise distinct");
    const auto& act = active_sites[p];
    if (int(act.size()) != n) throw ValidationError("each label must have exactly n active sites");
    std::set<int> act_set(act.begin(), act.end());
    if (int(act_set.size()) != n) throw ValidationError("active sites must be distinct");
    for (int i = 0; i < N; ++i) {
      const int dim_here = sites[i].symbol_dims[x[i]];
      if (act_set.count(i)) {
        if (dim_here != d)
          throw ValidationError("active slot must have dimension d at site " + std::to_string(i));
      } else if (dim_here != 1) {
        throw ValidationError("structure error: symbol with dim > 1 outside the active set at site " +
                              std::to_string(i));
      }
    }
  }
  if (std::abs(amplitudes.norm() - 1.0) > 1e-10)
    throw ValidationError("amplitudes must be normalized");
  std::uint64_t dn = 1;
  for (int i = 0; i < n; ++i) dn *= std::uint64_t(d);
  for (int p = 0; p < q; ++p)
    if (std::uint64_t(comp_states[p].size()) != dn)
      throw ValidationError("computational state dimension mismatch");
}

Vector GeneralizedHistoryState::to_vector() const {
  validate();
  const std::vector<int> dims = site_dims();
  std::uint64_t dim = 1;
  for (int d0 : dims) dim *= std::uint64_t(d0);
  if (dim > kDefaultDimCap) throw ResourceError("generalized state dimension exceeds cap");
  std::vector<std::uint64_t> strides(dims.size());
  std::uint64_t acc = 1;
  for (int i = int(dims.size()) - 1; i >= 0; --i) {
    strides[i] = acc;
    acc *= std::uint64_t(dims[i]);
  }
  Vector out = Vector::Zero(Eigen::Index(dim));
  std::uint64_t dn = 1;
  for (int i = 0; i < n; ++i) dn *= std::uint64_t(d);
  for (int p = 0; p < poset.size; ++p) {
    if (amplitudes[p] == Complex(0, 0)) continue;
    std::uint64_t base = 0;
    for (int i = 0; i < num_sites(); ++i)
      base += std::uint64_t(sites[i].offset(assignments[p][i])) * strides[i];
    // scatter psi_p digits onto the active sites (ascending site order)
    for (std::uint64_t c = 0; c < dn; ++c) {
      if (comp_states[p][c] == Complex(0, 0)) continue;
      std::uint64_t idx = base;
      std::uint64_t rem = c;
      for (int j = n - 1; j >= 0; --j) {
        const std::uint64_t digit = rem % std::uint64_t(d);
        rem /= std::uint64_t(d);
        idx += digit * strides[active_sites[p][j]];
      }
      out[Eigen::Index(idx)] += amplitudes[p] * comp_states[p][c];
    }
  }
  return out;
}

// --- reduction --------------------------------------------------------------------

namespace {

// Drop tensor factors on which the matrix acts as the identity (or that are
// one-dimensional). dims/support are rewritten in place.
void shrink_trivial_factors(std::vector<int>& dims_loc, std::vector<int>& support, Matrix& m,
                            double tol = 1e-12) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t f = 0; f < dims_loc.size(); ++f) {
      const int df = dims_loc[f];
      std::uint64_t pre = 1, post = 1;
      for (std::size_t g = 0; g < f; ++g) pre *= std::uint64_t(dims_loc[g]);
      for (std::size_t g = f + 1; g < dims_loc.size(); ++g) post *= std::uint64_t(dims_loc[g]);
      if (df == 1) {
        dims_loc.erase(dims_loc.begin() + f);
        support.erase(support.begin() + f);
        changed = true;
        break;
      }
      if (dims_loc.size() == 1) continue;  // keep at least one factor
      // identity test: M[(p,a,q),(p',b,q')] == delta_ab * G[(p,q),(p',q')]
      bool identity = true;
      const std::uint64_t rest = pre * post;
      Matrix g = Matrix::Zero(rest, rest);
      auto full_idx = [&](std::uint64_t pr, int a, std::uint64_t po) {
        return Eigen::Index((pr * df + std::uint64_t(a)) * post + po);
      };
      for (std::uint64_t pr = 0; pr < pre && identity; ++pr)
        for (std::uint64_t po = 0; po < post && identity; ++po)
          for (std::uint64_t pr2 = 0; pr2 < pre && identity; ++pr2)
            for (std::uint64_t po2 = 0; po2 < post && identity; ++po2) {
              const Complex ref = m(full_idx(pr, 0, po), full_idx(pr2, 0, po2));
              g(Eigen::Index(pr * post + po), Eigen::Index(pr2 * post + po2)) = ref;
              for (int a = 0; a < df && identity; ++a)
                for (int b = 0; b < df && identity; ++b) {
                  const Complex v = m(full_idx(pr, a, po), full_idx(pr2, b, po2));
                  const Complex expect = (a == b) ? ref : Complex(0, 0);
                  if (std::abs(v - expect) > tol) identity = false;
                }
            }
      if (identity) {
        m = g;
        dims_loc.erase(dims_loc.begin() + f);
        support.erase(support.begin() + f);
        changed = true;
        break;
      }
    }
  }
}

}  // namespace

ReductionResult reduce_to_standard(const GeneralizedHistoryState& gen, const LocalHamiltonian& h) {
  gen.validate();
  h.validate();
  const int N = gen.num_sites();
  if (h.dims != gen.site_dims())
    throw ValidationError("Hamiltonian dims must match the generalized state's site spaces");

  // Referenced and active symbols per site.
  std::vector<std::vector<int>> kept(N);
  std::vector<std::set<int>> active(N);
  {
    std::vector<std::set<int>> ref(N);
    for (int p = 0; p < gen.poset.size; ++p) {
      for (int i = 0; i < N; ++i) ref[i].insert(gen.assignments[p][i]);
      for (int j = 0; j < gen.n; ++j)
        active[gen.active_sites[p][j]].insert(gen.assignments[p][gen.active_sites[p][j]]);
    }
    for (int i = 0; i < N; ++i) {
      kept[i].assign(ref[i].begin(), ref[i].end());
      for (int x : kept[i])
        if (!active[i].count(x) && gen.sites[i].symbol_dims[x] != 1)
          throw ValidationError(
              "structure error: symbol with dim > 1 outside the active symbol set at site " +
              std::to_string(i));
    }
  }

  ReductionResult out;
  out.kept_symbols = kept;

  // Output space: per site, a d-dimensional slot (factor 2i) and a label slot
  // of dimension |kept_i| (factor 2i+1).
  out.reduced.dims.resize(2 * N);
  for (int i = 0; i < N; ++i) {
    out.reduced.dims[2 * i] = gen.d;
    out.reduced.dims[2 * i + 1] = int(kept[i].size());
  }

  // Per-site embedding: input local index -> (comp digit, label digit) or none.
  struct SiteMap {
    std::vector<int> comp_digit, label_digit;  // indexed by input local index; -1 = dropped
  };
  std::vector<SiteMap> maps(N);
  for (int i = 0; i < N; ++i) {
    const SiteSector& s = gen.sites[i];
    maps[i].comp_digit.assign(s.dim(), -1);
    maps[i].label_digit.assign(s.dim(), -1);
    for (int l = 0; l < int(kept[i].size()); ++l) {
      const int x = kept[i][l];
      const int off = s.offset(x);
      for (int w = 0; w < s.symbol_dims[x]; ++w) {
        maps[i].comp_digit[off + w] = w;  // fiducial 0 when the symbol is one-dimensional
        maps[i].label_digit[off + w] = l;
      }
    }
  }

  out.k_input = 0;
  out.k_output = 0;
  for (const LocalTerm& term : h.terms) {
    out.k_input = std::max(out.k_input, int(term.support.size()));
    // local dims of the embedded term: (d, L_i) per input support site
    std::vector<int> dims_loc;
    std::vector<int> support_out;
    for (int i : term.support) {
      dims_loc.push_back(gen.d);
      support_out.push_back(2 * i);
      dims_loc.push_back(int(kept[i].size()));
      support_out.push_back(2 * i + 1);
    }
    std::uint64_t out_dim = 1;
    for (int d0 : dims_loc) out_dim *= std::uint64_t(d0);

    // Enumerate output local indices and map them back to input local indices.
    const int ns = int(term.support.size());
    std::vector<std::uint64_t> in_dims(ns);
    for (int j = 0; j < ns; ++j) in_dims[j] = std::uint64_t(gen.sites[term.support[j]].dim());
    auto map_back = [&](std::uint64_t oidx) -> long long {
      // output digits: per support site, (comp, label) with comp more significant
      long long in_idx = 0;
      std::uint64_t rem = oidx;
      std::vector<int> digits(2 * ns);
      for (int f = 2 * ns - 1; f >= 0; --f) {
        digits[f] = int(rem % std::uint64_t(dims_loc[f]));
        rem /= std::uint64_t(dims_loc[f]);
      }
      for (int j = 0; j < ns; ++j) {
        const int site = term.support[j];
        const int comp = digits[2 * j];
        const int label = digits[2 * j + 1];
        const int x = kept[site][label];
        const int sdim = gen.sites[site].symbol_dims[x];
        if (comp >= sdim) return -1;  // outside the embedded subspace
        const int local = gen.sites[site].offset(x) + comp;
        in_idx = in_idx * (long long)(in_dims[j]) + local;
      }
      return in_idx;
    };
    Matrix m = Matrix::Zero(out_dim, out_dim);
    std::vector<long long> back(out_dim);
    for (std::uint64_t a = 0; a < out_dim; ++a) back[a] = map_back(a);
    for (std::uint64_t a = 0; a < out_dim; ++a) {
      if (back[a] < 0) continue;
      for (std::uint64_t b = 0; b < out_dim; ++b) {
        if (back[b] < 0) continue;
        m(Eigen::Index(a), Eigen::Index(b)) = term.matrix(back[a], back[b]);
      }
    }
    shrink_trivial_factors(dims_loc, support_out, m);
    // keep support sorted (comp/label interleaving is already ascending)
    out.k_output = std::max(out.k_output, int(support_out.size()));
    out.reduced.terms.push_back(LocalTerm{support_out, m});
  }

  // Psi': clock labels from the assignments, orthogonal products by distinctness.
  out.history.n = gen.n;
  out.history.d = gen.d;
  out.history.poset = gen.poset;
  out.history.amplitudes = gen.amplitudes;
  out.history.comp_states = gen.comp_states;
  out.history.clock_labels.resize(gen.poset.size);
  for (int p = 0; p < gen.poset.size; ++p) {
    std::string label;
    for (int i = 0; i < N; ++i) {
      if (i) label += '.';
      label += std::to_string(gen.assignments[p][i]);
    }
    out.history.clock_labels[p] = label;
  }
  for (auto& [p, j] : gen.junk) out.history.junk_unitaries[p] = j.v;

  // Restriction map: indices of the kept-symbol subspace inside the input space.
  const std::vector<int> in_dims_all = gen.site_dims();
  std::uint64_t full = 1;
  for (int d0 : in_dims_all) full *= std::uint64_t(d0);
  for (std::uint64_t idx = 0; idx < full; ++idx) {
    std::uint64_t rem = idx;
    bool ok = true;
    for (int i = N - 1; i >= 0; --i) {
      const int local = int(rem % std::uint64_t(in_dims_all[i]));
      rem /= std::uint64_t(in_dims_all[i]);
      if (maps[i].label_digit[local] < 0) {
        ok = false;
        break;
      }
    }
    if (ok) out.subspace_indices.push_back(idx);
  }
  return out;
}

Matrix restrict_dense(const SparseOperator& op, const std::vector<std::uint64_t>& idx) {
  Matrix dense = Matrix(op.mat);
  Matrix out(idx.size(), idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = 0; b < idx.size(); ++b)
      out(a, b) = dense(Eigen::Index(idx[a]), Eigen::Index(idx[b]));
  return out;
}

Vector restrict_vector(const Vector& v, const std::vector<std::uint64_t>& idx) {
  Vector out(idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a) out[a] = v[Eigen::Index(idx[a])];
  return out;
}

// --- fixtures ------------------------------------------------------------------------

GeneralizedInstance kitaev_unary_instance(const Circuit& circuit) {
  circuit.validate();
  const int n = circuit.reg.n, d = circuit.reg.d, T = circuit.T();
  if (T < 1) throw ValidationError("unary instance needs T >= 1");

  GeneralizedInstance out;
  out.circuit = circuit;
  GeneralizedHistoryState& g = out.gen;
  g.n = n;
  g.d = d;
  for (int i = 0; i < n; ++i) g.sites.push_back(SiteSector{{d}});
  for (int j = 0; j < T; ++j) g.sites.push_back(SiteSector{{1, 1}});
  g.poset = TimePoset::chain_poset(T);
  g.amplitudes = uniform_amplitudes(T + 1);
  QuditRegister reg = circuit.reg;
  g.comp_states = evolve(circuit, basis_state(reg, 0));
  for (int t = 0; t <= T; ++t) {
    std::vector<int> x(n + T, 0);
    for (int j = 0; j < T; ++j) x[n + j] = (j < t) ? 1 : 0;
    g.assignments.push_back(x);
    std::vector<int> act(n);
    for (int i = 0; i < n; ++i) act[i] = i;
    g.active_sites.push_back(act);
  }
  g.validate();

  // Domain-wall Hamiltonian on exactly T clock qubits (sites n..n+T-1).
  LocalHamiltonian& H = out.hamiltonian;
  H.dims = g.site_dims();
  const int dsq = d * d;
  auto proj = [](int dim, int i) {
    Matrix p = Matrix::Zero(dim, dim);
    p(i, i) = 1;
    return p;
  };
  auto hopm = [](int dim, int to, int from) {
    Matrix h = Matrix::Zero(dim, dim);
    h(to, from) = 1;
    return h;
  };
  for (int t = 1; t <= T; ++t) {
    const Gate& gate = circuit.gates[t - 1];
    std::vector<int> cs;
    if (gate.site != 0) cs = {gate.site - 1, gate.site};
    std::vector<int> clock_sites;
    Matrix pa, pb, hop;
    if (T == 1) {
      clock_sites = {n};
      pa = proj(2, 0);
      pb = proj(2, 1);
      hop = hopm(2, 1, 0);
    } else if (t == 1) {
      clock_sites = {n, n + 1};
      pa = proj(4, 0);  // |00>
      pb = proj(4, 2);  // |10>
      hop = hopm(4, 2, 0);
    } else if (t == T) {
      clock_sites = {n + T - 2, n + T - 1};
      pa = proj(4, 2);  // |10>
      pb = proj(4, 3);  // |11>
      hop = hopm(4, 3, 2);
    } else {
      clock_sites = {n + t - 2, n + t - 1, n + t};
      pa = proj(8, 4);  // |100>
      pb = proj(8, 6);  // |110>
      hop = hopm(8, 6, 4);
    }
    LocalTerm term;
    term.support = cs;
    term.support.insert(term.support.end(), clock_sites.begin(), clock_sites.end());
    if (cs.empty()) {
      term.matrix = 0.5 * (pa + pb) - 0.5 * (hop + hop.adjoint());
    } else {
      // comp sites precede clock sites, so the gate factor is most significant
      const Matrix id_g = Matrix::Identity(dsq, dsq);
      term.matrix = 0.5 * kron2(id_g, pa + pb) -
                    0.5 * (kron2(gate.u, hop) + kron2(gate.u.adjoint(), hop.adjoint()));
    }
    H.terms.push_back(std::move(term));
  }
  for (int j = 0; j + 1 < T; ++j) {
    Matrix p01 = Matrix::Zero(4, 4);
    p01(1, 1) = 1;
    H.terms.push_back(LocalTerm{{n + j, n + j + 1}, p01});
  }
  Matrix not0 = Matrix::Identity(d, d);
  not0(0, 0) = 0;
  Matrix clock0 = proj(2, 0);
  for (int i = 0; i < n; ++i)
    H.terms.push_back(LocalTerm{{i, n}, kron2(not0, clock0)});
  return out;
}

GeneralizedInstance random_generalized_instance(Rng& rng) {
  const int n = 2, d = 2;
  const int T = 2 + int(rng.below(3));        // chain length T+1
  const int junk_count = int(rng.below(3));   // 0..2 hangers
  const int label_sites = 1 + int(rng.below(2));
  const int P = T + 1 + junk_count;

  GeneralizedInstance out;
  QuditRegister reg{n, d};
  Rng circuit_rng(rng.next_u64());
  out.circuit = sample_local_random_circuit(reg, T, circuit_rng);

  TimePoset poset;
  poset.size = P;
  poset.chain.resize(T + 1);
  for (int t = 0; t <= T; ++t) poset.chain[t] = t;
  for (int t = 0; t < T; ++t) poset.relations.emplace_back(t, t + 1);
  std::vector<int> junk_anchor(junk_count);
  for (int j = 0; j < junk_count; ++j) {
    junk_anchor[j] = int(rng.below(std::uint64_t(T + 1)));
    poset.relations.emplace_back(junk_anchor[j], T + 1 + j);
  }
  poset.finalize();

  GeneralizedHistoryState& g = out.gen;
  g.n = n;
  g.d = d;
  g.poset = poset;
  for (int i = 0; i < n; ++i) g.sites.push_back(SiteSector{{d}});
  // Label sites jointly encode the poset element; an occasional extra symbol
  // is never referenced and must be dropped by the reduction.
  std::vector<int> widths;
  if (label_sites == 1) {
    widths = {P + int(rng.below(2))};
  } else {
    const int w = int(std::ceil(std::sqrt(double(P))));
    widths = {w + int(rng.below(2)), w};
  }
  for (int w : widths) g.sites.push_back(SiteSector{std::vector<int>(std::size_t(w), 1)});

  auto label_digits = [&](int p) {
    std::vector<int> digits(widths.size());
    int rem = p;
    for (int j = int(widths.size()) - 1; j >= 0; --j) {
      digits[j] = rem % widths[j];
      rem /= widths[j];
    }
    return digits;
  };

  g.amplitudes = uniform_amplitudes(P);
  const std::vector<Vector> traj = evolve(out.circuit, basis_state(reg, 0));
  g.comp_states.resize(P);
  g.assignments.resize(P);
  g.active_sites.assign(P, {0, 1});
  for (int p = 0; p < P; ++p) {
    std::vector<int> x(n, 0);
    const std::vector<int> digits = label_digits(p);
    x.insert(x.end(), digits.begin(), digits.end());
    g.assignments[p] = x;
  }
  for (int t = 0; t <= T; ++t) g.comp_states[t] = traj[t];
  for (int j = 0; j < junk_count; ++j) {
    const int p = T + 1 + j;
    GeneralizedHistoryState::Junk jk;
    if (rng.below(2) == 0) {
      Rng vr(rng.next_u64());
      jk.v = haar_unitary(int(reg.dim()), vr);
      jk.flavor = GeneralizedHistoryState::JunkFlavor::CircuitIndependent;
    } else {
      Rng vr(rng.next_u64());
      Circuit vc = sample_local_random_circuit(reg, 1, vr);
      Vector e0 = basis_state(reg, 0);
      // build the dense unitary of the 1-gate circuit
      Matrix u = Matrix::Identity(4, 4);
      for (int col = 0; col < 4; ++col) {
        Vector v = Vector::Zero(4);
        v[col] = 1;
        apply_gate(reg, vc.gates[0], v);
        u.col(col) = v;
      }
      jk.v = u;
      jk.flavor = GeneralizedHistoryState::JunkFlavor::SmallCircuit;
      jk.circuit_size = 1;
    }
    g.comp_states[p] = jk.v * traj[junk_anchor[j]];
    g.junk[p] = std::move(jk);
  }
  g.validate();

  // Frustration-free propagation over the Hasse edges plus input pinning.
  LocalHamiltonian& H = out.hamiltonian;
  H.dims = g.site_dims();
  const int NL = int(widths.size());
  std::uint64_t label_dim = 1;
  for (int w : widths) label_dim *= std::uint64_t(w);
  auto label_index = [&](int p) {
    const std::vector<int> digits = label_digits(p);
    std::uint64_t idx = 0;
    for (int j = 0; j < NL; ++j) idx = idx * std::uint64_t(widths[j]) + std::uint64_t(digits[j]);
    return idx;
  };
  std::vector<int> label_support(NL);
  for (int j = 0; j < NL; ++j) label_support[j] = n + j;

  auto edge_term = [&](int a, int b, const Matrix& w, const std::vector<int>& comp_supp) {
    // comp sites precede label sites in the sorted support
    Matrix pa = Matrix::Zero(label_dim, label_dim), pb = Matrix::Zero(label_dim, label_dim);
    Matrix hop = Matrix::Zero(label_dim, label_dim);
    pa(label_index(a), label_index(a)) = 1;
    pb(label_index(b), label_index(b)) = 1;
    hop(label_index(b), label_index(a)) = 1;
    LocalTerm term;
    term.support = comp_supp;
    term.support.insert(term.support.end(), label_support.begin(), label_support.end());
    const Eigen::Index wd = w.rows();
    term.matrix = 0.5 * kron2(Matrix::Identity(wd, wd), pa + pb) -
                  0.5 * (kron2(w, hop) + kron2(w.adjoint(), hop.adjoint()));
    return term;
  };

  for (int t = 1; t <= T; ++t)
    H.terms.push_back(edge_term(t - 1, t, out.circuit.gates[t - 1].u,
                                {out.circuit.gates[t - 1].site - 1, out.circuit.gates[t - 1].site}));
  for (int j = 0; j < junk_count; ++j)
    H.terms.push_back(edge_term(junk_anchor[j], T + 1 + j, g.junk.at(T + 1 + j).v, {0, 1}));

  Matrix label0 = Matrix::Zero(label_dim, label_dim);
  label0(label_index(0), label_index(0)) = 1;
  Matrix not0 = Matrix::Identity(d, d);
  not0(0, 0) = 0;
  for (int i = 0; i < n; ++i) {
    LocalTerm pin;
    pin.support = {i};
    pin.support.insert(pin.support.end(), label_support.begin(), label_support.end());
    pin.matrix = kron2(not0, label0);
    H.terms.push_back(std::move(pin));
  }
  return out;
}

GeneralizedHistoryState agik_location_shape(int T) {
  if (T < 1) throw ValidationError("location shape needs T >= 1");
  GeneralizedHistoryState g;
  g.n = 1;
  g.d = 2;
  const int N = T + 2;
  // alphabet of 8 symbols: four one-dimensional markers, four qubit-carrying
  for (int i = 0; i < N; ++i) g.sites.push_back(SiteSector{{1, 1, 1, 1, 2, 2, 2, 2}});
  g.poset = TimePoset::chain_poset(T);
  g.amplitudes = uniform_amplitudes(T + 1);
  for (int t = 0; t <= T; ++t) {
    std::vector<int> x(N, 0);
    for (int i = 0; i < N; ++i) {
      if (i == t)
        x[i] = 4;  // the active location carries the qubit
      else
        x[i] = (i < t) ? 1 : 0;
    }
    g.assignments.push_back(x);
    g.active_sites.push_back({t});
    Vector psi = Vector::Zero(2);
    psi[0] = 1;
    g.comp_states.push_back(psi);
  }
  g.validate();
  return g;
}

GeneralizedHistoryState spacetime_shape(int n, int T) {
  if (n < 1 || T < 1) throw ValidationError("spacetime shape needs n, T >= 1");
  GeneralizedHistoryState g;
  g.n = n;
  g.d = 2;
  for (int i = 0; i < n; ++i) {
    g.sites.push_back(SiteSector{{2}});                                // qubit slot
    g.sites.push_back(SiteSector{std::vector<int>(std::size_t(T + 1), 1)});  // its clock
  }
  // valid time configurations: max spread 1 across the per-qubit clocks
  std::vector<std::vector<int>> configs;
  std::vector<int> cur(n, 0);
  std::function<void(int)> rec = [&](int i) {
    if (i == n) {
      int lo = cur[0], hi = cur[0];
      for (int v : cur) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (hi - lo <= 1) configs.push_back(cur);
      return;
    }
    for (int t = 0; t <= T; ++t) {
      cur[i] = t;
      rec(i + 1);
    }
  };
  rec(0);

  TimePoset poset;
  poset.size = int(configs.size());
  for (int a = 0; a < poset.size; ++a)
    for (int b = 0; b < poset.size; ++b) {
      if (a == b) continue;
      bool le = true;
      for (int i = 0; i < n; ++i)
        if (configs[a][i] > configs[b][i]) le = false;
      if (le) poset.relations.emplace_back(a, b);
    }
  poset.chain.resize(T + 1);
  for (int t = 0; t <= T; ++t) {
    for (int a = 0; a < poset.size; ++a) {
      bool diag = true;
      for (int i = 0; i < n; ++i)
        if (configs[a][i] != t) diag = false;
      if (diag) poset.chain[t] = a;
    }
  }
  poset.finalize();
  g.poset = poset;

  g.amplitudes = uniform_amplitudes(poset.size);
  for (int a = 0; a < poset.size; ++a) {
    std::vector<int> x(2 * n, 0);
    for (int i = 0; i < n; ++i) {
      x[2 * i] = 0;  // qubit slot symbol
      x[2 * i + 1] = configs[a][i];
    }
    g.assignments.push_back(x);
    std::vector<int> act(n);
    for (int i = 0; i < n; ++i) act[i] = 2 * i;
    g.active_sites.push_back(act);
    Vector psi = Vector::Zero(Eigen::Index(1) << n);
    psi[0] = 1;
    g.comp_states.push_back(psi);
    bool on_chain = true;
    for (int i = 1; i < n; ++i)
      if (configs[a][i] != configs[a][0]) on_chain = false;
    if (!on_chain) {
      // off-diagonal configurations carry trivial junk (an empty circuit)
      GeneralizedHistoryState::Junk jk;
      jk.v = Matrix::Identity(Eigen::Index(1) << n, Eigen::Index(1) << n);
      jk.flavor = GeneralizedHistoryState::JunkFlavor::SmallCircuit;
      jk.circuit_size = 0;
      g.junk[a] = std::move(jk);
    }
  }
  g.validate();
  return g;
}

}  // namespace histspec
