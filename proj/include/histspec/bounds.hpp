#pragma once

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <string>

namespace histspec {

using BigFloat = boost::multiprecision::cpp_dec_float_50;
using BigInt = boost::multiprecision::cpp_int;

enum class DesignOrderVariant { S1Lemma8, SLemma9, SAppendix };

/// floor((r / (K n^2 log d))^{1/11}) with K = 11050 / 1400 / 1900 per variant.
/// A relative tolerance absorbs float rounding at exact integer powers.
long long design_order(double r, int n, int d, DesignOrderVariant variant);

/// 425 n ceil(log_d(4s))^2 d^2 s^5 s^{3.1/log d} (2 n s log d + log(1/eps)),
/// rounded up.
BigInt bhh_design_length(long long n, int d, long long s, double eps);

struct NetSizes {
  BigFloat hamiltonian_net;  // C(m,k) (3/eps)^{d^{2k}}
  BigFloat circuit_net;      // C(n,2)^r (6r/eps)^{r d^4}
  double hamiltonian_log10 = 0;
  double circuit_log10 = 0;
};
NetSizes net_sizes(long long m, int k, int d, double eps_net, int n, long long r_circ);

/// (1/delta^{2m}) (C (m/a)^m + 2 eps (alpha + |mu|)^{2m}).
BigFloat low_tail_bound(const BigFloat& C, const BigFloat& a, const BigFloat& alpha_poly,
                        const BigFloat& mu, const BigFloat& eps_design, long long m_half,
                        const BigFloat& delta);

struct BoundParams {
  int n = 4, d = 2, k = 1;
  long long m = 5, T = 100;
  double q_poly = 1.0;    // q(n)
  double q1_poly = 101;   // q_1(n)
  long long r = 10, r1 = 10;
  double delta = 0.25;
  double gamma = 1.0;
  double alpha_mass = 0.0;  // truncated mass
  double cross_sum = 0.0;   // sum over R_2 x (P \ R) of |alpha_p||alpha_p'|
  double C = 1.0;
  double lemma7_prefactor = 16.0;  // the statement's value; the proof chain carries 4
  DesignOrderVariant s_variant = DesignOrderVariant::SAppendix;
  std::optional<long long> s_override, s1_override;
};

struct LemmaFailureBounds {
  double lemma7_energy_rhs = 0;  // (2 gamma cross_sum + 2 gamma q1 (d^{-n/2}+delta)) / (1-alpha)
  double lemma9_energy_rhs = 0;  // (q1 + m) gamma delta
  BigFloat lemma7_probability;
  BigFloat lemma9_probability;
  double lemma7_log10 = 0;
  double lemma9_log10 = 0;
  long long s = 0, s1 = 0;
};

LemmaFailureBounds lemma_failure_bounds(const BoundParams& p);

std::string bigfloat_str(const BigFloat& v, int digits = 18);

}  // namespace histspec
