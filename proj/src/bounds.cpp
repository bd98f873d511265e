#include "histspec/bounds.hpp"

#include <cmath>
#include <sstream>

#include "histspec/errors.hpp"

namespace histspec {

namespace {

double variant_constant(DesignOrderVariant v) {
  switch (v) {
    case DesignOrderVariant::S1Lemma8:
      return 11050.0;
    case DesignOrderVariant::SLemma9:
      return 1400.0;
    case DesignOrderVariant::SAppendix:
      return 1900.0;
  }
  return 1900.0;
}

BigFloat binomial_big(long long n, long long k) {
  if (k < 0 || k > n) return BigFloat(0);
  BigFloat acc(1);
  for (long long j = 1; j <= k; ++j) {
    acc *= BigFloat(n - k + j);
    acc /= BigFloat(j);
  }
  return acc;
}

BigFloat pow_big(const BigFloat& base, const BigFloat& expo) {
  using boost::multiprecision::log;
  using boost::multiprecision::exp;
  if (expo == 0) return BigFloat(1);
  if (base == 0) return BigFloat(0);
  return exp(expo * log(base));
}

double log10_big(const BigFloat& v) {
  using boost::multiprecision::log10;
  if (v <= 0) return -std::numeric_limits<double>::infinity();
  return double(log10(v));
}

}  // namespace

long long design_order(double r, int n, int d, DesignOrderVariant variant) {
  if (r <= 0 || n < 1 || d < 2)
    throw ValidationError("design_order needs positive r, n >= 1, d >= 2");
  const double K = variant_constant(variant);
  const double x = r / (K * double(n) * double(n) * std::log(double(d)));
  if (x < 1.0) return 0;
  long long s = (long long)(std::floor(std::pow(x, 1.0 / 11.0)));
  // tolerance floor: absorb rounding at exact 11th powers
  const double tol = 1.0 + 1e-9;
  while (std::pow(double(s + 1), 11.0) <= x * tol) ++s;
  while (s > 0 && std::pow(double(s), 11.0) > x * tol) --s;
  return s;
}

BigInt bhh_design_length(long long n, int d, long long s, double eps) {
  if (n < 1 || d < 2 || s < 1) throw ValidationError("bhh_design_length needs n, s >= 1, d >= 2");
  if (eps <= 0 || eps >= 1) throw ValidationError("bhh_design_length needs eps in (0,1)");
  using boost::multiprecision::log;
  using boost::multiprecision::ceil;
  const BigFloat logd = log(BigFloat(d));
  const BigFloat log4s = log(BigFloat(4) * BigFloat(s)) / logd;
  // ceil(log_d(4s)) with the same tolerance-floor policy as design_order
  long long cl = (long long)(double(ceil(log4s - BigFloat(1e-30))));
  while (BigFloat(cl) < log4s - BigFloat(1e-30)) ++cl;
  const BigFloat s_pow = pow_big(BigFloat(s), BigFloat(3.1) / logd);
  const BigFloat bracket =
      BigFloat(2) * n * s * logd + log(BigFloat(1) / BigFloat(eps));
  const BigFloat value = BigFloat(425) * n * BigFloat(cl) * BigFloat(cl) * d * d *
                         pow_big(BigFloat(s), BigFloat(5)) * s_pow * bracket;
  const BigFloat cv = ceil(value);
  BigInt out = cv.convert_to<BigInt>();
  while (out.convert_to<BigFloat>() < value) ++out;
  return out;
}

NetSizes net_sizes(long long m, int k, int d, double eps_net, int n, long long r_circ) {
  if (eps_net <= 0) throw ValidationError("net_sizes needs eps > 0");
  NetSizes out;
  const BigFloat d2k = pow_big(BigFloat(d), BigFloat(2 * k));
  out.hamiltonian_net = binomial_big(m, k) * pow_big(BigFloat(3) / BigFloat(eps_net), d2k);
  const BigFloat d4 = pow_big(BigFloat(d), BigFloat(4));
  out.circuit_net = pow_big(binomial_big(n, 2), BigFloat(r_circ)) *
                    pow_big(BigFloat(6) * r_circ / BigFloat(eps_net), BigFloat(r_circ) * d4);
  out.hamiltonian_log10 = log10_big(out.hamiltonian_net);
  out.circuit_log10 = log10_big(out.circuit_net);
  return out;
}

BigFloat low_tail_bound(const BigFloat& C, const BigFloat& a, const BigFloat& alpha_poly,
                        const BigFloat& mu, const BigFloat& eps_design, long long m_half,
                        const BigFloat& delta) {
  using boost::multiprecision::abs;
  if (a <= 0) throw ValidationError("low_tail_bound needs a > 0");
  if (m_half < 1) throw ValidationError("low_tail_bound needs m >= 1");
  if (delta <= 0) throw ValidationError("low_tail_bound needs delta > 0");
  const BigFloat m(m_half);
  const BigFloat first = C * pow_big(m / a, m);
  const BigFloat second = BigFloat(2) * eps_design * pow_big(alpha_poly + abs(mu), 2 * m);
  return (first + second) / pow_big(delta, 2 * m);
}

LemmaFailureBounds lemma_failure_bounds(const BoundParams& p) {
  if (p.delta <= 0) throw ValidationError("lemma_failure_bounds needs delta > 0");
  if (p.alpha_mass < 0 || p.alpha_mass >= 1)
    throw ValidationError("lemma_failure_bounds needs alpha in [0,1)");
  LemmaFailureBounds out;
  out.s1 = p.s1_override.value_or(
      design_order(double(p.r1), p.n, p.d, DesignOrderVariant::S1Lemma8));
  out.s = p.s_override.value_or(design_order(double(p.r), p.n, p.d, p.s_variant));

  const double dn_half = std::pow(double(p.d), -double(p.n) / 2.0);
  out.lemma7_energy_rhs =
      (2.0 * p.gamma * p.cross_sum + 2.0 * p.gamma * p.q1_poly * (dn_half + p.delta)) /
      (1.0 - p.alpha_mass);
  out.lemma9_energy_rhs = (p.q1_poly + double(p.m)) * p.gamma * p.delta;

  // shared combinatorial factor: C(n,2)^{2q} (48q/delta)^{2 q d^4} C(m,k) (12/delta)^{d^{2k}}
  const BigFloat delta(p.delta);
  const BigFloat d4 = pow_big(BigFloat(p.d), BigFloat(4));
  const BigFloat d2k = pow_big(BigFloat(p.d), BigFloat(2 * p.k));
  const BigFloat dn = pow_big(BigFloat(p.d), BigFloat(p.n));
  const BigFloat shared =
      pow_big(binomial_big(p.n, 2), BigFloat(2.0 * p.q_poly)) *
      pow_big(BigFloat(48) * p.q_poly / delta, BigFloat(2.0 * p.q_poly) * d4) *
      binomial_big(p.m, p.k) * pow_big(BigFloat(12) / delta, d2k);

  const BigFloat q1(p.q1_poly);
  out.lemma7_probability =
      BigFloat(p.lemma7_prefactor) * q1 * q1 * shared *
      pow_big(BigFloat(96) * out.s1 / (dn * delta * delta), BigFloat(out.s1) / 2);
  out.lemma9_probability =
      BigFloat(8) * (BigFloat(1) + BigFloat(p.m)) * q1 * q1 * shared *
      pow_big(BigFloat(6144) * out.s / (dn * delta * delta), BigFloat(out.s) / 2);
  out.lemma7_log10 = log10_big(out.lemma7_probability);
  out.lemma9_log10 = log10_big(out.lemma9_probability);
  return out;
}

std::string bigfloat_str(const BigFloat& v, int digits) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

}  // namespace histspec
