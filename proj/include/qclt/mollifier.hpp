#pragma once

// The prime sums P, P0, P1, P2, the mollifier polynomials M, M1, M2, the
// truncated exponentials script-M1, script-M2, and coefficient-level
// convolution machinery.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "qclt/arith.hpp"
#include "qclt/characters.hpp"
#include "qclt/coeff_series.hpp"
#include "qclt/lfunc.hpp"
#include "qclt/summation.hpp"

namespace qclt {

/// Parameter tuple of the argument, with desk-scale defaults.
///
/// Defaults for modulus q (iterated logs of q; "floored" means max(1, .)):
///   W = max(3, (logloglog q)^4), sigma0 = 1/2 + W / log q,
///   Y = max(2, floor(q^{1/(loglog q)^2})), X = max(Y, floor(q^{(logloglog q)^2})),
///   K1 = truncK1 = ceil(100 * floored loglog q),
///   K2 = truncK2 = ceil(100 * floored logloglog q),
///   supportCap = min(q, 10^6).
/// Functions taking DeskParams do not validate, so a cutoff below 2 simply
/// gives an empty prime range.
struct DeskParams {
  std::uint64_t q = 3;
  double t = 0.0;
  double W = 3.0;
  std::uint64_t X = 2;
  std::uint64_t Y = 2;
  double sigma0 = 0.5;
  std::uint64_t K1 = 100;
  std::uint64_t K2 = 100;
  std::uint64_t truncK1 = 100;
  std::uint64_t truncK2 = 100;
  std::uint64_t supportCap = 1;

  static double loglog(double q) { return q > std::numbers::e ? std::log(std::log(q)) : 0.0; }
  static double logloglog(double q) {
    const double l2 = loglog(q);
    return l2 > 1.0 ? std::log(l2) : 0.0;
  }

  static DeskParams defaults(std::uint64_t q, double t = 0.0) {
    if (q < 3) throw std::invalid_argument("DeskParams: modulus must be >= 3");
    const double qd = static_cast<double>(q);
    const double l2 = loglog(qd);
    const double l3 = logloglog(qd);
    DeskParams p;
    p.q = q;
    p.t = t;
    p.set_W(std::max(3.0, std::pow(l3, 4)));
    p.Y = l2 > 0.0 ? std::max<std::uint64_t>(2, static_cast<std::uint64_t>(std::pow(qd, 1.0 / (l2 * l2)))) : 2;
    p.X = std::max<std::uint64_t>(p.Y, static_cast<std::uint64_t>(std::pow(qd, l3 * l3)));
    p.K1 = static_cast<std::uint64_t>(std::ceil(100.0 * std::max(1.0, l2)));
    p.K2 = static_cast<std::uint64_t>(std::ceil(100.0 * std::max(1.0, l3)));
    p.truncK1 = p.K1;
    p.truncK2 = p.K2;
    p.supportCap = std::min<std::uint64_t>(q, 1000000);
    return p;
  }

  void set_W(double w) {
    W = w;
    sigma0 = 0.5 + W / std::log(static_cast<double>(q));
  }

  void validate() const {
    if (q < 3) throw std::invalid_argument("DeskParams: q must be >= 3");
    if (Y < 2 || Y > X) throw std::invalid_argument("DeskParams: need 2 <= Y <= X");
    if (truncK1 < 1 || truncK2 < 1) throw std::invalid_argument("DeskParams: truncation lengths must be >= 1");
    if (supportCap < 1) throw std::invalid_argument("DeskParams: supportCap must be >= 1");
    if (std::abs(sigma0 - (0.5 + W / std::log(static_cast<double>(q)))) > 1e-12) {
      throw std::invalid_argument("DeskParams: sigma0 inconsistent with W");
    }
  }

  MollifierSpec mollifier_spec() const { return {X, Y, K1, K2, supportCap}; }
  ComplexPoint point() const { return {sigma0, t}; }
};

enum class PRange { full_x, below_y, between_y_x, primes_only };

/// Coefficients Lambda(n)/log n (i.e. 1/k at n = p^k) over the chosen range,
/// or 1 at primes for primes_only.
inline CoeffSeries p_coeffs(PRange range, const DeskParams& params, const SieveTables& tables) {
  std::uint64_t lo = 2;
  std::uint64_t hi = params.X;
  if (range == PRange::below_y) hi = params.Y;
  if (range == PRange::between_y_x) lo = params.Y + 1;
  if (hi > tables.limit()) {
    throw std::invalid_argument("p_coeffs: cutoff " + std::to_string(hi) + " exceeds sieve limit " +
                                std::to_string(tables.limit()));
  }
  CoeffSeries out(std::max<std::uint64_t>(1, hi));
  for (std::uint64_t n = lo; n <= hi; ++n) {
    const std::uint64_t p = tables.spf(n);
    if (range == PRange::primes_only) {
      if (p == n) out.set(n, 1.0);
      continue;
    }
    std::uint64_t m = n;
    int k = 0;
    while (m % p == 0) {
      m /= p;
      ++k;
    }
    if (m == 1) out.set(n, 1.0 / k);
  }
  return out;
}

/// c(n) -> c(n) n^{-s}
inline CoeffSeries twist(const CoeffSeries& c, cplx s) {
  CoeffSeries out(c.limit());
  for (const auto& [n, v] : c) out.set(n, v * std::exp(-s * std::log(static_cast<double>(n))));
  return out;
}

/// sum_n c(n) chi(n) n^{-s}, ascending n, pairwise.
inline cplx dirichlet_value(const CoeffSeries& c, cplx s, const Character& chi) {
  std::vector<cplx> terms;
  terms.reserve(c.size());
  for (const auto& [n, v] : c) terms.push_back(v * chi(n) * std::exp(-s * std::log(static_cast<double>(n))));
  return pairwise_sum(terms);
}

/// sum_n c(n) chi(n) n^{-s} for every character of the group.
inline std::vector<cplx> batch_dirichlet_values(const CoeffSeries& c, cplx s, const CharacterGroup& group) {
  return batch_twisted_sums(twist(c, s), group);
}

inline cplx p_series(ComplexPoint s, const Character& chi, PRange range, const DeskParams& params,
                     const SieveTables& tables) {
  if (range == PRange::full_x) {
    // Partition at Y: same terms and order as P1 + P2.
    return p_series(s, chi, PRange::below_y, params, tables) +
           p_series(s, chi, PRange::between_y_x, params, tables);
  }
  return dirichlet_value(p_coeffs(range, params, tables), s.s(), chi);
}

/// sum_{0 <= k <= K} (-z)^k / k!
inline cplx truncated_exp(cplx z, std::uint64_t K) {
  cplx term = 1.0;
  cplx sum = 1.0;
  for (std::uint64_t k = 1; k <= K; ++k) {
    term *= -z / static_cast<double>(k);
    sum += term;
  }
  return sum;
}

enum class ScriptM { one, two };

inline cplx script_M(ComplexPoint s, const Character& chi, ScriptM which, const DeskParams& params,
                     const SieveTables& tables) {
  if (which == ScriptM::one) {
    return truncated_exp(p_series(s, chi, PRange::below_y, params, tables), params.truncK1);
  }
  return truncated_exp(p_series(s, chi, PRange::between_y_x, params, tables), params.truncK2);
}

enum class MollifierPart { full, one, two };

inline SupportKind support_kind(MollifierPart which) {
  switch (which) {
    case MollifierPart::one:
      return SupportKind::below_y;
    case MollifierPart::two:
      return SupportKind::between_y_x;
    default:
      return SupportKind::full;
  }
}

/// mu(n) a(n) (or a1, a2) over the truncated support, zeros dropped.
inline CoeffSeries mollifier_coeffs(MollifierPart which, const DeskParams& params, const SieveTables& tables) {
  const MollifierSpec spec = params.mollifier_spec();
  if (spec.supportCap > tables.limit()) {
    throw std::invalid_argument("mollifier_coeffs: supportCap exceeds sieve limit");
  }
  CoeffSeries out(spec.supportCap);
  for (std::uint64_t n = 1; n <= spec.supportCap; ++n) {
    const int mu = moebius(n, tables);
    if (mu == 0) continue;
    if (detail::admit(detail::count_ranges(n, spec, tables), spec, support_kind(which))) out.set(n, mu);
  }
  return out;
}

namespace detail {

/// Largest squarefree element of the untruncated support: the product of the
/// `cap` largest primes in (lo, hi]. Saturates at +inf.
inline double max_squarefree_support(std::uint64_t lo, std::uint64_t hi, std::uint64_t cap,
                                     const SieveTables& tables) {
  double prod = 1.0;
  std::uint64_t used = 0;
  const auto& primes = tables.primes();
  for (auto it = primes.rbegin(); it != primes.rend() && used < cap; ++it) {
    if (*it > hi || *it <= lo) continue;
    prod *= static_cast<double>(*it);
    ++used;
  }
  return prod;
}

}  // namespace detail

/// True when the support cap cuts off squarefree n that the untruncated
/// mollifier part would include.
inline bool mollifier_truncated(MollifierPart which, const DeskParams& params, const SieveTables& tables) {
  const double m1 = detail::max_squarefree_support(0, std::min(params.Y, params.X), params.K1, tables);
  const double m2 = detail::max_squarefree_support(params.Y, params.X, params.K2, tables);
  const double cap = static_cast<double>(params.supportCap);
  switch (which) {
    case MollifierPart::one:
      return m1 > cap;
    case MollifierPart::two:
      return m2 > cap;
    default:
      return m1 * m2 > cap;
  }
}

struct MollifierValue {
  cplx value;
  /// The support cap removed terms of the untruncated polynomial.
  bool truncated = false;
};

inline MollifierValue mollifier_value(ComplexPoint s, const Character& chi, MollifierPart which,
                                      const DeskParams& params, const SieveTables& tables) {
  return {dirichlet_value(mollifier_coeffs(which, params, tables), s.s(), chi),
          mollifier_truncated(which, params, tables)};
}

/// (A*B)(n) = sum_{de = n} A(d) B(e) for n <= limit.
inline CoeffSeries dirichlet_convolve(const CoeffSeries& a, const CoeffSeries& b, std::uint64_t limit) {
  CoeffSeries out(limit);
  for (const auto& [d, av] : a) {
    if (d > limit) break;
    for (const auto& [e, bv] : b) {
      if (e > limit / d) break;
      out.add(d * e, av * bv);
    }
  }
  out.prune();
  return out;
}

/// Coefficients a_k(n) of P0(s)^k up to `limit`, by repeated convolution.
inline CoeffSeries power_coeffs(std::uint64_t k, const DeskParams& params, const SieveTables& tables,
                                std::uint64_t limit) {
  if (k > 20) throw std::invalid_argument("power_coeffs: k! overflows beyond k = 20");
  if (limit < 1) throw std::invalid_argument("power_coeffs: limit must be >= 1");
  DeskParams capped = params;
  capped.X = std::min(params.X, limit);
  capped.Y = std::min(params.Y, capped.X);
  CoeffSeries base(limit);
  if (capped.X >= 2) {
    for (const auto& [n, v] : p_coeffs(PRange::primes_only, capped, tables)) base.set(n, v);
  }
  CoeffSeries out = CoeffSeries::delta(limit);
  for (std::uint64_t i = 0; i < k; ++i) out = dirichlet_convolve(out, base, limit);
  return out;
}

struct CoeffCheckReport {
  /// sum_n |c(n)|^2 / n^{2 sigma0} with c = b - mu a1.
  double statistic = 0.0;
  double maxAbsB = 0.0;
  /// |b(n)| <= 1 for every computed n.
  bool property1 = true;
  /// b(n) = 0 unless n is Y-smooth and n <= Y^truncK1.
  bool property2 = true;
  /// c(n) = 0 unless Omega(n) > K1 or some p <= Y has p^v || n with p^v > Y.
  bool property3 = true;
  std::uint64_t property3Violations = 0;
  /// truncK1 too short to settle every b(n) up to the limit.
  bool incomplete = false;
  std::uint64_t limit = 0;
  CoeffSeries b;
  CoeffSeries c;
};

/// Expands script-M1 into Dirichlet coefficients b(n) and compares with
/// mu(n) a1(n) on 1 <= n <= limit.
inline CoeffCheckReport m_script_coeff_check(const DeskParams& params, const SieveTables& tables,
                                             std::uint64_t limit) {
  if (limit > tables.limit()) throw std::invalid_argument("m_script_coeff_check: limit exceeds sieve");
  CoeffCheckReport r;
  r.limit = limit;
  r.b = CoeffSeries(limit);
  r.c = CoeffSeries(limit);

  CoeffSeries p1(limit);
  if (params.Y >= 2) {
    DeskParams capped = params;
    capped.Y = std::min(params.Y, limit);
    capped.X = std::max(capped.X, capped.Y);
    for (const auto& [n, v] : p_coeffs(PRange::below_y, capped, tables)) p1.set(n, v);
  }

  // b = sum_{k <= truncK1} (-1)^k / k! P1^{*k}; P1^{*k} vanishes below 2^k.
  std::uint64_t max_omega = 0;
  while ((std::uint64_t{2} << max_omega) <= limit) ++max_omega;
  CoeffSeries power = CoeffSeries::delta(limit);
  double factorial = 1.0;
  for (std::uint64_t k = 0; k <= params.truncK1 && !power.empty(); ++k) {
    if (k > 0) {
      power = dirichlet_convolve(power, p1, limit);
      factorial *= static_cast<double>(k);
    }
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    for (const auto& [n, v] : power) r.b.add(n, sign * v / factorial);
  }
  r.b.prune();
  r.incomplete = params.truncK1 < std::min<std::uint64_t>(params.K1, max_omega);

  const MollifierSpec spec{std::max(params.X, params.Y), params.Y, params.K1, params.K2, limit};
  std::vector<double> terms;
  for (std::uint64_t n = 1; n <= limit; ++n) {
    const cplx bn = r.b[n];
    const double abs_b = std::abs(bn);
    r.maxAbsB = std::max(r.maxAbsB, abs_b);
    if (abs_b > 1.0 + 1e-12) r.property1 = false;

    bool smooth = true;
    bool big_power = false;
    int omega = 0;
    for (const auto& [p, e] : tables.factorize(n)) {
      omega += e;
      if (p > params.Y) smooth = false;
      std::uint64_t pe = 1;
      for (int i = 0; i < e; ++i) pe *= p;
      if (p <= params.Y && pe > params.Y) big_power = true;
    }
    if (abs_b > 1e-12) {
      const double max_n = std::pow(static_cast<double>(std::max<std::uint64_t>(params.Y, 1)),
                                    static_cast<double>(params.truncK1));
      if (!smooth || static_cast<double>(n) > max_n) r.property2 = false;
    }

    const int a1 = detail::admit(detail::count_ranges(n, spec, tables), spec, SupportKind::below_y);
    const cplx cn = bn - static_cast<double>(moebius(n, tables) * a1);
    if (std::abs(cn) > 1e-12) {
      r.c.set(n, cn);
      const bool excused = static_cast<std::uint64_t>(omega) > params.K1 || big_power;
      if (!excused) ++r.property3Violations;
    }
    terms.push_back(std::norm(cn) * std::pow(static_cast<double>(n), -2.0 * params.sigma0));
  }
  r.property3 = r.property3Violations == 0;
  r.statistic = pairwise_sum(terms);
  return r;
}

inline CoeffCheckReport m_script_coeff_check(const DeskParams& params, const SieveTables& tables) {
  return m_script_coeff_check(params, tables, params.supportCap);
}

}  // namespace qclt
