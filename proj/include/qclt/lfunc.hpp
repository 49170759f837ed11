#pragma once

// L(s, chi) by direct truncation at n <= q or by the smoothed approximate
// functional equation, the gamma factor G(s, chi), the completed function
// xi = G L, root numbers, and the closeness statistic between log|L| on the
// critical line and slightly to its right.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qclt/characters.hpp"
#include "qclt/gamma.hpp"
#include "qclt/summation.hpp"

namespace qclt {

struct ComplexPoint {
  double sigma = 0.5;
  double t = 0.0;

  cplx s() const { return {sigma, t}; }
  static ComplexPoint from(cplx s) { return {s.real(), s.imag()}; }
};

inline cplx log_gamma(ComplexPoint s) { return log_gamma(s.s()); }

/// Thrown when an evaluation method is not defined for the given character.
class UnsupportedMethod : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class LMethod { truncated, smoothed };

inline const char* to_string(LMethod m) { return m == LMethod::truncated ? "truncated" : "smoothed"; }

struct LValue {
  ComplexPoint s;
  std::size_t chiIndex = 0;
  cplx value;
  LMethod method = LMethod::truncated;
  double errEstimate = 0.0;
};

struct RootNumber {
  cplx value;
};

/// log G(s, chi) for modulus q and parity a, where
/// G(s, chi) = (pi/q)^{-(s+a)/2} Gamma((s+a)/2).
inline cplx log_gamma_factor(cplx s, std::uint64_t q, int parity) {
  const cplx z = (s + static_cast<double>(parity)) / 2.0;
  return -z * std::log(std::numbers::pi / static_cast<double>(q)) + log_gamma(z);
}

inline cplx gamma_factor(ComplexPoint s, const Character& chi) {
  return std::exp(log_gamma_factor(s.s(), chi.modulus(), chi.parity()));
}

/// epsilon(chi) = tau(chi) / (i^a sqrt(q)), from a precomputed Gauss sum.
inline cplx root_number_from_tau(cplx tau, std::uint64_t q, int parity) {
  const cplx i_a = parity ? cplx{0.0, 1.0} : cplx{1.0, 0.0};
  return tau / (i_a * std::sqrt(static_cast<double>(q)));
}

inline RootNumber root_number(const Character& chi) {
  return {root_number_from_tau(gauss_sum(chi), chi.modulus(), chi.parity())};
}

/// Weights of the smoothed approximate functional equation for primitive
/// characters of one modulus and parity:
///   L(s, chi) = sum_n chi(n) direct[n-1] + eps(chi) sum_n conj(chi)(n) dual[n-1],
/// direct[n-1] = n^{-s} Q(z, lambda pi n^2 / q),
/// dual[n-1]   = (q/pi)^{1/2-s} Gamma(z')/Gamma(z) n^{s-1} Q(z', pi n^2 / (lambda q)),
/// with z = (s+a)/2, z' = (1-s+a)/2 and split parameter lambda (1 = balanced).
struct AfeWeights {
  std::vector<cplx> direct;
  std::vector<cplx> dual;
  double tailEstimate = 0.0;
};

inline AfeWeights make_afe_weights(cplx s, std::uint64_t q, int parity, double split = 1.0) {
  if (q < 3) throw UnsupportedMethod("smoothed L-value needs modulus q >= 3");
  if (!(split > 0.0)) throw std::invalid_argument("make_afe_weights: split must be positive");
  const double a = static_cast<double>(parity);
  const cplx z = (s + a) / 2.0;
  const cplx zd = (1.0 - s + a) / 2.0;
  if (detail::is_gamma_pole(z) || detail::is_gamma_pole(zd)) {
    throw std::domain_error("make_afe_weights: gamma pole at s");
  }
  const double qd = static_cast<double>(q);
  const cplx log_pref = (0.5 - s) * std::log(qd / std::numbers::pi) + log_gamma(zd) - log_gamma(z);
  const cplx pref = std::exp(log_pref);
  const double scale = std::max(1.0, std::abs(pref));
  constexpr double kTol = 1e-19;

  AfeWeights w;
  for (std::uint64_t n = 1;; ++n) {
    const double nd = static_cast<double>(n);
    const double x = std::numbers::pi * nd * nd / qd;
    const double log_n = std::log(nd);
    const cplx wd = std::exp(-s * log_n) * gamma_q(z, split * x);
    const cplx wu = pref * std::exp((s - 1.0) * log_n) * gamma_q(zd, x / split);
    w.direct.push_back(wd);
    w.dual.push_back(wu);
    const bool past_peak = split * x > z.real() + 2.0 && x / split > zd.real() + 2.0;
    if (past_peak && std::abs(wd) < kTol * scale && std::abs(wu) < kTol * scale) {
      w.tailEstimate = 10.0 * (std::abs(wd) + std::abs(wu));
      break;
    }
    if (n > 100000000) throw std::runtime_error("make_afe_weights: weights failed to decay");
  }
  return w;
}

namespace detail {

inline cplx twisted_sum(const Character& chi, const std::vector<cplx>& weights) {
  std::vector<cplx> terms(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) terms[i] = chi.evaluate(i + 1) * weights[i];
  return pairwise_sum(terms);
}

inline double rounding_estimate(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double mass = 0.0;
  for (const auto& v : a) mass += std::abs(v);
  for (const auto& v : b) mass += std::abs(v);
  return 4.0 * std::numeric_limits<double>::epsilon() * mass;
}

}  // namespace detail

struct LOptions {
  /// AFE split parameter; results must not depend on it beyond rounding.
  double split = 1.0;
};

/// L(s, chi). The truncated method is the raw sum over n <= q; the smoothed
/// method is the approximate functional equation and needs a primitive chi.
inline LValue L_value(ComplexPoint s, const Character& chi, LMethod method, LOptions opts = {}) {
  const std::uint64_t q = chi.modulus();
  if (q == 1) throw UnsupportedMethod("L_value: modulus 1 is not supported");
  LValue out;
  out.s = s;
  out.chiIndex = chi.index();
  out.method = method;
  if (method == LMethod::truncated) {
    std::vector<cplx> terms(q);
    const cplx sv = s.s();
    for (std::uint64_t n = 1; n <= q; ++n) {
      const cplx c = chi.evaluate(n);
      terms[n - 1] = c == cplx{} ? cplx{} : c * std::exp(-sv * std::log(static_cast<double>(n)));
    }
    out.value = pairwise_sum(terms);
    out.errEstimate = 1.0 / std::sqrt(static_cast<double>(q));
    return out;
  }
  if (!chi.is_primitive()) {
    throw UnsupportedMethod("L_value: smoothed method requires a primitive character (q=" +
                            std::to_string(q) + ", index " + std::to_string(chi.index()) + ")");
  }
  const AfeWeights w = make_afe_weights(s.s(), q, chi.parity(), opts.split);
  const cplx eps = root_number(chi).value;
  out.value = detail::twisted_sum(chi, w.direct) + eps * detail::twisted_sum(chi.conj(), w.dual);
  out.errEstimate = w.tailEstimate + detail::rounding_estimate(w.direct, w.dual);
  return out;
}

/// xi(s, chi) = G(s, chi) L(s, chi), L by the smoothed method.
inline cplx completed_xi(ComplexPoint s, const Character& chi, LOptions opts = {}) {
  return gamma_factor(s, chi) * L_value(s, chi, LMethod::smoothed, opts).value;
}

/// |xi(s, chi) - eps(chi) xi(1 - s, conj chi)| / |xi(s, chi)|. The two sides use
/// different AFE splits, so the identity is not built into the evaluation.
inline double functional_equation_residual(ComplexPoint s, const Character& chi) {
  const cplx lhs = completed_xi(s, chi, {1.0});
  const ComplexPoint reflected = ComplexPoint::from(1.0 - s.s());
  const cplx rhs = root_number(chi).value * completed_xi(reflected, chi.conj(), {std::numbers::sqrt2});
  return std::abs(lhs - rhs) / std::abs(lhs);
}

/// L(s, chi) for every character of `group` at once.
struct FamilyLValues {
  ComplexPoint s;
  LMethod method = LMethod::truncated;
  std::vector<cplx> values;
  /// False where the method is not defined (smoothed, non-primitive chi).
  std::vector<bool> available;
  double errEstimate = 0.0;
};

struct GroupInfo {
  std::vector<int> parity;
  std::vector<bool> primitive;
  std::vector<cplx> taus;
};

inline GroupInfo group_info(const CharacterGroup& group) {
  GroupInfo info;
  info.parity.resize(group.size());
  info.primitive.resize(group.size());
  const std::uint64_t q = group.modulus();
  const auto d = group.dlog_index(q == 1 ? 1 : q - 1);
  for (std::size_t i = 0; i < group.size(); ++i) {
    info.parity[i] = group.pairing(i, *d) != 0 ? 1 : 0;
    info.primitive[i] = group.character(i).is_primitive();
  }
  if (q >= 3) info.taus = batch_gauss_sums(group);
  return info;
}

inline FamilyLValues batch_L_values(ComplexPoint s, const CharacterGroup& group, LMethod method,
                                    const GroupInfo& info, LOptions opts = {}) {
  const std::uint64_t q = group.modulus();
  if (q == 1) throw UnsupportedMethod("batch_L_values: modulus 1 is not supported");
  FamilyLValues out;
  out.s = s;
  out.method = method;
  const cplx sv = s.s();
  if (method == LMethod::truncated) {
    std::vector<cplx> coeffs(q);
    for (std::uint64_t n = 1; n <= q; ++n) {
      coeffs[n - 1] = std::exp(-sv * std::log(static_cast<double>(n)));
    }
    out.values = batch_twisted_sums(std::span<const cplx>(coeffs), group);
    out.available.assign(group.size(), true);
    out.errEstimate = 1.0 / std::sqrt(static_cast<double>(q));
    return out;
  }
  out.values.assign(group.size(), cplx{});
  out.available.assign(group.size(), false);
  if (q < 3) return out;
  bool need[2] = {false, false};
  for (std::size_t i = 0; i < group.size(); ++i) {
    if (info.primitive[i]) need[info.parity[i]] = true;
  }
  const std::vector<cplx>& taus = info.taus;
  for (int a = 0; a < 2; ++a) {
    if (!need[a]) continue;
    const AfeWeights w = make_afe_weights(sv, q, a, opts.split);
    const auto direct = batch_twisted_sums(std::span<const cplx>(w.direct), group);
    const auto dual = batch_twisted_sums(std::span<const cplx>(w.dual), group);
    out.errEstimate = std::max(out.errEstimate, w.tailEstimate + detail::rounding_estimate(w.direct, w.dual));
    for (std::size_t i = 0; i < group.size(); ++i) {
      if (!info.primitive[i] || info.parity[i] != a) continue;
      const cplx eps = root_number_from_tau(taus[i], q, a);
      out.values[i] = direct[i] + eps * dual[group.conj_index(i)];
      out.available[i] = true;
    }
  }
  return out;
}

inline FamilyLValues batch_L_values(ComplexPoint s, const CharacterGroup& group, LMethod method,
                                    LOptions opts = {}) {
  return batch_L_values(s, group, method, group_info(group), opts);
}

/// log|L| or nullopt when |L| < floor.
inline std::optional<double> log_abs_L(cplx value, double floor) {
  if (!(floor > 0.0)) throw std::invalid_argument("log_abs_L: floor must be positive");
  const double mag = std::abs(value);
  if (!(mag >= floor)) return std::nullopt;
  return std::log(mag);
}

inline std::optional<double> log_abs_L(ComplexPoint s, const Character& chi, LMethod method, double floor) {
  return log_abs_L(L_value(s, chi, method).value, floor);
}

struct Prop1Result {
  double sigma = 0.5;
  double statistic = 0.0;
  /// statistic / ((sigma - 1/2) log q)
  double ratio = 0.0;
  std::size_t sampleSize = 0;
  std::size_t flagged = 0;
};

/// Mean over `members` of | log|L(1/2+it)| - log|L(sigma+it)| |, skipping
/// characters whose L-value is below `floor` at either point.
/// Mean over members of |log|L(sigma)| - log|L(1/2)||, from precomputed family values.
inline Prop1Result prop1_statistic(const FamilyLValues& half, const FamilyLValues& right, std::uint64_t q,
                                   std::span<const std::size_t> members, double floor) {
  const double sigma = right.s.sigma;
  if (!(sigma > 0.5)) throw std::invalid_argument("prop1_statistic: sigma must exceed 1/2");
  if (members.empty()) throw std::invalid_argument("prop1_statistic: empty family");
  std::vector<double> diffs;
  Prop1Result r;
  r.sigma = sigma;
  for (std::size_t i : members) {
    if (!half.available[i] || !right.available[i]) continue;
    const auto a = log_abs_L(half.values[i], floor);
    const auto b = log_abs_L(right.values[i], floor);
    if (!a || !b) {
      ++r.flagged;
      continue;
    }
    diffs.push_back(std::abs(*a - *b));
  }
  if (diffs.empty()) throw std::invalid_argument("prop1_statistic: no usable characters in family");
  r.sampleSize = diffs.size();
  r.statistic = pairwise_sum(diffs) / static_cast<double>(diffs.size());
  r.ratio = r.statistic / ((sigma - 0.5) * std::log(static_cast<double>(q)));
  return r;
}

inline Prop1Result prop1_statistic(const CharacterGroup& group, const GroupInfo& info,
                                   std::span<const std::size_t> members, double sigma, double t,
                                   LMethod method, double floor) {
  if (!(sigma > 0.5)) throw std::invalid_argument("prop1_statistic: sigma must exceed 1/2");
  if (members.empty()) throw std::invalid_argument("prop1_statistic: empty family");
  const auto half = batch_L_values({0.5, t}, group, method, info);
  const auto right = batch_L_values({sigma, t}, group, method, info);
  return prop1_statistic(half, right, group.modulus(), members, floor);
}

}  // namespace qclt
