#pragma once

// Family moments, Gaussian predictions, empirical distribution reports.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "qclt/arith.hpp"
#include "qclt/mollifier.hpp"
#include "qclt/summation.hpp"

namespace qclt {

struct MomentReport {
  std::uint64_t k = 0;
  std::uint64_t l = 0;
  /// Family average of z^k conj(z)^l.
  cplx empirical;
  std::optional<double> predicted;
  /// Sample standard deviation of the summand over sqrt(sampleSize).
  double stdError = 0.0;
  std::uint64_t sampleSize = 0;
};

namespace detail {

inline cplx ipow(cplx z, std::uint64_t k) {
  cplx r = 1.0;
  for (std::uint64_t i = 0; i < k; ++i) r *= z;
  return r;
}

inline MomentReport moment_of_terms(std::vector<cplx> terms, std::uint64_t k, std::uint64_t l) {
  const double n = static_cast<double>(terms.size());
  MomentReport r;
  r.k = k;
  r.l = l;
  r.sampleSize = terms.size();
  r.empirical = pairwise_sum(terms) / n;
  if (terms.size() > 1) {
    std::vector<double> dev(terms.size());
    std::transform(terms.begin(), terms.end(), dev.begin(), [&](cplx v) { return std::norm(v - r.empirical); });
    r.stdError = std::sqrt(pairwise_sum(dev) / (n - 1.0) / n);
  }
  return r;
}

}  // namespace detail

inline MomentReport mixed_moment(std::span<const cplx> samples, std::uint64_t k, std::uint64_t l) {
  if (samples.empty()) throw std::invalid_argument("mixed_moment: empty sample");
  std::vector<cplx> terms(samples.size());
  std::transform(samples.begin(), samples.end(), terms.begin(),
                 [&](cplx z) { return detail::ipow(z, k) * detail::ipow(std::conj(z), l); });
  return detail::moment_of_terms(std::move(terms), k, l);
}

/// Average of x^k for real samples.
inline MomentReport real_moment(std::span<const double> samples, std::uint64_t k) {
  if (samples.empty()) throw std::invalid_argument("real_moment: empty sample");
  std::vector<cplx> terms(samples.size());
  std::transform(samples.begin(), samples.end(), terms.begin(),
                 [&](double x) { return cplx(std::pow(x, static_cast<double>(k))); });
  return detail::moment_of_terms(std::move(terms), k, 0);
}

/// V_X = sum_{p <= X} p^{-2 sigma0}, exact from the sieve.
inline double prime_sum_variance(const DeskParams& params, const SieveTables& tables) {
  if (params.X > tables.limit()) throw std::invalid_argument("prime_sum_variance: X exceeds sieve limit");
  std::vector<double> terms;
  for (std::uint64_t p : tables.primes()) {
    if (p > params.X) break;
    terms.push_back(std::pow(static_cast<double>(p), -2.0 * params.sigma0));
  }
  return pairwise_sum(terms);
}

/// k! V_X^k
inline double predicted_diag_moment(std::uint64_t k, const DeskParams& params, const SieveTables& tables) {
  const double v = prime_sum_variance(params, tables);
  double r = 1.0;
  for (std::uint64_t i = 1; i <= k; ++i) r *= static_cast<double>(i) * v;
  return r;
}

/// 0 for odd k, else 2^{-k} C(k, k/2) (k/2)! V^{k/2}.
inline double predicted_real_moment(std::uint64_t k, double V) {
  if (k % 2 == 1) return 0.0;
  const std::uint64_t h = k / 2;
  double binom = 1.0;
  for (std::uint64_t i = 1; i <= h; ++i) binom = binom * static_cast<double>(h + i) / static_cast<double>(i);
  double fact = 1.0;
  for (std::uint64_t i = 2; i <= h; ++i) fact *= static_cast<double>(i);
  return std::ldexp(binom * fact, -static_cast<int>(k)) * std::pow(V, static_cast<double>(h));
}

/// P(N(0,1) >= V)
inline double gaussian_tail(double V) { return 0.5 * std::erfc(V / std::numbers::sqrt2); }

inline double gaussian_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// sup |F_n - Phi| for ascending samples.
inline double ks_distance(std::span<const double> sorted) {
  if (sorted.empty()) throw std::invalid_argument("ks_distance: empty sample");
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = gaussian_cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return std::clamp(d, 0.0, 1.0);
}

enum class Normalization { paper_scale, empirical_scale };

inline const char* to_string(Normalization n) {
  return n == Normalization::paper_scale ? "paper_scale" : "empirical_scale";
}

struct TailRow {
  double V = 0.0;
  double empirical = 0.0;
  double gaussian = 0.0;
};

struct EdfReport {
  /// Normalized, ascending.
  std::vector<double> samples;
  double mean = 0.0;
  double variance = 0.0;
  double ksDistance = 0.0;
  std::uint64_t flaggedCount = 0;
  Normalization normalization = Normalization::paper_scale;
  double rawMean = 0.0;
  double rawVariance = 0.0;
  double scale = 1.0;
  std::vector<TailRow> tails;
};

inline constexpr double kTailPoints[] = {-2.0, -1.0, 0.0, 1.0, 2.0};

/// paper_scale divides by `paper_scale`; empirical_scale subtracts the mean
/// and divides by the sample standard deviation (left at 1 if that is 0).
inline EdfReport edf_report(std::span<const double> raw, Normalization normalization, double paper_scale,
                            std::uint64_t flagged = 0) {
  if (raw.size() < 2) throw std::invalid_argument("edf_report: need at least 2 unflagged samples");
  if (!(paper_scale > 0.0)) throw std::invalid_argument("edf_report: scale must be positive");
  EdfReport r;
  r.normalization = normalization;
  r.flaggedCount = flagged;
  const double n = static_cast<double>(raw.size());
  r.rawMean = pairwise_sum(raw) / n;
  std::vector<double> sq(raw.size());
  std::transform(raw.begin(), raw.end(), sq.begin(), [&](double x) { return (x - r.rawMean) * (x - r.rawMean); });
  r.rawVariance = pairwise_sum(sq) / (n - 1.0);

  double shift = 0.0;
  if (normalization == Normalization::paper_scale) {
    r.scale = paper_scale;
  } else {
    shift = r.rawMean;
    r.scale = r.rawVariance > 0.0 ? std::sqrt(r.rawVariance) : 1.0;
  }
  r.samples.resize(raw.size());
  std::transform(raw.begin(), raw.end(), r.samples.begin(), [&](double x) { return (x - shift) / r.scale; });
  std::sort(r.samples.begin(), r.samples.end());
  r.mean = pairwise_sum(r.samples) / n;
  std::transform(r.samples.begin(), r.samples.end(), sq.begin(), [&](double x) { return (x - r.mean) * (x - r.mean); });
  r.variance = pairwise_sum(sq) / (n - 1.0);
  r.ksDistance = ks_distance(r.samples);
  for (double V : kTailPoints) {
    const auto above = r.samples.end() - std::lower_bound(r.samples.begin(), r.samples.end(), V);
    r.tails.push_back({V, static_cast<double>(above) / n, gaussian_tail(V)});
  }
  return r;
}

/// sqrt(loglog(q) / 2)
inline double paper_scale_for(std::uint64_t q) {
  const double l2 = DeskParams::loglog(static_cast<double>(q));
  if (!(l2 > 0.0)) throw std::invalid_argument("paper_scale_for: loglog q must be positive");
  return std::sqrt(0.5 * l2);
}

inline EdfReport edf_report(std::span<const double> raw, Normalization normalization, const DeskParams& params,
                            std::uint64_t flagged = 0) {
  return edf_report(raw, normalization, paper_scale_for(params.q), flagged);
}

}  // namespace qclt
