#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qclt {

using cplx = std::complex<double>;

namespace detail {

inline bool is_gamma_pole(cplx z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

}  // namespace detail

/// log Gamma(z) on the branch that is continuous off the negative real axis
/// (real on the positive axis). The argument is shifted to Re z >= 12 and the
/// Stirling series is summed through the B_16 term.
inline cplx log_gamma(cplx z) {
  if (detail::is_gamma_pole(z)) {
    throw std::domain_error("log_gamma: pole at z = " + std::to_string(z.real()));
  }
  cplx shift_log{};
  while (z.real() < 12.0) {
    shift_log += std::log(z);
    z += 1.0;
  }
  static constexpr double kStirling[] = {
      1.0 / 12.0,        -1.0 / 360.0,  1.0 / 1260.0, -1.0 / 1680.0,
      1.0 / 1188.0,      -691.0 / 360360.0, 1.0 / 156.0, -3617.0 / 122400.0};
  const cplx inv = 1.0 / z;
  const cplx inv2 = inv * inv;
  cplx series{};
  cplx power = inv;
  for (double c : kStirling) {
    series += c * power;
    power *= inv2;
  }
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  return (z - 0.5) * std::log(z) - z + half_log_2pi + series - shift_log;
}

inline cplx gamma(cplx z) { return std::exp(log_gamma(z)); }

/// Regularized upper incomplete gamma Q(z, x) = Gamma(z, x) / Gamma(z) for
/// complex z and real x >= 0. Power series for x < Re z + 1, Legendre's
/// continued fraction (modified Lentz) otherwise.
inline cplx gamma_q(cplx z, double x) {
  if (x < 0.0) throw std::domain_error("gamma_q: x must be non-negative");
  if (detail::is_gamma_pole(z)) throw std::domain_error("gamma_q: z is a pole of Gamma");
  if (x == 0.0) return 1.0;
  constexpr double kEps = 1e-17;
  constexpr int kMaxIter = 100000;
  const double log_x = std::log(x);
  if (x < z.real() + 1.0) {
    // P(z, x) = x^z e^-x / Gamma(z+1) * sum_k x^k / ((z+1)...(z+k)).
    cplx term = 1.0;
    cplx sum = 1.0;
    for (int k = 1; k < kMaxIter; ++k) {
      term *= x / (z + static_cast<double>(k));
      sum += term;
      if (std::abs(term) < kEps * std::abs(sum)) break;
    }
    const cplx p = std::exp(z * log_x - x - log_gamma(z + 1.0)) * sum;
    return 1.0 - p;
  }
  constexpr double kTiny = 1e-300;
  cplx b = x + 1.0 - z;
  cplx c = 1.0 / kTiny;
  cplx d = 1.0 / b;
  cplx h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const cplx an = -static_cast<double>(i) * (static_cast<double>(i) - z);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const cplx del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return std::exp(z * log_x - x - log_gamma(z)) * h;
}

}  // namespace qclt
