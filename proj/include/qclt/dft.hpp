#pragma once

// Discrete Fourier transforms of arbitrary length: iterative radix-2 for
// powers of two, direct summation for short lengths, Bluestein's chirp
// convolution otherwise. A transform along one axis of a row-major
// multi-dimensional array is what the character-group transform needs.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace qclt {

using cplx = std::complex<double>;

namespace detail {

inline cplx unit_root(std::uint64_t k, std::uint64_t n, int sign) {
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(k % n) / static_cast<double>(n);
  return {std::cos(angle), sign * std::sin(angle)};
}

class Radix2 {
 public:
  explicit Radix2(std::size_t n) : n_(n), twiddle_(n / 2) {
    for (std::size_t k = 0; k < n / 2; ++k) twiddle_[k] = unit_root(k, n, -1);
  }

  // Forward transform (kernel e^{-2 pi i jk/n}), unnormalized.
  void forward(std::vector<cplx>& a) const { run(a, false); }
  void inverse(std::vector<cplx>& a) const { run(a, true); }

 private:
  void run(std::vector<cplx>& a, bool conj) const {
    const std::size_t n = n_;
    for (std::size_t i = 1, j = 0; i < n; ++i) {
      std::size_t bit = n >> 1;
      for (; j & bit; bit >>= 1) j ^= bit;
      j ^= bit;
      if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
      const std::size_t step = n / len;
      for (std::size_t i = 0; i < n; i += len) {
        for (std::size_t j = 0; j < len / 2; ++j) {
          cplx w = twiddle_[j * step];
          if (conj) w = std::conj(w);
          const cplx u = a[i + j];
          const cplx v = a[i + j + len / 2] * w;
          a[i + j] = u + v;
          a[i + j + len / 2] = u - v;
        }
      }
    }
  }

  std::size_t n_;
  std::vector<cplx> twiddle_;
};

}  // namespace detail

/// Precomputed plan for X[k] = sum_j x[j] exp(sign * 2 pi i jk / n).
class DftPlan {
 public:
  DftPlan(std::size_t n, int sign) : n_(n), sign_(sign) {
    if (n == 0) throw std::invalid_argument("DftPlan: length must be positive");
    if (sign != 1 && sign != -1) throw std::invalid_argument("DftPlan: sign must be +-1");
    if (is_pow2(n)) {
      kind_ = Kind::radix2;
      radix2_.emplace_back(n);
    } else if (n <= kDirectLimit) {
      kind_ = Kind::direct;
      roots_.resize(n);
      for (std::size_t k = 0; k < n; ++k) roots_[k] = detail::unit_root(k, n, sign);
    } else {
      kind_ = Kind::bluestein;
      m_ = 1;
      while (m_ < 2 * n - 1) m_ <<= 1;
      radix2_.emplace_back(m_);
      // chirp[j] = exp(sign * i pi j^2 / n); j^2 reduced mod 2n keeps the angle exact.
      chirp_.resize(n);
      for (std::size_t j = 0; j < n; ++j) {
        const std::uint64_t jj = (static_cast<std::uint64_t>(j) * j) % (2 * n);
        chirp_[j] = detail::unit_root(jj, 2 * n, sign);
      }
      kernel_.assign(m_, cplx{});
      kernel_[0] = std::conj(chirp_[0]);
      for (std::size_t j = 1; j < n; ++j) {
        kernel_[j] = std::conj(chirp_[j]);
        kernel_[m_ - j] = std::conj(chirp_[j]);
      }
      radix2_[0].forward(kernel_);
    }
  }

  std::size_t size() const { return n_; }
  int sign() const { return sign_; }

  /// In-place transform of a contiguous buffer of length size().
  void execute(std::vector<cplx>& data) const {
    if (data.size() != n_) throw std::invalid_argument("DftPlan: buffer length mismatch");
    switch (kind_) {
      case Kind::radix2:
        if (sign_ < 0) {
          radix2_[0].forward(data);
        } else {
          radix2_[0].inverse(data);
        }
        break;
      case Kind::direct: {
        std::vector<cplx> out(n_);
        for (std::size_t k = 0; k < n_; ++k) {
          cplx acc{};
          std::size_t idx = 0;
          for (std::size_t j = 0; j < n_; ++j) {
            acc += data[j] * roots_[idx];
            idx += k;
            if (idx >= n_) idx -= n_;
          }
          out[k] = acc;
        }
        data.swap(out);
        break;
      }
      case Kind::bluestein: {
        std::vector<cplx> buf(m_, cplx{});
        for (std::size_t j = 0; j < n_; ++j) buf[j] = data[j] * chirp_[j];
        radix2_[0].forward(buf);
        for (std::size_t j = 0; j < m_; ++j) buf[j] *= kernel_[j];
        radix2_[0].inverse(buf);
        const double scale = 1.0 / static_cast<double>(m_);
        for (std::size_t k = 0; k < n_; ++k) data[k] = buf[k] * chirp_[k] * scale;
        break;
      }
    }
  }

  /// Transform every line along one axis of a row-major array whose axis has
  /// length size() and stride `stride`; `outer` blocks of `size()*stride`.
  void execute_axis(std::span<cplx> array, std::size_t stride) const {
    const std::size_t block = n_ * stride;
    if (array.size() % block != 0) throw std::invalid_argument("DftPlan: axis layout mismatch");
    std::vector<cplx> line(n_);
    for (std::size_t base = 0; base < array.size(); base += block) {
      for (std::size_t inner = 0; inner < stride; ++inner) {
        for (std::size_t j = 0; j < n_; ++j) line[j] = array[base + inner + j * stride];
        execute(line);
        for (std::size_t j = 0; j < n_; ++j) array[base + inner + j * stride] = line[j];
      }
    }
  }

 private:
  enum class Kind { radix2, direct, bluestein };
  static constexpr std::size_t kDirectLimit = 16;

  static bool is_pow2(std::size_t n) { return (n & (n - 1)) == 0; }

  std::size_t n_;
  int sign_;
  Kind kind_ = Kind::direct;
  std::size_t m_ = 0;
  std::vector<detail::Radix2> radix2_;
  std::vector<cplx> roots_;
  std::vector<cplx> chirp_;
  std::vector<cplx> kernel_;
};

}  // namespace qclt
