#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace qclt {

/// A finite Dirichlet series: sparse coefficients n -> c(n) for 1 <= n <= limit.
/// Absent indices are zero. Iteration is in ascending n.
class CoeffSeries {
 public:
  using value_type = std::complex<double>;
  using map_type = std::map<std::uint64_t, value_type>;

  CoeffSeries() = default;
  explicit CoeffSeries(std::uint64_t limit) : limit_(limit) {
    if (limit < 1) throw std::invalid_argument("CoeffSeries: limit must be >= 1");
  }

  /// The identity for Dirichlet convolution: 1 at n = 1.
  static CoeffSeries delta(std::uint64_t limit) {
    CoeffSeries s(limit);
    s.set(1, 1.0);
    return s;
  }

  std::uint64_t limit() const { return limit_; }
  std::size_t size() const { return coeffs_.size(); }
  bool empty() const { return coeffs_.empty(); }

  value_type operator[](std::uint64_t n) const {
    auto it = coeffs_.find(n);
    return it == coeffs_.end() ? value_type{} : it->second;
  }

  void set(std::uint64_t n, value_type c) {
    check(n);
    if (c == value_type{}) {
      coeffs_.erase(n);
    } else {
      coeffs_[n] = c;
    }
  }

  void add(std::uint64_t n, value_type c) {
    check(n);
    coeffs_[n] += c;
  }

  /// Drop entries that cancelled to exactly zero.
  void prune() {
    std::erase_if(coeffs_, [](const auto& kv) { return kv.second == value_type{}; });
  }

  auto begin() const { return coeffs_.begin(); }
  auto end() const { return coeffs_.end(); }
  const map_type& entries() const { return coeffs_; }

 private:
  void check(std::uint64_t n) const {
    if (n < 1 || n > limit_) {
      throw std::invalid_argument("CoeffSeries: index " + std::to_string(n) + " outside [1, " +
                                  std::to_string(limit_) + "]");
    }
  }

  std::uint64_t limit_ = 1;
  map_type coeffs_;
};

}  // namespace qclt
