#pragma once

// Sieved integer arithmetic: smallest-prime-factor tables, the von Mangoldt
// and Moebius functions, and the 0/1 support functions of the mollifier.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace qclt {

struct PrimePower {
  std::uint64_t prime;
  int exponent;
};

/// Smallest-prime-factor table for 2..limit, built by a linear sieve.
/// Immutable after construction.
class SieveTables {
 public:
  explicit SieveTables(std::uint64_t limit) : limit_(limit) {
    if (limit < 2) {
      throw std::invalid_argument("build_sieve: limit must be >= 2, got " + std::to_string(limit));
    }
    if (limit >= std::numeric_limits<std::uint32_t>::max()) {
      throw std::invalid_argument("build_sieve: limit too large");
    }
    spf_.assign(limit + 1, 0);
    for (std::uint64_t n = 2; n <= limit; ++n) {
      if (spf_[n] == 0) {
        spf_[n] = static_cast<std::uint32_t>(n);
        primes_.push_back(static_cast<std::uint32_t>(n));
      }
      for (std::uint32_t p : primes_) {
        if (p > spf_[n] || n * p > limit) break;
        spf_[n * p] = p;
      }
    }
  }

  std::uint64_t limit() const { return limit_; }
  const std::vector<std::uint32_t>& primes() const { return primes_; }

  std::uint64_t spf(std::uint64_t n) const {
    check_range(n, 2, "spf");
    return spf_[n];
  }

  bool is_prime(std::uint64_t n) const {
    check_range(n, 1, "is_prime");
    return n >= 2 && spf_[n] == n;
  }

  /// Prime factorization in ascending prime order; empty for n = 1.
  std::vector<PrimePower> factorize(std::uint64_t n) const {
    check_range(n, 1, "factorize");
    std::vector<PrimePower> out;
    while (n > 1) {
      const std::uint64_t p = spf_[n];
      int e = 0;
      while (n % p == 0) {
        n /= p;
        ++e;
      }
      out.push_back({p, e});
    }
    return out;
  }

  void check_range(std::uint64_t n, std::uint64_t lo, const char* what) const {
    if (n < lo || n > limit_) {
      throw std::invalid_argument(std::string(what) + ": n=" + std::to_string(n) +
                                  " outside sieve range [" + std::to_string(lo) + ", " +
                                  std::to_string(limit_) + "]");
    }
  }

 private:
  std::uint64_t limit_;
  std::vector<std::uint32_t> spf_;
  std::vector<std::uint32_t> primes_;
};

inline SieveTables build_sieve(std::uint64_t limit) { return SieveTables(limit); }

/// Lambda(n): log p when n = p^k, else 0.
inline double mangoldt(std::uint64_t n, const SieveTables& tables) {
  tables.check_range(n, 1, "mangoldt");
  if (n == 1) return 0.0;
  const std::uint64_t p = tables.spf(n);
  std::uint64_t m = n;
  while (m % p == 0) m /= p;
  return m == 1 ? std::log(static_cast<double>(p)) : 0.0;
}

inline int moebius(std::uint64_t n, const SieveTables& tables) {
  tables.check_range(n, 1, "moebius");
  int sign = 1;
  while (n > 1) {
    const std::uint64_t p = tables.spf(n);
    n /= p;
    if (n % p == 0) return 0;
    sign = -sign;
  }
  return sign;
}

/// Omega(n): number of prime factors counted with multiplicity.
inline int big_omega(std::uint64_t n, const SieveTables& tables) {
  tables.check_range(n, 1, "big_omega");
  int count = 0;
  while (n > 1) {
    n /= tables.spf(n);
    ++count;
  }
  return count;
}

/// Cutoffs and caps that define the mollifier support a(n), a1(n), a2(n).
/// Prime-factor counts are taken with multiplicity.
struct MollifierSpec {
  std::uint64_t X = 2;
  std::uint64_t Y = 2;
  std::uint64_t K1 = 0;
  std::uint64_t K2 = 0;
  std::uint64_t supportCap = 1;

  void validate() const {
    if (Y < 2 || Y > X) {
      throw std::invalid_argument("MollifierSpec: need 2 <= Y <= X (Y=" + std::to_string(Y) +
                                  ", X=" + std::to_string(X) + ")");
    }
    if (supportCap < 1) throw std::invalid_argument("MollifierSpec: supportCap must be >= 1");
  }
};

enum class SupportKind { full, below_y, between_y_x };

namespace detail {

struct RangeCounts {
  std::uint64_t below_y = 0;    // primes p <= Y, with multiplicity
  std::uint64_t between = 0;    // Y < p <= X
  std::uint64_t above_x = 0;    // p > X
};

inline RangeCounts count_ranges(std::uint64_t n, const MollifierSpec& spec,
                                const SieveTables& tables) {
  RangeCounts c;
  while (n > 1) {
    const std::uint64_t p = tables.spf(n);
    n /= p;
    if (p <= spec.Y) {
      ++c.below_y;
    } else if (p <= spec.X) {
      ++c.between;
    } else {
      ++c.above_x;
    }
  }
  return c;
}

inline int admit(const RangeCounts& c, const MollifierSpec& spec, SupportKind kind) {
  switch (kind) {
    case SupportKind::full:
      return c.above_x == 0 && c.below_y <= spec.K1 && c.between <= spec.K2;
    case SupportKind::below_y:
      return c.above_x == 0 && c.between == 0 && c.below_y <= spec.K1;
    case SupportKind::between_y_x:
      return c.above_x == 0 && c.below_y == 0 && c.between <= spec.K2;
  }
  return 0;
}

}  // namespace detail

/// a(n), a1(n) or a2(n) depending on `kind`.
inline int mollifier_coeff(std::uint64_t n, const MollifierSpec& spec, SupportKind kind,
                           const SieveTables& tables) {
  if (n < 1 || n > std::min(tables.limit(), spec.supportCap)) {
    throw std::invalid_argument("mollifier_coeff: n=" + std::to_string(n) +
                                " outside [1, min(sieve limit, supportCap)]");
  }
  return detail::admit(detail::count_ranges(n, spec, tables), spec, kind);
}

/// Ascending list of n <= supportCap with coefficient 1.
inline std::vector<std::uint64_t> list_support(const MollifierSpec& spec, SupportKind kind,
                                               const SieveTables& tables) {
  spec.validate();
  if (spec.supportCap > tables.limit()) {
    throw std::invalid_argument("list_support: supportCap " + std::to_string(spec.supportCap) +
                                " exceeds sieve limit " + std::to_string(tables.limit()));
  }
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = 1; n <= spec.supportCap; ++n) {
    if (detail::admit(detail::count_ranges(n, spec, tables), spec, kind)) out.push_back(n);
  }
  return out;
}

inline std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b) {
  while (b != 0) {
    const std::uint64_t r = a % b;
    a = b;
    b = r;
  }
  return a;
}

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

/// Trial-division factorization for moduli that need not be covered by a sieve.
inline std::vector<PrimePower> factorize_trial(std::uint64_t n) {
  std::vector<PrimePower> out;
  for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p != 0) continue;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.push_back({p, e});
  }
  if (n > 1) out.push_back({n, 1});
  return out;
}

inline std::uint64_t euler_phi(std::uint64_t n) {
  std::uint64_t phi = n;
  for (const auto& [p, e] : factorize_trial(n)) phi = phi / p * (p - 1);
  return phi;
}

}  // namespace qclt
