#pragma once

// Dirichlet characters mod q. The unit group (Z/qZ)* is split by CRT into
// cyclic components with fixed generators; a character is an exponent vector
// against those generators and its values are exact roots of unity.
//
// Residues and characters share one mixed-radix layout: a residue n maps to
// its discrete-log digits (d_1..d_r), a character to its exponents
// (e_1..e_r), and chi(n) = exp(2 pi i sum_j e_j d_j / ord_j). The first
// component is the most significant digit, so character indices enumerate
// exponent vectors lexicographically.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qclt/arith.hpp"
#include "qclt/coeff_series.hpp"
#include "qclt/dft.hpp"

namespace qclt {

/// exp(2 pi i num / den), kept exact until value() is called.
struct UnitRoot {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static UnitRoot make(std::int64_t num, std::int64_t den) {
    if (den <= 0) throw std::invalid_argument("UnitRoot: denominator must be positive");
    num %= den;
    if (num < 0) num += den;
    const std::int64_t g = std::gcd(num, den);
    return g == 0 ? UnitRoot{0, 1} : UnitRoot{num / g, den / g};
  }

  cplx value() const { return detail::unit_root(static_cast<std::uint64_t>(num), den, 1); }

  UnitRoot operator*(const UnitRoot& o) const {
    const std::int64_t l = std::lcm(den, o.den);
    return make(num * (l / den) + o.num * (l / o.den), l);
  }
  UnitRoot conj() const { return make(-num, den); }

  friend bool operator==(const UnitRoot&, const UnitRoot&) = default;
};

/// One cyclic factor of (Z/qZ)*.
struct GroupComponent {
  std::uint64_t prime;
  int exponent;             // of the prime in q
  std::uint64_t modulus;    // prime^exponent
  std::uint64_t generator;  // residue mod `modulus`
  std::uint64_t order;
};

class Character;

class CharacterGroup : public std::enable_shared_from_this<CharacterGroup> {
  struct Private {};

 public:
  CharacterGroup(Private, std::uint64_t q) : q_(q) { build(); }

  static std::shared_ptr<const CharacterGroup> create(std::uint64_t q) {
    if (q == 0) throw std::invalid_argument("build_group: modulus must be >= 1");
    return std::make_shared<const CharacterGroup>(Private{}, q);
  }

  std::uint64_t modulus() const { return q_; }
  std::uint64_t phi() const { return phi_; }
  /// Number of characters (= phi).
  std::size_t size() const { return static_cast<std::size_t>(phi_); }
  /// Exponent of the group: lcm of component orders.
  std::uint64_t exponent() const { return exponent_; }
  const std::vector<GroupComponent>& components() const { return components_; }
  const std::vector<std::size_t>& strides() const { return strides_; }

  /// Flat discrete-log index of n mod q, or nullopt when gcd(n, q) > 1.
  std::optional<std::size_t> dlog_index(std::uint64_t n) const {
    const std::int64_t d = dlog_[n % q_];
    if (d < 0) return std::nullopt;
    return static_cast<std::size_t>(d);
  }

  std::vector<std::uint64_t> digits(std::size_t flat) const {
    std::vector<std::uint64_t> out(components_.size());
    for (std::size_t j = 0; j < components_.size(); ++j) {
      out[j] = (flat / strides_[j]) % components_[j].order;
    }
    return out;
  }

  std::size_t flatten(std::span<const std::uint64_t> digits) const {
    std::size_t flat = 0;
    for (std::size_t j = 0; j < components_.size(); ++j) {
      flat += static_cast<std::size_t>(digits[j] % components_[j].order) * strides_[j];
    }
    return flat;
  }

  /// Numerator over exponent() of chi_index(residue with flat dlog d).
  std::uint64_t pairing(std::size_t chi_index, std::size_t d) const {
    std::uint64_t num = 0;
    for (std::size_t j = 0; j < components_.size(); ++j) {
      const std::uint64_t e = (chi_index / strides_[j]) % components_[j].order;
      const std::uint64_t dj = (d / strides_[j]) % components_[j].order;
      num = (num + mulmod(mulmod(e, dj, exponent_), exponent_ / components_[j].order, exponent_)) %
            exponent_;
    }
    return num;
  }

  /// exp(2 pi i k / exponent()).
  cplx root(std::uint64_t k) const { return roots_[k % exponent_]; }

  Character character(std::size_t index) const;
  std::size_t conj_index(std::size_t index) const {
    std::size_t out = 0;
    for (std::size_t j = 0; j < components_.size(); ++j) {
      const std::uint64_t ord = components_[j].order;
      const std::uint64_t e = (index / strides_[j]) % ord;
      out += static_cast<std::size_t>((ord - e) % ord) * strides_[j];
    }
    return out;
  }

  /// F[chi] = sum_d buckets[d] chi(residue d), with buckets laid out by flat dlog index.
  std::vector<cplx> transform(std::vector<cplx> buckets) const {
    if (buckets.size() != size()) throw std::invalid_argument("transform: bucket count != phi(q)");
    for (std::size_t j = 0; j < components_.size(); ++j) {
      plans_[j].execute_axis(buckets, strides_[j]);
    }
    return buckets;
  }

 private:
  void build();

  std::uint64_t q_;
  std::uint64_t phi_ = 1;
  std::uint64_t exponent_ = 1;
  std::vector<GroupComponent> components_;
  std::vector<std::size_t> strides_;
  std::vector<std::int64_t> dlog_;
  std::vector<cplx> roots_;
  std::vector<DftPlan> plans_;
};

inline std::shared_ptr<const CharacterGroup> build_group(std::uint64_t q) {
  return CharacterGroup::create(q);
}

class Character {
 public:
  Character(std::shared_ptr<const CharacterGroup> group, std::size_t index)
      : group_(std::move(group)), index_(index) {
    if (!group_) throw std::invalid_argument("Character: null group");
    if (index_ >= group_->size()) throw std::invalid_argument("Character: index out of range");
    expo_ = group_->digits(index_);
    const auto minus_one = evaluate_exact(group_->modulus() - 1 + (group_->modulus() == 1));
    parity_ = (minus_one && minus_one->num != 0) ? 1 : 0;
  }

  const CharacterGroup& group() const { return *group_; }
  std::shared_ptr<const CharacterGroup> group_ptr() const { return group_; }
  std::size_t index() const { return index_; }
  std::uint64_t modulus() const { return group_->modulus(); }
  const std::vector<std::uint64_t>& expo() const { return expo_; }
  /// a(chi): 0 if chi(-1) = 1, 1 if chi(-1) = -1.
  int parity() const { return parity_; }
  bool is_principal() const { return index_ == 0; }

  std::optional<UnitRoot> evaluate_exact(std::uint64_t n) const {
    const auto d = group_->dlog_index(n);
    if (!d) return std::nullopt;
    return UnitRoot::make(static_cast<std::int64_t>(group_->pairing(index_, *d)),
                          static_cast<std::int64_t>(group_->exponent()));
  }

  cplx evaluate(std::uint64_t n) const {
    const auto d = group_->dlog_index(n);
    if (!d) return {0.0, 0.0};
    return group_->root(group_->pairing(index_, *d));
  }
  cplx operator()(std::uint64_t n) const { return evaluate(n); }

  Character conj() const { return Character(group_, group_->conj_index(index_)); }

  /// Smallest f | q such that chi is induced from a character mod f.
  std::uint64_t conductor() const {
    std::uint64_t f = 1;
    const auto& comps = group_->components();
    for (std::size_t j = 0; j < comps.size(); ++j) {
      const GroupComponent& c = comps[j];
      const std::uint64_t ord = c.order;
      const std::uint64_t e = expo_[j];
      if (e == 0) continue;
      const std::uint64_t char_order = ord / std::gcd(e, ord);
      if (c.prime != 2) {
        // chi is trivial on {x = 1 mod p^k} iff its order divides (p-1) p^(k-1).
        std::uint64_t k = 1;
        std::uint64_t level = c.prime - 1;
        while (level % char_order != 0) {
          level *= c.prime;
          ++k;
        }
        for (std::uint64_t i = 0; i < k; ++i) f *= c.prime;
      } else if (c.generator == 5 % c.modulus && c.exponent >= 3) {
        // The <5> factor of (Z/2^e)*: a character of order 2^m has conductor 2^(m+2).
        std::uint64_t m = 0;
        while ((std::uint64_t{1} << m) < char_order) ++m;
        f = f / two_part(f) * (std::uint64_t{1} << (m + 2));
      } else {
        // The <-1> factor: conductor 4 unless the <5> part already forces more.
        if (two_part(f) < 4) f = f / two_part(f) * 4;
      }
    }
    return f;
  }

  bool is_primitive() const { return conductor() == group_->modulus(); }

 private:
  static std::uint64_t two_part(std::uint64_t f) { return f & (~f + 1); }

  std::shared_ptr<const CharacterGroup> group_;
  std::size_t index_;
  std::vector<std::uint64_t> expo_;
  int parity_ = 0;
};

inline Character CharacterGroup::character(std::size_t index) const {
  return Character(shared_from_this(), index);
}

namespace detail {

inline std::uint64_t primitive_root_mod_prime(std::uint64_t p) {
  if (p == 2) return 1;
  const auto factors = factorize_trial(p - 1);
  for (std::uint64_t g = 2; g < p; ++g) {
    bool ok = true;
    for (const auto& [r, e] : factors) {
      if (powmod(g, (p - 1) / r, p) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) return g;
  }
  throw std::logic_error("no primitive root found");
}

}  // namespace detail

inline void CharacterGroup::build() {
  // Local discrete-log tables per prime power, each with its own mixed radix.
  struct Local {
    std::uint64_t modulus;
    std::size_t first_component;
    std::size_t count;
    std::vector<std::int64_t> flat;  // residue mod modulus -> local flat index
  };
  std::vector<Local> locals;

  for (const auto& [p, e] : factorize_trial(q_)) {
    std::uint64_t pe = 1;
    for (int i = 0; i < e; ++i) pe *= p;
    Local local{pe, components_.size(), 0, std::vector<std::int64_t>(pe, -1)};
    if (p != 2) {
      std::uint64_t g = detail::primitive_root_mod_prime(p);
      if (e >= 2 && powmod(g, p - 1, p * p) == 1) g += p;
      const std::uint64_t ord = pe / p * (p - 1);
      components_.push_back({p, e, pe, g, ord});
      local.count = 1;
      std::uint64_t x = 1;
      for (std::uint64_t k = 0; k < ord; ++k) {
        local.flat[x] = static_cast<std::int64_t>(k);
        x = mulmod(x, g, pe);
      }
    } else if (e == 1) {
      local.flat[1] = 0;
    } else if (e == 2) {
      components_.push_back({2, 2, 4, 3, 2});
      local.count = 1;
      local.flat[1] = 0;
      local.flat[3] = 1;
    } else {
      const std::uint64_t ord5 = pe / 4;
      components_.push_back({2, e, pe, pe - 1, 2});
      components_.push_back({2, e, pe, 5, ord5});
      local.count = 2;
      std::uint64_t x = 1;
      for (std::uint64_t b = 0; b < ord5; ++b) {
        local.flat[x] = static_cast<std::int64_t>(b);
        local.flat[pe - x] = static_cast<std::int64_t>(ord5 + b);
        x = mulmod(x, 5, pe);
      }
    }
    locals.push_back(std::move(local));
  }

  strides_.assign(components_.size(), 1);
  for (std::size_t j = components_.size(); j-- > 1;) {
    strides_[j - 1] = strides_[j] * components_[j].order;
  }
  phi_ = 1;
  exponent_ = 1;
  for (const auto& c : components_) {
    phi_ *= c.order;
    exponent_ = std::lcm(exponent_, c.order);
  }

  dlog_.assign(q_, -1);
  for (std::uint64_t n = 0; n < q_; ++n) {
    std::size_t flat = 0;
    bool unit = true;
    for (const Local& local : locals) {
      const std::int64_t lf = local.flat[n % local.modulus];
      if (lf < 0) {
        unit = false;
        break;
      }
      // Local flat index is mixed radix over its own components, same order.
      std::uint64_t rest = static_cast<std::uint64_t>(lf);
      for (std::size_t k = local.count; k-- > 0;) {
        const std::size_t j = local.first_component + k;
        flat += static_cast<std::size_t>(rest % components_[j].order) * strides_[j];
        rest /= components_[j].order;
      }
    }
    if (q_ == 1 || unit) dlog_[n] = static_cast<std::int64_t>(flat);
  }

  roots_.resize(exponent_);
  for (std::uint64_t k = 0; k < exponent_; ++k) roots_[k] = detail::unit_root(k, exponent_, 1);

  for (const auto& c : components_) plans_.emplace_back(c.order, +1);
}

enum class Family { all, primitive };

/// Character indices in enumeration order, filtered by family.
inline std::vector<std::size_t> family_indices(const CharacterGroup& group, Family family) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < group.size(); ++i) {
    if (family == Family::all || group.character(i).is_primitive()) out.push_back(i);
  }
  return out;
}

inline cplx evaluate(const Character& chi, std::uint64_t n) { return chi.evaluate(n); }
inline std::optional<UnitRoot> evaluate_exact(const Character& chi, std::uint64_t n) {
  return chi.evaluate_exact(n);
}
inline std::uint64_t conductor(const Character& chi) { return chi.conductor(); }
inline bool is_primitive(const Character& chi) { return chi.is_primitive(); }

/// tau(chi) = sum_{x mod q} chi(x) e(x/q). Terms are accumulated as exact
/// roots of unity of order lcm(exponent, q); each distinct root is rounded once.
inline cplx gauss_sum(const Character& chi) {
  const CharacterGroup& g = chi.group();
  const std::uint64_t q = g.modulus();
  const std::uint64_t E = g.exponent();
  const std::uint64_t L = std::lcm(E, q);
  std::map<std::uint64_t, std::int64_t> counts;
  for (std::uint64_t x = 0; x < q; ++x) {
    const auto d = g.dlog_index(x);
    if (!d) continue;
    const std::uint64_t k =
        (mulmod(g.pairing(chi.index(), *d), L / E, L) + mulmod(x, L / q, L)) % L;
    ++counts[k];
  }
  cplx acc{};
  for (const auto& [k, c] : counts) acc += static_cast<double>(c) * detail::unit_root(k, L, 1);
  return acc;
}

/// For every character chi of `group`, sum_n coeffs(n) chi(n). Coefficients are
/// bucketed into unit residue classes mod q and pushed through one DFT per
/// cyclic component. Result is indexed by character index.
inline std::vector<cplx> batch_twisted_sums(const CoeffSeries& coeffs, const CharacterGroup& group) {
  if (group.size() == 0) throw std::invalid_argument("batch_twisted_sums: empty group");
  std::vector<cplx> buckets(group.size(), cplx{});
  for (const auto& [n, c] : coeffs) {
    const auto d = group.dlog_index(n);
    if (d) buckets[*d] += c;
  }
  return group.transform(std::move(buckets));
}

/// Same as above for a dense coefficient array: coeffs[i] multiplies chi(i + 1).
inline std::vector<cplx> batch_twisted_sums(std::span<const cplx> coeffs, const CharacterGroup& group) {
  if (group.size() == 0) throw std::invalid_argument("batch_twisted_sums: empty group");
  std::vector<cplx> buckets(group.size(), cplx{});
  const std::uint64_t q = group.modulus();
  std::uint64_t r = 1 % q;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const auto d = group.dlog_index(r);
    if (d) buckets[*d] += coeffs[i];
    if (++r == q) r = 0;
  }
  return group.transform(std::move(buckets));
}

/// All Gauss sums at once, indexed by character.
inline std::vector<cplx> batch_gauss_sums(const CharacterGroup& group) {
  const std::uint64_t q = group.modulus();
  std::vector<cplx> coeffs(q);
  for (std::uint64_t x = 1; x <= q; ++x) coeffs[x - 1] = detail::unit_root(x, q, 1);
  return batch_twisted_sums(std::span<const cplx>(coeffs), group);
}

}  // namespace qclt
