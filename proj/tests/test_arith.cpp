#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "qclt/arith.hpp"

using namespace qclt;

namespace {

bool trial_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

}  // namespace

TEST(Sieve, SmallValues) {
  const auto t = build_sieve(10);
  EXPECT_EQ(t.spf(9), 3u);
  EXPECT_EQ(t.spf(7), 7u);
  EXPECT_TRUE(t.is_prime(7));
  EXPECT_FALSE(t.is_prime(1));
}

TEST(Sieve, PrimeCountMatchesTrialDivision) {
  const auto t = build_sieve(100);
  std::size_t count = 0;
  for (std::uint64_t n = 2; n <= 100; ++n) count += trial_prime(n);
  EXPECT_EQ(count, 25u);
  EXPECT_EQ(t.primes().size(), count);
}

TEST(Sieve, Invariants) {
  const auto t = build_sieve(20000);
  std::size_t pi = 0;
  for (std::uint64_t n = 2; n <= t.limit(); ++n) {
    const auto p = t.spf(n);
    ASSERT_TRUE(trial_prime(p)) << n;
    ASSERT_EQ(n % p, 0u);
    ASSERT_EQ(p == n, trial_prime(n));
    if (p == n) {
      ASSERT_EQ(t.primes()[pi], n);
      ++pi;
    }
  }
  EXPECT_EQ(pi, t.primes().size());
}

TEST(Sieve, RejectsTinyLimit) {
  EXPECT_THROW(build_sieve(1), std::invalid_argument);
  EXPECT_THROW(build_sieve(0), std::invalid_argument);
}

TEST(Mangoldt, Values) {
  const auto t = build_sieve(100);
  EXPECT_DOUBLE_EQ(mangoldt(8, t), std::log(2.0));
  EXPECT_DOUBLE_EQ(mangoldt(6, t), 0.0);
  EXPECT_DOUBLE_EQ(mangoldt(7, t), std::log(7.0));
  EXPECT_DOUBLE_EQ(mangoldt(1, t), 0.0);
  EXPECT_THROW(mangoldt(101, t), std::invalid_argument);
  EXPECT_THROW(mangoldt(0, t), std::invalid_argument);
}

TEST(Mangoldt, ChebyshevSanity) {
  const std::uint64_t N = 1000000;
  const auto t = build_sieve(N);
  double psi = 0.0;
  for (std::uint64_t n = 1; n <= N; ++n) psi += mangoldt(n, t);
  EXPECT_NEAR(psi / static_cast<double>(N), 1.0, 0.15);
}

TEST(Moebius, Values) {
  const auto t = build_sieve(100);
  EXPECT_EQ(moebius(1, t), 1);
  EXPECT_EQ(moebius(12, t), 0);
  EXPECT_EQ(moebius(30, t), -1);
  EXPECT_EQ(moebius(6, t), 1);
  EXPECT_THROW(moebius(0, t), std::invalid_argument);
}

TEST(Moebius, SumOverDivisorsIsDelta) {
  const auto t = build_sieve(3000);
  for (std::uint64_t n = 1; n <= 3000; ++n) {
    int s = 0;
    for (std::uint64_t d = 1; d <= n; ++d) {
      if (n % d == 0) s += moebius(d, t);
    }
    ASSERT_EQ(s, n == 1 ? 1 : 0) << n;
  }
}

TEST(MollifierCoeff, DefinitionExamples) {
  const auto t = build_sieve(1000);
  MollifierSpec spec{100, 10, 4, 2, 1000};
  EXPECT_EQ(mollifier_coeff(1, spec, SupportKind::full, t), 1);
  EXPECT_EQ(mollifier_coeff(1, spec, SupportKind::below_y, t), 1);
  EXPECT_EQ(mollifier_coeff(1, spec, SupportKind::between_y_x, t), 1);
  EXPECT_EQ(mollifier_coeff(30, spec, SupportKind::full, t), 1);
  EXPECT_EQ(mollifier_coeff(101, spec, SupportKind::full, t), 0);
  EXPECT_EQ(mollifier_coeff(2 * 101, spec, SupportKind::full, t), 0);
  // Counts are with multiplicity: 2^5 has five factors below Y > K1 = 4.
  EXPECT_EQ(mollifier_coeff(32, spec, SupportKind::full, t), 0);
  EXPECT_EQ(mollifier_coeff(16, spec, SupportKind::full, t), 1);
  // 11 * 13 * 17 has three factors in (Y, X] > K2 = 2.
  EXPECT_EQ(mollifier_coeff(11 * 13, spec, SupportKind::between_y_x, t), 1);
  EXPECT_EQ(mollifier_coeff(11 * 13, spec, SupportKind::below_y, t), 0);
  EXPECT_THROW(mollifier_coeff(0, spec, SupportKind::full, t), std::invalid_argument);
  EXPECT_THROW(mollifier_coeff(1001, spec, SupportKind::full, t), std::invalid_argument);
}

TEST(ListSupport, Examples) {
  const auto t = build_sieve(100);
  EXPECT_EQ(list_support({3, 3, 1, 1, 10}, SupportKind::below_y, t),
            (std::vector<std::uint64_t>{1, 2, 3}));
  EXPECT_EQ(list_support({3, 3, 1, 1, 1}, SupportKind::full, t), (std::vector<std::uint64_t>{1}));
  EXPECT_EQ(list_support({12, 10, 1, 1, 12}, SupportKind::between_y_x, t),
            (std::vector<std::uint64_t>{1, 11}));
  EXPECT_THROW(list_support({12, 10, 1, 1, 101}, SupportKind::full, t), std::invalid_argument);
  EXPECT_THROW(list_support({5, 10, 1, 1, 10}, SupportKind::full, t), std::invalid_argument);
}

TEST(ListSupport, AgreesWithCoeffAndIsAscending) {
  const auto t = build_sieve(5000);
  const MollifierSpec spec{60, 12, 3, 2, 5000};
  for (auto kind : {SupportKind::full, SupportKind::below_y, SupportKind::between_y_x}) {
    const auto support = list_support(spec, kind, t);
    ASSERT_TRUE(std::is_sorted(support.begin(), support.end()));
    std::size_t j = 0;
    for (std::uint64_t n = 1; n <= spec.supportCap; ++n) {
      const bool in = j < support.size() && support[j] == n;
      ASSERT_EQ(in, mollifier_coeff(n, spec, kind, t) == 1) << n;
      if (in) ++j;
    }
  }
}

TEST(MollifierCoeff, SupportSplitsMultiplicatively) {
  const std::uint64_t N = 100000;
  const auto t = build_sieve(N);
  const MollifierSpec spec{200, 15, 5, 2, N};
  for (std::uint64_t n = 1; n <= N; ++n) {
    std::uint64_t small = 1;
    std::uint64_t rest = n;
    for (const auto& [p, e] : t.factorize(n)) {
      if (p > spec.Y) continue;
      for (int i = 0; i < e; ++i) small *= p;
    }
    rest = n / small;
    const int split = mollifier_coeff(small, spec, SupportKind::below_y, t) *
                      mollifier_coeff(rest, spec, SupportKind::between_y_x, t);
    ASSERT_EQ(mollifier_coeff(n, spec, SupportKind::full, t), split) << n;
  }
}

TEST(MollifierCoeff, SquarefreeSupportMultiplicativeOnCoprimes) {
  const auto t = build_sieve(4000);
  const MollifierSpec spec{40, 8, 2, 1, 4000};
  auto f = [&](std::uint64_t n) {
    const int mu = moebius(n, t);
    return mu * mu * mollifier_coeff(n, spec, SupportKind::full, t);
  };
  // Multiplicativity of mu^2 a holds on coprime pairs whose factor counts stay
  // inside the caps, i.e. within the support.
  for (std::uint64_t m = 1; m <= 60; ++m) {
    for (std::uint64_t n = 1; n <= 60; ++n) {
      if (std::gcd(m, n) != 1) continue;
      if (f(m * n) == 1) {
        ASSERT_EQ(f(m), 1);
        ASSERT_EQ(f(n), 1);
      }
      if (f(m) == 1 && f(n) == 1 && mollifier_coeff(m * n, spec, SupportKind::full, t) == 1) {
        ASSERT_EQ(f(m * n), 1);
      }
    }
  }
}

TEST(Arith, PhiAndPowmod) {
  EXPECT_EQ(euler_phi(45), 24u);
  EXPECT_EQ(euler_phi(1), 1u);
  EXPECT_EQ(euler_phi(100003), 100002u);
  EXPECT_EQ(powmod(3, 4, 5), 1u);
}
