#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qclt/arith.hpp"
#include "qclt/lfunc.hpp"

using namespace qclt;

namespace {

// Values frozen from mpmath at 40 digits (loggamma, gammainc(regularized=True),
// dirichlet(s, chi) via Hurwitz zeta).
struct GammaCase {
  cplx z;
  cplx expect;
};

Character by_generator_value(std::uint64_t q, std::uint64_t g, cplx value) {
  const auto grp = build_group(q);
  for (std::size_t i = 0; i < grp->size(); ++i) {
    if (std::abs(grp->character(i)(g) - value) < 1e-12) return grp->character(i);
  }
  throw std::runtime_error("character not found");
}

cplx direct_sum(const Character& chi, cplx s, std::uint64_t terms) {
  cplx acc{};
  for (std::uint64_t n = terms; n >= 1; --n) {
    acc += chi(n) * std::exp(-s * std::log(static_cast<double>(n)));
  }
  return acc;
}

}  // namespace

TEST(LogGamma, FrozenValues) {
  const GammaCase cases[] = {
      {{0.25, 3.0}, {-4.0672194091374119856, -0.09338431339316938305}},
      {{-2.5, 0.5}, {-0.93508562129827747868, -8.8709628852474591986}},
      {{10.0, 100.0}, {-112.39736554967237893, 374.98942296222949951}},
      {{3.7, -1.2}, {1.2096321530032438427, -1.4270217020402786282}},
      {{0.75, 0.5}, {-0.074102531408119960896, -0.45297189501492411775}},
  };
  for (const auto& c : cases) {
    const cplx v = log_gamma(c.z);
    EXPECT_LE(std::abs(v - c.expect), 1e-12 * std::max(1.0, std::abs(c.expect))) << c.z;
  }
  EXPECT_NEAR(std::abs(log_gamma(cplx{1.0, 0.0})), 0.0, 1e-14);
  EXPECT_NEAR(log_gamma(ComplexPoint{0.5, 0.0}).real(), std::log(std::sqrt(std::numbers::pi)), 1e-14);
  EXPECT_THROW(log_gamma(cplx{0.0, 0.0}), std::domain_error);
  EXPECT_THROW(log_gamma(cplx{-3.0, 0.0}), std::domain_error);
}

TEST(LogGamma, StirlingAsymptote) {
  // |Gamma(sigma+it)| ~ sqrt(2 pi) |t|^{sigma-1/2} e^{-pi|t|/2}
  const double sigma = 2.0;
  const double t = 30.0;
  const double mag = std::exp(log_gamma(cplx{sigma, t}).real());
  const double asym = std::sqrt(2.0 * std::numbers::pi) * std::pow(t, sigma - 0.5) *
                      std::exp(-0.5 * std::numbers::pi * t);
  EXPECT_NEAR(mag / asym, 1.0, 0.01);
}

TEST(LogGamma, RecurrenceProperty) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> re(-20.0, 50.0);
  std::uniform_real_distribution<double> im(-200.0, 200.0);
  for (int i = 0; i < 2000; ++i) {
    const cplx z{re(rng), im(rng)};
    // log Gamma(z+1) - log Gamma(z) = log z modulo 2 pi i
    const cplx d = log_gamma(z + 1.0) - log_gamma(z) - std::log(z);
    const double turns = d.imag() / (2.0 * std::numbers::pi);
    ASSERT_NEAR(d.real(), 0.0, 1e-10);
    ASSERT_NEAR(turns, std::round(turns), 1e-10);
  }
}

TEST(IncompleteGamma, FrozenValues) {
  struct Case {
    cplx z;
    double x;
    cplx expect;
  };
  const Case cases[] = {
      {{0.25, 0.0}, 0.01, {0.65181354723951595216, 0.0}},
      {{0.25, 0.5}, 1.0, {0.023558081401962488985, 0.17063318574190599471}},
      {{0.75, -0.5}, 2.0, {0.062856480490186555981, -0.091735695950517096594}},
      {{0.25, 0.5}, 7.5, {-0.000050479603699824514934, 0.0000615106434122788406}},
      {{-0.75, 0.25}, 0.3, {-0.39532096972109792193, -0.15013651304429584699}},
      {{1.0, 0.0}, 30.0, {9.3576229688401746049e-14, 0.0}},
      {{0.5, 10.0}, 3.0, {16972.946798372770537, -15207.725170949535162}},
  };
  for (const auto& c : cases) {
    const cplx v = gamma_q(c.z, c.x);
    EXPECT_LE(std::abs(v - c.expect), 1e-11 * std::abs(c.expect)) << c.z << " " << c.x;
  }
  EXPECT_EQ(gamma_q({0.3, 0.0}, 0.0), cplx(1.0, 0.0));
  EXPECT_THROW(gamma_q({0.3, 0.0}, -1.0), std::domain_error);
}

TEST(GammaFactor, DefinitionAndParity) {
  const auto g = build_group(4);
  const Character even = g->character(0);
  const cplx G = gamma_factor({0.5, 0.0}, even);
  const double expect = std::pow(std::numbers::pi / 4.0, -0.25) * std::tgamma(0.25);
  EXPECT_NEAR(G.real(), expect, 1e-12 * expect);
  EXPECT_NEAR(G.imag(), 0.0, 1e-14);
  // Even character: exactly the a = 0 formula.
  const cplx s{0.7, 2.0};
  EXPECT_EQ(gamma_factor(ComplexPoint::from(s), even), std::exp(log_gamma_factor(s, 4, 0)));
}

TEST(GammaFactor, ShiftBoundedBySigmaLogQ) {
  // |log G(sigma+it) - log G(1/2+it)| <= C (sigma - 1/2) log q with C <= 2.
  double worst = 0.0;
  for (std::uint64_t q : {3u, 4u, 5u, 11u, 101u, 1009u, 100003u}) {
    for (int a : {0, 1}) {
      for (double t : {0.0, 1.0, 5.0}) {
        for (int k = 1; k <= 10; ++k) {
          const double sigma = 0.5 + 0.5 * k / std::log(static_cast<double>(q));
          const cplx d = log_gamma_factor({sigma, t}, q, a) - log_gamma_factor({0.5, t}, q, a);
          worst = std::max(worst, std::abs(d) / ((sigma - 0.5) * std::log(static_cast<double>(q))));
        }
      }
    }
  }
  EXPECT_LE(worst, 2.0);
}

TEST(LValue, FrozenSmoothedValues) {
  struct Case {
    std::uint64_t q, g;
    cplx gen_value, s, expect;
  };
  const cplx w10 = std::polar(1.0, 2.0 * std::numbers::pi / 10.0);
  const Case cases[] = {
      {5, 2, {0.0, 1.0}, {0.5, 0.0}, {0.76374788011728687822, 0.21696476751886069364}},
      {5, 2, {0.0, 1.0}, {0.5, 1.0}, {0.91232673205752423653, 0.49533672630802811326}},
      {5, 2, {-1.0, 0.0}, {0.5, 0.0}, {0.23175094750401575588, 0.0}},
      {11, 2, w10, {0.5, 0.0}, {1.5033800819831790532, 0.22119976979773830418}},
      {11, 2, w10, {0.9, 2.0}, {1.3138928408683679418, -0.578262058897079217}},
      {11, 2, w10, {-1.0, 0.5}, {0.40521609081026422521, 1.8001020319931007482}},
  };
  for (const auto& c : cases) {
    const Character chi = by_generator_value(c.q, c.g, c.gen_value);
    const LValue v = L_value(ComplexPoint::from(c.s), chi, LMethod::smoothed);
    EXPECT_LE(std::abs(v.value - c.expect), 1e-11 * std::abs(c.expect)) << c.q << " " << c.s;
    EXPECT_LE(v.errEstimate, 1e-8 * std::abs(c.expect));
    EXPECT_EQ(v.method, LMethod::smoothed);
  }
}

TEST(LValue, PiOverFour) {
  const Character chi4 = build_group(4)->character(1);
  const LValue v = L_value({1.0, 0.0}, chi4, LMethod::smoothed);
  EXPECT_NEAR(v.value.real(), std::numbers::pi / 4.0, 1e-10);
  EXPECT_NEAR(v.value.imag(), 0.0, 1e-12);
}

TEST(LValue, TruncatedMatchesDirectAtSigmaTwo) {
  // Truncation at n <= q leaves a tail bounded by sum_{n>q} n^{-2} < 1/q.
  for (std::uint64_t q : {7u, 30u, 101u}) {
    const auto g = build_group(q);
    for (std::size_t i = 0; i < g->size(); i += 3) {
      const Character chi = g->character(i);
      const LValue trunc = L_value({2.0, 0.0}, chi, LMethod::truncated);
      EXPECT_DOUBLE_EQ(trunc.errEstimate, 1.0 / std::sqrt(static_cast<double>(q)));
      const cplx head = direct_sum(chi, {2.0, 0.0}, q);
      EXPECT_NEAR(std::abs(trunc.value - head), 0.0, 1e-13);
      const cplx full = direct_sum(chi, {2.0, 0.0}, 1000000);
      EXPECT_LE(std::abs(trunc.value - full), 1.0 / static_cast<double>(q));
    }
  }
}

TEST(LValue, SmoothedMatchesDirectAtSigmaTwo) {
  for (std::uint64_t q : {7u, 13u, 40u}) {
    const auto g = build_group(q);
    for (std::size_t i = 0; i < g->size(); ++i) {
      const Character chi = g->character(i);
      if (!chi.is_primitive()) continue;
      const cplx full = direct_sum(chi, {2.0, 0.5}, 1000000);
      EXPECT_NEAR(std::abs(L_value({2.0, 0.5}, chi, LMethod::smoothed).value - full), 0.0, 1e-6);
    }
  }
}

TEST(LValue, UnsupportedCases) {
  const auto g = build_group(12);
  EXPECT_THROW(L_value({0.5, 0.0}, g->character(0), LMethod::smoothed), UnsupportedMethod);
  EXPECT_THROW(L_value({0.5, 0.0}, build_group(1)->character(0), LMethod::truncated), UnsupportedMethod);
}

TEST(LValue, SplitInvariance) {
  for (std::uint64_t q : {5u, 101u, 997u}) {
    const auto g = build_group(q);
    for (std::size_t i = 1; i < g->size(); i += std::max<std::size_t>(1, g->size() / 20)) {
      const Character chi = g->character(i);
      for (ComplexPoint s : {ComplexPoint{0.5, 0.0}, ComplexPoint{0.6, 1.5}, ComplexPoint{1.3, -2.0}}) {
        const cplx a = L_value(s, chi, LMethod::smoothed, {1.0}).value;
        const cplx b = L_value(s, chi, LMethod::smoothed, {2.0}).value;
        const cplx c = L_value(s, chi, LMethod::smoothed, {0.5}).value;
        EXPECT_LE(std::abs(a - b), 1e-8 * std::abs(a));
        EXPECT_LE(std::abs(a - c), 1e-8 * std::abs(a));
      }
    }
  }
}

TEST(LValue, SchwarzReflection) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> sig(-1.0, 2.0);
  std::uniform_real_distribution<double> tt(-3.0, 3.0);
  for (std::uint64_t q : {7u, 64u, 211u}) {
    const auto g = build_group(q);
    for (std::size_t i = 0; i < g->size(); ++i) {
      const Character chi = g->character(i);
      if (!chi.is_primitive()) continue;
      const ComplexPoint s{sig(rng), tt(rng)};
      const cplx a = L_value(s, chi, LMethod::smoothed).value;
      const cplx b = L_value({s.sigma, -s.t}, chi.conj(), LMethod::smoothed).value;
      EXPECT_NEAR(std::abs(a), std::abs(b), 1e-9 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST(LValue, EulerProductInAbsoluteConvergence) {
  const auto tables = build_sieve(10000);
  for (std::uint64_t q : {11u, 27u}) {
    const auto g = build_group(q);
    for (std::size_t i = 0; i < g->size(); ++i) {
      const Character chi = g->character(i);
      if (!chi.is_primitive()) continue;
      const cplx s{1.6, 0.7};
      cplx prod = 1.0;
      for (std::uint32_t p : tables.primes()) {
        prod /= 1.0 - chi(p) * std::exp(-s * std::log(static_cast<double>(p)));
      }
      EXPECT_LE(std::abs(L_value(ComplexPoint::from(s), chi, LMethod::smoothed).value - prod), 1e-3);
    }
  }
}

TEST(LValue, TruncatedVersusSmoothedAtSigmaZero) {
  const std::uint64_t q = 997;
  const auto g = build_group(q);
  const double sigma0 = 0.5 + 3.0 / std::log(static_cast<double>(q));
  const auto trunc = batch_L_values({sigma0, 0.0}, *g, LMethod::truncated);
  const auto smooth = batch_L_values({sigma0, 0.0}, *g, LMethod::smoothed);
  std::size_t ok = 0, total = 0;
  for (std::size_t i = 1; i < g->size(); ++i) {
    ++total;
    ok += std::abs(trunc.values[i] - smooth.values[i]) <= 5.0 / std::sqrt(static_cast<double>(q));
  }
  EXPECT_GE(static_cast<double>(ok), 0.95 * static_cast<double>(total));
}

TEST(BatchLValues, AgreeWithSingleEvaluation) {
  for (std::uint64_t q : {9u, 40u, 101u, 120u}) {
    const auto g = build_group(q);
    for (LMethod m : {LMethod::truncated, LMethod::smoothed}) {
      const ComplexPoint s{0.5, 0.3};
      const auto batch = batch_L_values(s, *g, m);
      for (std::size_t i = 0; i < g->size(); ++i) {
        const Character chi = g->character(i);
        if (m == LMethod::smoothed && !chi.is_primitive()) {
          EXPECT_FALSE(batch.available[i]);
          continue;
        }
        ASSERT_TRUE(batch.available[i]);
        EXPECT_NEAR(std::abs(batch.values[i] - L_value(s, chi, m).value), 0.0, 1e-10);
      }
    }
  }
}

TEST(CompletedXi, FunctionalEquation) {
  for (std::uint64_t q : {3u, 5u, 8u, 12u, 101u, 243u}) {
    const auto g = build_group(q);
    for (std::size_t i = 0; i < g->size(); ++i) {
      const Character chi = g->character(i);
      if (!chi.is_primitive()) continue;
      for (double t : {0.0, 1.0}) {
        EXPECT_LE(functional_equation_residual({0.5, t}, chi), 1e-6) << q << " " << i << " " << t;
      }
    }
  }
}

TEST(CompletedXi, RealCharacterCentralValueIsReal) {
  const Character quad = by_generator_value(5, 2, {-1.0, 0.0});
  ASSERT_EQ(quad.parity(), 0);
  EXPECT_NEAR(std::abs(root_number(quad).value - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(completed_xi({0.5, 0.0}, quad).imag(), 0.0, 1e-9);
}

TEST(CompletedXi, ConjugateSymmetry) {
  const auto g = build_group(13);
  const Character chi = g->character(5);
  const double r1 = functional_equation_residual({0.5, 1.0}, chi);
  const double r2 = functional_equation_residual({0.5, -1.0}, chi.conj());
  EXPECT_NEAR(r1, r2, 1e-12);
  EXPECT_NEAR(std::abs(completed_xi({0.5, 1.0}, chi) - std::conj(completed_xi({0.5, -1.0}, chi.conj()))),
              0.0, 1e-10);
}

TEST(RootNumber, UnitModulus) {
  for (std::uint64_t q : {7u, 16u, 45u}) {
    const auto g = build_group(q);
    for (std::size_t i = 0; i < g->size(); ++i) {
      const Character chi = g->character(i);
      if (chi.is_primitive()) EXPECT_NEAR(std::abs(root_number(chi).value), 1.0, 1e-9);
    }
  }
}

TEST(LogAbsL, FloorAndValues) {
  EXPECT_DOUBLE_EQ(*log_abs_L(cplx{1.0, 0.0}, 1e-12), 0.0);
  EXPECT_NEAR(*log_abs_L(cplx{0.0, std::numbers::e}, 1e-12), 1.0, 1e-15);
  EXPECT_FALSE(log_abs_L(cplx{1e-13, 0.0}, 1e-12).has_value());
  EXPECT_THROW(log_abs_L(cplx{1.0, 0.0}, 0.0), std::invalid_argument);
}

TEST(LogAbsL, CentralValuesRarelyVanish) {
  const std::uint64_t q = 10007;
  const auto g = build_group(q);
  const auto vals = batch_L_values({0.5, 0.0}, *g, LMethod::smoothed);
  std::size_t flagged = 0;
  for (std::size_t i = 1; i < g->size(); ++i) flagged += !log_abs_L(vals.values[i], 1e-12).has_value();
  EXPECT_LT(static_cast<double>(flagged), 0.01 * static_cast<double>(g->size() - 1));
}

TEST(Prop1Statistic, DegenerateAndBounded) {
  const std::uint64_t q = 1009;
  const auto g = build_group(q);
  const auto info = group_info(*g);
  const auto fam = family_indices(*g, Family::primitive);
  const auto near = prop1_statistic(*g, info, fam, 0.5 + 1e-6, 0.0, LMethod::smoothed, 1e-12);
  EXPECT_LT(near.statistic, 1e-3);
  EXPECT_TRUE(std::isfinite(near.ratio));
  const double sigma = 0.5 + 5.0 / std::log(static_cast<double>(q));
  const auto r = prop1_statistic(*g, info, fam, sigma, 0.0, LMethod::smoothed, 1e-12);
  EXPECT_LE(r.ratio, 10.0);
  EXPECT_GT(r.sampleSize, 1000u);
  EXPECT_THROW(prop1_statistic(*g, info, fam, 0.5, 0.0, LMethod::smoothed, 1e-12), std::invalid_argument);
  EXPECT_THROW(prop1_statistic(*g, info, {}, 0.7, 0.0, LMethod::smoothed, 1e-12), std::invalid_argument);
}
