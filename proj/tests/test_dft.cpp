#include <gtest/gtest.h>

#include <random>

#include "qclt/dft.hpp"

using namespace qclt;

namespace {

std::vector<cplx> naive(const std::vector<cplx>& x, int sign) {
  const std::size_t n = x.size();
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc{};
    for (std::size_t j = 0; j < n; ++j) acc += x[j] * detail::unit_root(j * k, n, sign);
    out[k] = acc;
  }
  return out;
}

}  // namespace

TEST(Dft, AllKindsMatchNaive) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t n : {1u, 2u, 3u, 8u, 12u, 16u, 17u, 100u, 256u, 1009u, 5003u}) {
    for (int sign : {-1, 1}) {
      std::vector<cplx> x(n);
      for (auto& v : x) v = {u(rng), u(rng)};
      auto y = x;
      DftPlan(n, sign).execute(y);
      const auto ref = naive(x, sign);
      double err = 0.0;
      for (std::size_t k = 0; k < n; ++k) err = std::max(err, std::abs(y[k] - ref[k]));
      EXPECT_LT(err, 1e-11 * static_cast<double>(n)) << n << " " << sign;
    }
  }
}

TEST(Dft, AxisTransformOnTwoDimensionalArray) {
  // 3 x 4 array, transform along the slow axis (stride 4).
  std::vector<cplx> a(12);
  for (std::size_t i = 0; i < 12; ++i) a[i] = static_cast<double>(i);
  auto b = a;
  DftPlan(3, 1).execute_axis(b, 4);
  for (std::size_t col = 0; col < 4; ++col) {
    std::vector<cplx> line{a[col], a[4 + col], a[8 + col]};
    const auto ref = naive(line, 1);
    for (std::size_t r = 0; r < 3; ++r) EXPECT_NEAR(std::abs(b[r * 4 + col] - ref[r]), 0.0, 1e-12);
  }
}

TEST(Dft, RejectsBadPlans) {
  EXPECT_THROW(DftPlan(0, 1), std::invalid_argument);
  EXPECT_THROW(DftPlan(4, 0), std::invalid_argument);
  std::vector<cplx> wrong(3);
  EXPECT_THROW(DftPlan(4, 1).execute(wrong), std::invalid_argument);
}
