#include <gtest/gtest.h>

#include <cmath>

#include "frechet/differential.hpp"
#include "frechet/oracle.hpp"
#include "frechet/random.hpp"
#include "test_support.hpp"

using namespace frechet;
using frechet::testing::diag;
using frechet::testing::mat2;
using frechet::testing::max_abs_diff;

namespace {

const Matrix<Real> kNil = mat2(0, 1, 0, 0);
const Matrix<Real> kNilT = mat2(0, 0, 1, 0);

}  // namespace

TEST(FiniteDifference, LinearIsExact) {
  Rng rng(31);
  const auto id = series_from_coefficients<Real>({0, 1}, kInfinity);
  const auto t = random_matrix<Real>(3, rng);
  const auto h = random_matrix<Real>(3, rng);
  for (double delta : {1e-2, 1e-5}) {
    EXPECT_LE(max_abs_diff(fd_differential(id, t, h, delta, TruncationPolicy{}), h), 1e-10);
  }
}

TEST(FiniteDifference, QuadraticIsExactUpToRounding) {
  Rng rng(32);
  const auto sq = series_from_coefficients<Real>({0, 0, 1}, kInfinity);
  const auto t = random_matrix<Real>(3, rng);
  const auto h = random_matrix<Real>(3, rng);
  const auto fd = fd_differential(sq, t, h, 1e-5, TruncationPolicy{});
  EXPECT_LE(max_abs_diff(fd, h * t + t * h), 1e-10);
}

TEST(FiniteDifference, ExpMatchesDirect) {
  Rng rng(33);
  const auto ex = builtin_series<Real>("exp");
  const auto t = random_matrix<Real>(3, rng);
  const auto h = random_matrix<Real>(3, rng);
  const auto fd = fd_differential(ex, t, h, kDefaultFiniteDifferenceStep, TruncationPolicy{});
  EXPECT_LE(relative_difference(frechet_direct(ex, t, h, TruncationPolicy{}).value, fd), 1e-6);
}

TEST(FiniteDifference, Errors) {
  const auto geo = builtin_series<Real>("geometric");
  EXPECT_THROW(fd_differential(geo, kNil, kNilT, 0.0, TruncationPolicy{}), Error);
  try {
    fd_differential(geo, diag<Real>({0.7, 0.0}), mat2(1, 0, 0, 0), 0.5, TruncationPolicy{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::outside_radius);
  }
}

TEST(BlockTriangular, ZeroDirection) {
  Rng rng(34);
  const auto t = random_matrix<Real>(3, rng);
  EXPECT_TRUE(block_triangular_differential(builtin_series<Real>("exp"), t, Matrix<Real>::zero(3),
                                            TruncationPolicy{})
                  .is_zero());
}

TEST(BlockTriangular, Square) {
  Rng rng(35);
  const auto sq = series_from_coefficients<Real>({0, 0, 1}, kInfinity);
  const auto t = random_matrix<Real>(3, rng);
  const auto h = random_matrix<Real>(3, rng);
  EXPECT_LE(relative_difference(block_triangular_differential(sq, t, h, TruncationPolicy{}),
                                t * h + h * t),
            1e-14);
}

TEST(BlockTriangular, ExpNilpotentVectorAgreesWithFiniteDifference) {
  const auto ex = builtin_series<Real>("exp");
  const auto block = block_triangular_differential(ex, kNil, kNilT, TruncationPolicy{});
  const auto fd = fd_differential(ex, kNil, kNilT, 1e-5, TruncationPolicy{});
  EXPECT_LE(max_abs_diff(block, fd), 1e-9);
  EXPECT_LE(max_abs_diff(block, mat2(0.5, 1.0 / 6.0, 1.0, 0.5)), 1e-14);
}

TEST(BlockTriangular, RejectsLargeT) {
  const auto geo = builtin_series<Real>("geometric");
  try {
    block_triangular_differential(geo, diag<Real>({0.8, 0.0}), kNilT, TruncationPolicy{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::outside_radius);
  }
}

TEST(Resolvent, Examples) {
  Rng rng(36);
  const auto h = random_matrix<Real>(3, rng);
  EXPECT_LE(max_abs_diff(resolvent_differential(Matrix<Real>::zero(3), h), h), 1e-15);
  EXPECT_LE(max_abs_diff(resolvent_differential(diag<Real>({0.5, 0.5}), Matrix<Real>::identity(2)),
                         Matrix<Real>::identity(2) * 4.0),
            1e-14);
  try {
    resolvent_differential(Matrix<Real>::identity(2), Matrix<Real>::identity(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::singular);
  }
}

TEST(Resolvent, MatchesPowerCommutantAndBlock) {
  Rng rng(37);
  const auto geo = builtin_series<Real>("geometric");
  for (int trial = 0; trial < 10; ++trial) {
    const auto t = random_matrix_with_norm<Real>(3, 0.4, rng);
    const auto h = random_matrix<Real>(3, rng);
    const auto oracle = resolvent_differential(t, h);
    EXPECT_LE(relative_difference(frechet_power_commutant(geo, t, h, TruncationPolicy{}).value, oracle),
              1e-9);
    EXPECT_LE(relative_difference(block_triangular_differential(geo, t, h, TruncationPolicy{}), oracle),
              1e-9);
  }
}

TEST(PolynomialOracle, Examples) {
  Rng rng(38);
  const auto t = random_matrix<Real>(2, rng);
  const auto h = random_matrix<Real>(2, rng);
  EXPECT_EQ(polynomial_differential<Real>({0, 1}, t, h), h);
  EXPECT_LE(max_abs_diff(polynomial_differential<Real>({0, 0, 1}, t, h), h * t + t * h), 1e-15);
  const std::vector<Real> coeffs = {1, 2, 0, 5};
  const auto g = series_from_coefficients<Real>(coeffs, kInfinity);
  EXPECT_LE(max_abs_diff(polynomial_differential(coeffs, t, h), frechet_direct(g, t, h, TruncationPolicy{}).value),
            1e-14);
}

TEST(PolynomialOracle, LinearInCoefficientsAndDirection) {
  Rng rng(39);
  const auto t = random_matrix<Complex>(3, rng);
  const auto h1 = random_matrix<Complex>(3, rng);
  const auto h2 = random_matrix<Complex>(3, rng);
  const std::vector<Complex> a = {0, 1, Complex(0, 2), -1};
  const std::vector<Complex> b = {3, 0, 1, Complex(0.5, 0.5)};
  std::vector<Complex> ab(4);
  for (std::size_t i = 0; i < 4; ++i) ab[i] = a[i] + b[i];
  EXPECT_LE(relative_difference(polynomial_differential(ab, t, h1),
                                polynomial_differential(a, t, h1) + polynomial_differential(b, t, h1)),
            1e-14);
  EXPECT_LE(relative_difference(polynomial_differential(a, t, h1 + h2),
                                polynomial_differential(a, t, h1) + polynomial_differential(a, t, h2)),
            1e-14);
}

TEST(FiniteDifference, SecondOrderConvergence) {
  Rng rng(40);
  const auto ex = builtin_series<Real>("exp");
  const auto t = random_matrix_with_norm<Real>(3, 0.5, rng);
  const auto h = random_matrix<Real>(3, rng);
  const auto ref = block_triangular_differential(ex, t, h, TruncationPolicy{});
  std::vector<double> xs, ys;
  for (double delta : {1e-2, 1e-3, 1e-4}) {
    xs.push_back(std::log10(delta));
    ys.push_back(std::log10(algebra_norm(fd_differential(ex, t, h, delta, TruncationPolicy{}) - ref)));
  }
  const double mx = (xs[0] + xs[1] + xs[2]) / 3, my = (ys[0] + ys[1] + ys[2]) / 3;
  double num = 0, den = 0;
  for (int i = 0; i < 3; ++i) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) * (xs[i] - mx);
  }
  EXPECT_GE(num / den, 1.9);
}
