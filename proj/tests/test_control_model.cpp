#include <gtest/gtest.h>

#include <random>

#include "sc3/control_model.hpp"

using namespace sc3;

namespace {
constexpr double kInfinity = std::numeric_limits<double>::infinity();
}

TEST(IntrinsicEntropy, Scalar) { EXPECT_DOUBLE_EQ(intrinsic_entropy(Eigen::MatrixXd::Constant(1, 1, 2.0)), 1.0); }

TEST(IntrinsicEntropy, DiagonalWithNegativeEntry) {
  EXPECT_NEAR(intrinsic_entropy(Eigen::Vector2d(2.0, -4.0).asDiagonal().toDenseMatrix()), 3.0, 1e-12);
}

TEST(IntrinsicEntropy, LargeDiagonal) {
  const Eigen::MatrixXd A = Eigen::VectorXd::Constant(50, 10.0).asDiagonal();
  EXPECT_NEAR(intrinsic_entropy(A), 50 * std::log2(10.0), 1e-9);
  EXPECT_NEAR(intrinsic_entropy(A), 166.096, 1e-3);
}

TEST(IntrinsicEntropy, SingularAndNonSquare) {
  try {
    intrinsic_entropy(Eigen::Vector2d(1.0, 0.0).asDiagonal().toDenseMatrix());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularStateMatrix);
  }
  EXPECT_THROW(intrinsic_entropy(Eigen::MatrixXd::Ones(2, 3)), Error);
}

TEST(MinEntropy, Examples) {
  EXPECT_NEAR(min_entropy(1.5, {1, 1.0, 0.5, 1.0}), 1.5, 1e-12);
  EXPECT_NEAR(min_entropy(2.0, {2, 3.0, 1.0, 4.0}), 3.0 + std::log2(5.0), 1e-12);
  EXPECT_NEAR(min_entropy(2.0, {2, 3.0, 1.0, 4.0}), 5.3219, 1e-4);
  EXPECT_DOUBLE_EQ(min_entropy(kInfinity, {1, 1.0, 0.5, 1.0}), 1.0);
}

TEST(MinEntropy, DecreasingAndFloor) {
  const EntropyParams p{3, 4.0, 2.0, 1.5};
  double prev = kInfinity;
  for (double l = 2.001; l < 1e6; l *= 1.7) {
    const double e = min_entropy(l, p);
    EXPECT_LT(e, prev);
    EXPECT_GT(e, p.h);
    prev = e;
  }
  try {
    min_entropy(2.0, p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CostBelowFloor);
  }
}

TEST(LqrFromEntropy, Examples) {
  const EntropyParams p{1, 1.0, 0.5, 1.0};
  EXPECT_NEAR(lqr_from_entropy(1.5, p), 1.5, 1e-12);
  EXPECT_NEAR(lqr_from_entropy(1e4, p), 0.5, 1e-12);
  const double eps = 1e-6;
  const double direct = 1.0 / (std::exp2(2 * eps) - 1.0);
  EXPECT_NEAR(lqr_from_entropy(1.0 + eps, p), 0.5 + direct, 1e-6 * direct);
  EXPECT_NEAR(lqr_from_entropy(1.0 + eps, p) - 0.5, 7.213e5, 1e2);
}

TEST(LqrFromEntropy, AtOrBelowIntrinsicRateIsUnstabilizable) {
  const EntropyParams p{1, 1.0, 0.5, 1.0};
  for (double e : {1.0, 0.5, 0.0}) {
    try {
      lqr_from_entropy(e, p);
      FAIL();
    } catch (const Error& err) {
      EXPECT_EQ(err.code(), ErrorCode::Unstabilizable);
    }
  }
}

TEST(LqrFromEntropy, RoundTripRandom) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    EntropyParams p{1 + static_cast<int>(u(rng) * 60), u(rng) * 200, u(rng) * 10, 0.01 + u(rng) * 100};
    const double l = p.l_min + std::pow(10.0, -3 + 7 * u(rng));
    const double e = min_entropy(l, p);
    EXPECT_NEAR(lqr_from_entropy(e, p), l, 1e-9 * l);
  }
}

TEST(BuildEntropyParams, ScalarPlant) {
  const auto spec = LoopControlSpec::diagonal(Eigen::VectorXd::Constant(1, 2.0), 0.01, 0.0);
  EXPECT_NEAR(detail::solve_dare(spec)(0, 0), 1.0, 1e-10);
  const auto p = build_entropy_params(spec);
  EXPECT_EQ(p.n, 1);
  EXPECT_DOUBLE_EQ(p.h, 1.0);
  EXPECT_NEAR(p.l_min, 0.01, 1e-12);  // no sensing noise, so only the process-noise term remains
  EXPECT_GT(p.c, 0.0);
}

TEST(BuildEntropyParams, DiagonalEntropyIsSumOfLogs) {
  Eigen::VectorXd a(3);
  a << 1.5, -3.0, 7.0;
  const auto p = build_entropy_params(LoopControlSpec::diagonal(a, 0.01, 0.001));
  EXPECT_NEAR(p.h, std::log2(1.5 * 3.0 * 7.0), 1e-12);
  EXPECT_GT(p.h, 0.0);
  EXPECT_GE(p.l_min, 3 * 0.01);
}

TEST(BuildEntropyParams, RejectsUnsupportedStructure) {
  auto spec = LoopControlSpec::diagonal(Eigen::Vector2d(2.0, 3.0), 0.01, 0.0);
  spec.A(0, 1) = 0.5;
  try {
    build_entropy_params(spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedStructure);
  }
  spec = LoopControlSpec::diagonal(Eigen::Vector2d(2.0, 3.0), 0.01, 0.0);
  spec.R_w = Eigen::MatrixXd::Identity(2, 2);
  EXPECT_THROW(build_entropy_params(spec), Error);
}

TEST(LoopControlSpec, Validation) {
  auto spec = LoopControlSpec::diagonal(Eigen::Vector2d(2.0, 3.0), 0.0, 0.0);
  EXPECT_THROW(spec.validate(), Error);
  spec = LoopControlSpec::diagonal(Eigen::Vector2d(2.0, 3.0), 0.1, 0.0);
  EXPECT_TRUE(spec.is_diagonal_standard());
  spec.C = Eigen::MatrixXd::Identity(3, 3);
  EXPECT_THROW(spec.validate(), Error);
}
