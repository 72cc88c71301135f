#include <gtest/gtest.h>

#include <random>

#include "sc3/compute_model.hpp"

using namespace sc3;

namespace {

const ComputeParams kP{};  // alpha 100, beta 50, rho 0.25, tau 5 ms
constexpr double kD = 1e6;

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(ComponentTimes, LocalOnlyFlow) {
  SplitPlan s;
  s.d1 = kD;
  s.f1 = 2e9;
  const auto t = component_times(s, kP);
  EXPECT_DOUBLE_EQ(t.t1, 100 * kD / 2e9);
  EXPECT_EQ(t.t2, 0.0);
  EXPECT_EQ(t.t3, 0.0);
}

TEST(ComponentTimes, PreprocessedFlow) {
  SplitPlan s;
  s.d2 = 8e5;
  s.f2 = 1e8;
  s.r2 = 5e5;
  EXPECT_NEAR(component_times(s, kP).t2, 0.42, 1e-12);
}

TEST(ComponentTimes, RawOffloadFlow) {
  SplitPlan s;
  s.d3 = 2e5;
  s.r3 = 5e5;
  EXPECT_NEAR(component_times(s, kP).t3, 0.42, 1e-12);
}

TEST(ComponentTimes, MissingResourceThrows) {
  SplitPlan s;
  s.d3 = 1.0;
  try {
    component_times(s, kP);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroResourceForPositiveData);
  }
}

TEST(ClassifyRegion, Examples) {
  EXPECT_EQ(classify_region(6e9, 123.0, kD, kP), Region::S4);
  EXPECT_EQ(classify_region(1e8, 1e6, kD, kP), Region::S1);
  EXPECT_EQ(classify_region(1e9, 1e6, kD, kP), Region::S2);
  EXPECT_EQ(classify_region(4e9, 1e6, kD, kP), Region::S3);
}

TEST(ClassifyRegion, TieBreakPrefersHigherRegion) {
  EXPECT_EQ(classify_region(5e9, 1e6, kD, kP), Region::S4);
  // S1/S2 boundary at f = beta R / rho
  EXPECT_EQ(classify_region(2e8, 1e6, kD, kP), Region::S2);
}

TEST(ClassifyRegion, NoPreprocessingGainUsesOnlyS3S4) {
  ComputeParams p = kP;
  p.beta = 80.0;  // alpha - alpha rho - beta < 0
  for (double f : {1e7, 1e8, 1e9, 4e9}) EXPECT_EQ(classify_region(f, 1e6, kD, p), Region::S3);
  const auto s = optimal_split(1e8, 1e6, kD, p);
  EXPECT_EQ(s.d2, 0.0);
}

TEST(TCompStar, RegionExamples) {
  EXPECT_NEAR(t_comp_star(1e8, 1e6, kD, kP), 0.42, 1e-12);
  EXPECT_NEAR(t_comp_star(1e9, 1e6, kD, kP), 0.09, 1e-12);
  EXPECT_NEAR(t_comp_star(4e9, 1e6, kD, kP), 2e7 / 4.1e9 + 0.02, 1e-12);
  EXPECT_NEAR(t_comp_star(6e9, 1e6, kD, kP), 1e8 / 6e9, 1e-15);
}

TEST(TCompStar, ZeroResourcesThrow) {
  try {
    t_comp_star(0.0, 0.0, kD, kP);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoFeasibleFlow);
  }
}

TEST(TCompStar, ZeroRateIsLocalOnly) {
  EXPECT_DOUBLE_EQ(t_comp_star(1e9, 0.0, kD, kP), 100 * kD / 1e9);
  const auto s = optimal_split(1e9, 0.0, kD, kP);
  EXPECT_EQ(s.d3, 0.0);
  EXPECT_DOUBLE_EQ(s.d1, kD);
}

TEST(OptimalSplit, S1Plan) {
  const auto s = optimal_split(1e8, 1e6, kD, kP);
  EXPECT_EQ(s.region, Region::S1);
  EXPECT_NEAR(s.d1, 0.0, 1e-6);
  EXPECT_NEAR(s.d2, 8e5, 1e-6);
  EXPECT_NEAR(s.d3, 2e5, 1e-6);
  EXPECT_NEAR(s.f1, 0.0, 1e-6);
  EXPECT_NEAR(s.f2, 1e8, 1e-3);
  EXPECT_NEAR(s.r2, 5e5, 1e-6);
  EXPECT_NEAR(s.r3, 5e5, 1e-6);
  EXPECT_NEAR(s.total_bits(), kD, 1e-6);
}

TEST(OptimalSplit, S3Plan) {
  const auto s = optimal_split(4e9, 1e6, kD, kP);
  EXPECT_EQ(s.region, Region::S3);
  EXPECT_NEAR(s.d1, 4e9 * (2e7 / 4.1e9 + 0.02) / 100, 1e-3);
  EXPECT_NEAR(s.d1, 995122, 1.0);
  EXPECT_NEAR(s.d3, 4878, 1.0);
  EXPECT_EQ(s.d2, 0.0);
  EXPECT_LT(rel(s.d1 + s.d3, kD), 1e-6);
}

TEST(OptimalSplit, S4AllLocal) {
  const auto s = optimal_split(6e9, 1e6, kD, kP);
  EXPECT_DOUBLE_EQ(s.d1, kD);
  EXPECT_EQ(s.d2, 0.0);
  EXPECT_EQ(s.d3, 0.0);
}

TEST(OptimalSplit, S2PlanHasNoRawOffload) {
  const auto s = optimal_split(1e9, 1e6, kD, kP);
  EXPECT_EQ(s.region, Region::S2);
  EXPECT_EQ(s.d3, 0.0);
  EXPECT_NEAR(s.r2, 1e6, 1e-6);
  EXPECT_NEAR(s.f2, 50 * 1e6 / 0.25, 1e-3);
}

TEST(BruteForce, AgreesOnRegionExamples) {
  for (double f : {1e8, 1e9, 4e9}) {
    const double exact = t_comp_star(f, 1e6, kD, kP);
    EXPECT_LT(rel(brute_force_min_time(f, 1e6, kD, kP), exact), 0.01) << f;
  }
  EXPECT_DOUBLE_EQ(brute_force_min_time(6e9, 1e6, kD, kP), 1e8 / 6e9);
}

TEST(BruteForce, RejectsCoarseGrid) { EXPECT_THROW(brute_force_min_time(1e9, 1e6, kD, kP, 50), Error); }

class RandomInstances : public ::testing::Test {
 protected:
  struct Inst {
    double f, R, D;
    ComputeParams p;
  };
  std::vector<Inst> draw(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto logu = [&](double lo, double hi) { return lo * std::pow(hi / lo, u(rng)); };
    std::vector<Inst> out;
    for (int i = 0; i < n; ++i) {
      Inst x;
      x.p.alpha = logu(20, 500);
      x.p.beta = x.p.alpha * logu(0.05, 0.9);
      x.p.rho = logu(0.05, 1.0);
      x.p.tau = logu(1e-3, 2e-2);
      x.D = logu(1e5, 1e7);
      x.f = logu(1e7, 1e10);
      x.R = logu(1e5, 1e8);
      out.push_back(x);
    }
    return out;
  }
};

TEST_F(RandomInstances, BruteForceNeverBeatsClosedForm) {
  for (const auto& x : draw(100, 7)) {
    const double exact = t_comp_star(x.f, x.R, x.D, x.p);
    EXPECT_GE(brute_force_min_time(x.f, x.R, x.D, x.p, 100), exact * (1 - 1e-12));
  }
}

TEST_F(RandomInstances, SplitRealizesOptimumAndRespectsBudgets) {
  for (const auto& x : draw(300, 11)) {
    const auto s = optimal_split(x.f, x.R, x.D, x.p);
    const double t = t_comp_star(x.f, x.R, x.D, x.p);
    EXPECT_LT(rel(component_times(s, x.p).max(), t), 1e-9);
    EXPECT_LT(rel(s.total_bits(), x.D), 1e-9);
    EXPECT_LE(s.f1 + s.f2, x.f * (1 + 1e-9));
    EXPECT_LE(s.r2 + s.r3, x.R * (1 + 1e-9));
    EXPECT_GE(std::min({s.d1, s.d2, s.d3, s.f1, s.f2, s.r2, s.r3}), 0.0);
    if (s.region != Region::S4) {
      EXPECT_GE(t, 4 * x.p.tau * (1 - 1e-12));
    }
    if (s.d1 > 0 && s.d2 > 0 && s.d3 > 0) {
      const auto ct = component_times(s, x.p);
      EXPECT_LT(rel(ct.t1, ct.t2), 1e-9);
      EXPECT_LT(rel(ct.t2, ct.t3), 1e-9);
      EXPECT_LT(rel(x.p.beta * s.d2 / s.f2, x.p.rho * s.d2 / s.r2), 1e-9);
    }
  }
}

TEST_F(RandomInstances, MonotoneInResources) {
  for (const auto& x : draw(300, 13)) {
    const double t = t_comp_star(x.f, x.R, x.D, x.p);
    EXPECT_LE(t_comp_star(x.f * 1.3, x.R, x.D, x.p), t * (1 + 1e-12));
    EXPECT_LE(t_comp_star(x.f, x.R * 1.3, x.D, x.p), t * (1 + 1e-12));
  }
}

TEST(TCompStar, ContinuousAcrossBoundaries) {
  const double R = 1e6;
  const double b12 = kP.beta * R / kP.rho;
  const double b13 = preprocessing_threshold(R, kD, kP);
  const double b4 = local_only_threshold(kD, kP);
  for (double b : {b12, b13, b4}) {
    const double lo = t_comp_star(b * (1 - 1e-12), R, kD, kP);
    const double hi = t_comp_star(b * (1 + 1e-12), R, kD, kP);
    EXPECT_LT(rel(lo, hi), 1e-9) << b;
  }
  // Branches agree exactly on their shared boundaries.
  EXPECT_LT(rel(branch::t1(b12, R, kD, kP), branch::t2(b12, R, kD, kP)), 1e-12);
  EXPECT_LT(rel(branch::t2(b13, R, kD, kP), branch::t3(b13, R, kD, kP)), 1e-12);
  EXPECT_LT(rel(branch::t3(b4, R, kD, kP), branch::t4(b4, R, kD, kP)), 1e-12);
}
