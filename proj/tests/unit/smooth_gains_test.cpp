/*
 Copyright 2026 The tankds Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "tankds/errors.hpp"
#include "tankds/smooth_gains.hpp"

namespace tankds {
namespace {

// High-precision reference values of the default gate (a = 0.1).
constexpr double kKappaSqrt10 = 0.632120558828557678404;     // 1 - e^-1
constexpr double kKappaInvSqrt10 = 1.58197670686932642439;   // 1 / (1 - e^-1)
constexpr double kKappaDotUnit = 0.180967483607191914633;    // 0.2 e^-0.1
constexpr double kZPowerExample = -0.190325163928080853672;  // -2 (1 - e^-0.1)

// Independent restatement of the smooth step for oracle comparisons.
double step_oracle(double x, double lo, double hi) {
  if (x >= hi) return 1.0;
  if (x <= lo) return 0.0;
  return 0.5 * (1.0 + std::sin(std::numbers::pi * ((x - lo) / (hi - lo) - 0.5)));
}

TEST(SmoothStep, Branches) {
  EXPECT_EQ(h1(2.0, 0.0, 1.0), 1.0);
  EXPECT_EQ(h1(-1.0, 0.0, 1.0), 0.0);
  EXPECT_NEAR(h1(0.5, 0.0, 1.0), 0.5, 1e-15);
  EXPECT_EQ(h2(2.0, 0.0, 1.0), 0.0);
  EXPECT_EQ(h2(-1.0, 0.0, 1.0), 1.0);
  EXPECT_NEAR(h2(0.5, 0.0, 1.0), 0.5, 1e-15);
}

TEST(SmoothStep, RejectsEmptyInterval) {
  EXPECT_THROW(h1(0.0, 1.0, 1.0), InvalidParameter);
  EXPECT_THROW(h1(0.0, 2.0, 1.0), InvalidParameter);
  EXPECT_THROW(h2(0.0, 1.0, 1.0), InvalidParameter);
}

TEST(SmoothStep, ComplementMonotoneAndMatchesOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 20000; ++i) {
    double lo = u(rng), hi = u(rng);
    if (lo == hi) continue;
    if (lo > hi) std::swap(lo, hi);
    const double x = u(rng);
    EXPECT_EQ(h1(x, lo, hi) + h2(x, lo, hi), 1.0);
    EXPECT_NEAR(h1(x, lo, hi), step_oracle(x, lo, hi), 1e-15);
    EXPECT_LE(h1(x, lo, hi), h1(x + 1e-3, lo, hi));
  }
}

TEST(SmoothStep, ContinuousAtBoundaries) {
  for (double eps : {1e-4, 1e-6, 1e-8}) {
    EXPECT_LT(std::abs(h1(0.0 + eps, 0.0, 1.0) - h1(0.0 - eps, 0.0, 1.0)), 10 * eps);
    EXPECT_LT(std::abs(h1(1.0 + eps, 0.0, 1.0) - h1(1.0 - eps, 0.0, 1.0)), 10 * eps);
  }
  // Vanishing slope at the ends.
  const double d = 1e-6;
  EXPECT_LT((h1(d, 0.0, 1.0) - h1(0.0, 0.0, 1.0)) / d, 1e-4);
  EXPECT_LT((h1(1.0, 0.0, 1.0) - h1(1.0 - d, 0.0, 1.0)) / d, 1e-4);
}

TEST(Kappa, Values) {
  EXPECT_EQ(kappa(0.0), 0.0);
  EXPECT_NEAR(kappa(std::sqrt(10.0)), kKappaSqrt10, 1e-15);
  EXPECT_NEAR(kappa(100.0), 1.0, 1e-12);
  EXPECT_THROW(kappa(-1.0), InvalidParameter);
  double prev = 0.0;
  for (double r = 0.01; r < 10.0; r += 0.01) {
    EXPECT_GT(kappa(r), prev);
    prev = kappa(r);
  }
}

TEST(KappaInverse, Values) {
  EXPECT_EQ(kappa_inv(0.0), 1.0);
  EXPECT_NEAR(kappa_inv(std::sqrt(10.0)), kKappaInvSqrt10, 1e-14);
  for (double r : {1e-3, 0.1, 1.0, 7.0, 30.0}) EXPECT_NEAR(kappa(r) * kappa_inv(r), 1.0, 1e-14);
}

TEST(KappaDot, Values) {
  EXPECT_EQ(kappa_dot(Eigen::Vector2d::Zero(), Eigen::Vector2d(3.0, -1.0)), 0.0);
  const Eigen::Vector2d x(1.5, -2.0);
  EXPECT_LT(kappa_dot(x, -x), 0.0);
  EXPECT_NEAR(kappa_dot(Eigen::Vector2d(1, 0), Eigen::Vector2d(1, 0)), kKappaDotUnit, 1e-15);
}

TEST(KappaDot, MatchesFiniteDifference) {
  const Eigen::Vector2d x(2.0, -1.0), v(0.3, 0.7);
  const double h = 1e-6;
  const double fd = (kappa((x + h * v).norm()) - kappa((x - h * v).norm())) / (2 * h);
  EXPECT_NEAR(kappa_dot(x, v), fd, 1e-8);
}

TEST(ZPower, Values) {
  EXPECT_EQ(z_power(Eigen::Vector2d::Zero(), Eigen::Vector2d(4, 5)), 0.0);
  EXPECT_EQ(z_power(Eigen::Vector2d(4, 5), Eigen::Vector2d::Zero()), 0.0);
  EXPECT_NEAR(z_power(Eigen::Vector2d(1, 0), Eigen::Vector2d(-2, 5)), kZPowerExample, 1e-15);
  EXPECT_THROW(z_power(Eigen::Vector2d(1, 0), Eigen::Vector3d(1, 0, 0)), DimensionMismatch);
}

TEST(AlphaGain, Examples) {
  for (double cap : {0.1, 1.0, 100.0}) {
    EXPECT_EQ(alpha_gain(cap, cap), 0.0);
    EXPECT_EQ(alpha_gain(2 * cap, cap), 0.0);
    EXPECT_EQ(alpha_gain(0.0, cap), 0.0);
    EXPECT_EQ(alpha_gain(0.5 * cap, cap), 0.99);
  }
  EXPECT_EQ(alpha_gain(0.0, 0.0), 0.0);
  EXPECT_EQ(alpha_gain(1.0, 0.0), 0.0);
}

TEST(BetaGain, Examples) {
  const double cap = 10.0;
  EXPECT_EQ(beta_gain(-1.0, cap, cap), 0.0);
  EXPECT_EQ(beta_gain(1.0, 0.0, cap), 0.0);
  EXPECT_EQ(beta_gain(1.0, 0.5 * cap, cap), 1.0);
}

TEST(GammaGain, Examples) {
  const double cap = 10.0;
  EXPECT_EQ(gamma_gain(0.01, 0.0, cap), 0.0);
  EXPECT_EQ(gamma_gain(5.0, 0.0, cap), 0.0);
  for (double s : {0.0, 0.3, 5.0, 10.0}) EXPECT_EQ(gamma_gain(-0.5, s, cap), 1.0);
  EXPECT_EQ(gamma_gain(1.0, 0.5 * cap, cap), 1.0);
}

TEST(Gains, ZeroCapLimits) {
  // An empty budget: nothing can be extracted, dissipation is never stored.
  for (double z : {-1.0, -0.005, 0.0, 0.005, 1.0}) {
    EXPECT_EQ(alpha_gain(0.0, 0.0), 0.0);
    const double b = beta_gain(z, 0.0, 0.0);
    const double g = gamma_gain(z, 0.0, 0.0);
    EXPECT_GE(b, 0.0);
    EXPECT_LE(b, 1.0);
    EXPECT_GE(g, 0.0);
    EXPECT_LE(g, 1.0);
    if (z >= 0.01) EXPECT_EQ(g, b);
    if (z <= 0.0) EXPECT_GE(g, b);
  }
  EXPECT_EQ(gamma_gain(1.0, 0.0, 0.0), 0.0);
  EXPECT_EQ(beta_gain(1.0, 0.0, 0.0), 0.0);
}

// Properties over random (z, s, cap) triples.
TEST(Gains, RandomizedConditions) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uz(-0.05, 0.05), unit(0.0, 1.0);
  const double caps[] = {0.0, 0.1, 1.0, 100.0};
  for (int i = 0; i < 50000; ++i) {
    const double cap = caps[i % 4];
    const double s = 2.0 * unit(rng) * std::max(cap, 1e-3);
    const double z = (i % 3 == 0) ? 100.0 * uz(rng) : uz(rng);
    const double a = alpha_gain(s, cap);
    const double b = beta_gain(z, s, cap);
    const double g = gamma_gain(z, s, cap);
    ASSERT_GE(a, 0.0);
    ASSERT_LE(a, 0.99);
    ASSERT_GE(b, 0.0);
    ASSERT_LE(b, 1.0);
    ASSERT_GE(g, 0.0);
    ASSERT_LE(g, 1.0);
    if (s >= cap) ASSERT_EQ(a, 0.0);
    if (s >= cap && z <= -0.01) ASSERT_EQ(b, 0.0);
    if (z >= 0.01) ASSERT_EQ(g, b) << "z=" << z << " s=" << s << " cap=" << cap;
    if (z <= 0.0) ASSERT_GE(g, b);
  }
  for (double cap : {0.1, 1.0, 100.0})
    for (double z : {0.0, 1e-4, 0.5}) ASSERT_EQ(beta_gain(z, 0.0, cap), 0.0);
}

TEST(Gains, ContinuousAcrossBands) {
  const double cap = 10.0, eps = 1e-9;
  for (double s : {0.0, 1.0, 9.0, 10.0})
    for (double z : {-0.01, 0.0, 0.01, 0.5}) {
      EXPECT_NEAR(alpha_gain(s + eps, cap), alpha_gain(std::max(0.0, s - eps), cap), 1e-6);
      EXPECT_NEAR(beta_gain(z + eps, s, cap), beta_gain(z - eps, s, cap), 1e-6);
      EXPECT_NEAR(beta_gain(z, s + eps, cap), beta_gain(z, std::max(0.0, s - eps), cap), 1e-6);
      EXPECT_NEAR(gamma_gain(z + eps, s, cap), gamma_gain(z - eps, s, cap), 1e-6);
      EXPECT_NEAR(gamma_gain(z, s + eps, cap), gamma_gain(z, std::max(0.0, s - eps), cap), 1e-6);
    }
}

TEST(GainParams, Validation) {
  GainParams p;
  EXPECT_NO_THROW(p.validate());
  p.s_lo_frac = 0.95;
  EXPECT_THROW(p.validate(), InvalidParameter);
  p = {};
  p.alpha_max = 1.0;
  EXPECT_THROW(p.validate(), InvalidParameter);
  p = {};
  p.a = 0.0;
  EXPECT_THROW(p.validate(), InvalidParameter);
  p = {};
  p.z_band = -1.0;
  EXPECT_THROW(p.validate(), InvalidParameter);
}

}  // namespace
}  // namespace tankds
