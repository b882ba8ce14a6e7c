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

#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "tankds/errors.hpp"
#include "tankds/metrics.hpp"
#include "test_support.hpp"

namespace tankds {
namespace {

using testing::make_function;
using testing::uniform_demo;
using testing::zero_field;

Eigen::MatrixXd rows(std::initializer_list<std::initializer_list<double>> r) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(r.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : r) {
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

Eigen::MatrixXd random_path(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g(0.0, 5.0);
  Eigen::MatrixXd p(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) p.row(i) << g(rng), g(rng);
  return p;
}

TEST(Resample, CornerPath) {
  const Eigen::MatrixXd out = resample_equidistant(rows({{0, 0}, {1, 0}, {1, 1}}), 5);
  const Eigen::MatrixXd expect = rows({{0, 0}, {0.5, 0}, {1, 0}, {1, 0.5}, {1, 1}});
  EXPECT_LT((out - expect).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Resample, UnevenSamplesBecomeEven) {
  const Eigen::MatrixXd path = rows({{0, 0}, {0.1, 0}, {0.2, 0}, {3, 0}, {4, 0}});
  const Eigen::MatrixXd out = resample_equidistant(path, 9);
  for (Eigen::Index i = 0; i < 9; ++i) {
    EXPECT_NEAR(out(i, 0), 0.5 * static_cast<double>(i), 1e-14);
    EXPECT_EQ(out(i, 1), 0.0);
  }
}

TEST(Resample, ZeroLengthAndErrors) {
  const Eigen::MatrixXd out = resample_equidistant(rows({{2, 3}, {2, 3}}), 4);
  for (Eigen::Index i = 0; i < 4; ++i) EXPECT_EQ(out.row(i), rows({{2, 3}}));
  EXPECT_THROW(resample_equidistant(Eigen::MatrixXd(0, 2), 3), InvalidParameter);
  EXPECT_THROW(resample_equidistant(rows({{0, 0}, {1, 1}}), 1), InvalidParameter);
}

TEST(Resample, KeepsEndpointsAndSpacing) {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd path = random_path(rng, 30);
  const Eigen::MatrixXd out = resample_equidistant(path, 200);
  EXPECT_EQ(out.row(0), path.row(0));
  EXPECT_EQ(out.row(199), path.row(29));
  double length = 0.0;
  for (Eigen::Index i = 1; i < 30; ++i) length += (path.row(i) - path.row(i - 1)).norm();
  // Chords never exceed the arc-length spacing.
  for (Eigen::Index i = 1; i < 200; ++i)
    EXPECT_LE((out.row(i) - out.row(i - 1)).norm(), length / 199.0 + 1e-9);
}

TEST(Tetragon, Examples) {
  EXPECT_NEAR(tetragon_area(Eigen::Vector2d(0, 1), Eigen::Vector2d(1, 1), Eigen::Vector2d(0, 0),
                            Eigen::Vector2d(1, 0)),
              1.0, 1e-12);
  EXPECT_EQ(tetragon_area(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1), Eigen::Vector2d(2, 2),
                          Eigen::Vector2d(3, 3)),
            0.0);
  // e_t == d_t: triangle (0,0), (1,1), (1,0).
  EXPECT_NEAR(tetragon_area(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1), Eigen::Vector2d(0, 0),
                            Eigen::Vector2d(1, 0)),
              0.5, 1e-12);
  EXPECT_THROW(tetragon_area(Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(),
                             Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero()),
               DimensionMismatch);
}

TEST(Sea, ParallelOffset) {
  const Eigen::Index T = 11;
  Eigen::MatrixXd demo(T, 2), repro(T, 2);
  for (Eigen::Index i = 0; i < T; ++i) {
    demo.row(i) << 0.3 * i, 0.0;
    repro.row(i) << 0.3 * i, 0.25;
  }
  // A strip of length 3 and width 0.25.
  EXPECT_NEAR(swept_error_area(demo, repro), 0.75, 1e-12);
  EXPECT_EQ(swept_error_area(demo, demo), 0.0);

  const std::vector<Eigen::MatrixXd> demos{demo, demo};
  const std::vector<Eigen::MatrixXd> repros{repro, demo};
  EXPECT_NEAR(sea(demos, repros), 0.75, 1e-12);
}

TEST(Sea, SymmetryAndTranslation) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd a = random_path(rng, 40);
    const Eigen::MatrixXd b = random_path(rng, 40);
    const double ab = swept_error_area(a, b);
    EXPECT_NEAR(swept_error_area(b, a), ab, 1e-12 * (1.0 + ab));
    const Eigen::RowVector2d shift(13.5, -7.25);
    EXPECT_NEAR(swept_error_area(a.rowwise() + shift, b.rowwise() + shift), ab, 1e-9 * (1.0 + ab));
    EXPECT_GE(ab, 0.0);
  }
}

TEST(Sea, Errors) {
  EXPECT_THROW(swept_error_area(Eigen::MatrixXd::Zero(5, 2), Eigen::MatrixXd::Zero(4, 2)),
               DimensionMismatch);
  EXPECT_THROW(swept_error_area(Eigen::MatrixXd::Zero(5, 3), Eigen::MatrixXd::Zero(5, 3)),
               DimensionMismatch);
  const std::vector<Eigen::MatrixXd> one{Eigen::MatrixXd::Zero(3, 2)};
  const std::vector<Eigen::MatrixXd> none;
  EXPECT_THROW(sea(one, none), DimensionMismatch);
}

Demonstration offset_demo(const Eigen::Vector2d& offset) {
  const Eigen::Index T = 50;
  Eigen::MatrixXd pos(T, 2), vel(T, 2);
  for (Eigen::Index i = 0; i < T; ++i) {
    pos.row(i) << 10.0 - 0.2 * i, 4.0 * std::sin(0.1 * i);
    vel.row(i) = -pos.row(i) + offset.transpose();
  }
  return uniform_demo(pos, vel, 0.05);
}

TEST(Vrmse, ConstantOffsetFromField) {
  // Zero field: xdot = -x regardless of the tank.
  const StabilizedDS ds(zero_field(2), 25.0);
  const std::vector<Demonstration> demos{offset_demo({3.0, 0.0}), offset_demo({0.0, -4.0})};
  const VrmseResult r = vrmse(demos, ds);
  ASSERT_EQ(r.per_demo.size(), 2u);
  EXPECT_NEAR(r.per_demo[0], 3.0, 1e-12);
  EXPECT_NEAR(r.per_demo[1], 4.0, 1e-12);
  EXPECT_NEAR(r.total, 7.0, 1e-12);
  EXPECT_NEAR(vrmse(demos, ds.with_tank(false)).total, 7.0, 1e-12);
}

TEST(Vrmse, ExactFieldScoresZeroWithoutTank) {
  const Eigen::Vector2d c(1.5, -0.5);
  // xdot = -x + kappa(|x|) c with f = c.
  const auto field = make_function(2, [c](const Eigen::VectorXd&) -> Eigen::VectorXd { return c; });
  const StabilizedDS ds(field, 10.0);
  Demonstration d = offset_demo(Eigen::Vector2d::Zero());
  for (Eigen::Index i = 0; i < d.size(); ++i)
    d.velocities->row(i) = -d.positions.row(i) + kappa(d.positions.row(i).norm()) * c.transpose();
  const std::vector<Demonstration> demos{d};
  EXPECT_LT(vrmse(demos, ds.with_tank(false)).total, 1e-12);
}

TEST(Vrmse, Errors) {
  const StabilizedDS ds(zero_field(2), 1.0);
  Demonstration d = offset_demo(Eigen::Vector2d::Zero());
  d.velocities.reset();
  std::vector<Demonstration> demos{d};
  EXPECT_THROW(vrmse(demos, ds), InvalidParameter);
  const StabilizedDS ds3(zero_field(3), 1.0);
  demos = {offset_demo(Eigen::Vector2d::Zero())};
  EXPECT_THROW(vrmse(demos, ds3), DimensionMismatch);
}

TEST(Report, JsonHasNoTiming) {
  MetricsReport r;
  r.motion = "m";
  r.backend = "gmr";
  r.training_time = 1.25;
  r.k_selected = 5;
  r.sea_by_k = {{4, 2.0}, {5, 1.0}};
  const nlohmann::json j = to_json(r);
  EXPECT_FALSE(j.contains("training_time"));
  EXPECT_EQ(j["k_selected"], 5);
  EXPECT_EQ(j["sea_by_k"][1]["k"], 5);
  r.k_selected.reset();
  EXPECT_TRUE(to_json(r)["k_selected"].is_null());
}

}  // namespace
}  // namespace tankds
