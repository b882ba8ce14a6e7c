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

#include <atomic>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "tankds/errors.hpp"
#include "tankds/protocol.hpp"
#include "tankds/svg_plot.hpp"
#include "tankds/synthetic.hpp"
#include "test_support.hpp"

namespace tankds {
namespace {

using testing::TempDir;
using testing::zero_field;

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig small_config(std::vector<int> ks = {1, 5}) {
  RunConfig c;
  c.k_candidates = std::move(ks);
  c.training.downsample_T = 100;
  return c;
}

TEST(Protocol, StraightLineIsReproduced) {
  const Motion m = generate_synthetic({SynthShape::line, 3, 300, 1.0, 2});
  const MotionResult r = run_motion(small_config({1}), m);
  EXPECT_LT(r.report.sea, 1e-6);
  EXPECT_LT(r.report.vrmse, 1e-6);
  EXPECT_EQ(r.report.k_selected, 1);
  for (bool c : r.report.converged) EXPECT_TRUE(c);
  EXPECT_EQ(r.rollouts.size(), 3u);
}

TEST(Protocol, MoreComponentsHelpOnCurves) {
  const Motion m = generate_synthetic({SynthShape::scurve, 3, 500, 1.0, 5});
  const MotionResult r = run_motion(small_config({1, 5}), m);
  ASSERT_EQ(r.report.sea_by_k.size(), 2u);
  EXPECT_EQ(r.report.sea_by_k[0].first, 1);
  EXPECT_LT(r.report.sea_by_k[1].second, r.report.sea_by_k[0].second);
  EXPECT_EQ(r.report.k_selected, 5);
  EXPECT_EQ(r.report.audit.max_tank_violation, 0.0);
}

TEST(Protocol, ResultsIgnoreJobs) {
  const Motion m = generate_synthetic({SynthShape::arc, 3, 300, 1.0, 6});
  RunConfig a = small_config({2, 3, 4});
  RunConfig b = a;
  b.jobs = 3;
  EXPECT_EQ(to_json(run_motion(a, m).report).dump(), to_json(run_motion(b, m).report).dump());
}

TEST(Protocol, OtherBackendsFitOnce) {
  const Motion m = generate_synthetic({SynthShape::arc, 2, 200, 0.5, 1});
  RunConfig c = small_config();
  c.training.backend.kind = Backend::rbf;
  const MotionResult r = run_motion(c, m);
  EXPECT_FALSE(r.report.k_selected);
  EXPECT_TRUE(r.report.sea_by_k.empty());
  EXPECT_EQ(r.report.backend, "rbf");
  EXPECT_TRUE(std::isfinite(r.report.sea));
}

TEST(Protocol, NotesMissingDemos) {
  const Motion m = generate_synthetic({SynthShape::line, 2, 100, 0.0, 0});
  const MotionResult r = run_motion(small_config({1}), m);
  ASSERT_FALSE(r.report.notes.empty());
  EXPECT_NE(r.report.notes.front().find("only 2"), std::string::npos);
}

TEST(Protocol, FixedStorageOverride) {
  const Motion m = generate_synthetic({SynthShape::line, 1, 100, 0.0, 0});
  RunConfig c = small_config({1});
  c.training.s_bar_override = 42.0;
  EXPECT_EQ(run_motion(c, m).report.s_bar, 42.0);
}

TEST(Aggregate, Values) {
  const std::vector<double> one{3.5};
  const Aggregate a = aggregate(one);
  EXPECT_EQ(a.mean, 3.5);
  EXPECT_EQ(a.min, 3.5);
  EXPECT_EQ(a.max, 3.5);
  const std::vector<double> two{10.0, 30.0};
  const Aggregate b = aggregate(two);
  EXPECT_EQ(b.mean, 20.0);
  EXPECT_EQ(b.min, 10.0);
  EXPECT_EQ(b.max, 30.0);
  EXPECT_THROW(aggregate(std::span<const double>{}), InvalidParameter);
}

TEST(Corpus, EmptyCorpusThrows) {
  TempDir tmp("empty");
  RunConfig c = small_config();
  c.corpus = tmp.path();
  EXPECT_THROW(run_corpus(c), Error);
}

TEST(Corpus, FailuresAreIsolated) {
  TempDir tmp("isolated");
  write_motion(generate_synthetic({SynthShape::line, 3, 100, 0.5, 1}), tmp.path() / "a_line");
  write_motion(generate_synthetic({SynthShape::line, 1, 100, 0.0, 0}), tmp.path() / "b_broken");
  std::ofstream(tmp.path() / "b_broken" / "demo_1.csv") << "t,x1,x2\n0,1,oops\n";

  RunConfig c = small_config({1});
  c.corpus = tmp.path();
  c.output_dir = tmp.path() / "out";
  const CorpusSummary s = run_corpus(c);
  EXPECT_FALSE(s.ok());
  ASSERT_EQ(s.reports.size(), 1u);
  ASSERT_EQ(s.failures.size(), 1u);
  EXPECT_EQ(s.failures[0].motion, "b_broken");
  EXPECT_NE(s.failures[0].error.find("demo_1.csv:2"), std::string::npos);
  ASSERT_TRUE(s.sea);
  EXPECT_EQ(s.sea->mean, s.reports[0].sea);

  for (const char* f : {"report.json", "report.csv", "timing.json", "models/line.json",
                        "plots/line.svg", "rollouts/line_demo0.csv", "rollouts/line_demo2.csv"})
    EXPECT_TRUE(std::filesystem::exists(c.output_dir / f)) << f;
  const auto report = nlohmann::json::parse(read_file(c.output_dir / "report.json"));
  EXPECT_EQ(report["motions"].size(), 1u);
  EXPECT_EQ(report["failures"][0]["motion"], "b_broken");
  EXPECT_FALSE(report["config"].contains("output_dir"));

  const std::string csv = read_file(c.output_dir / "report.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "motion,backend,k,sea,vrmse,training_time,s_bar,converged");
  EXPECT_NE(csv.find("\nmean,"), std::string::npos);
}

TEST(Corpus, ReportIsByteStable) {
  TempDir tmp("stable");
  write_motion(generate_synthetic({SynthShape::arc, 3, 200, 1.0, 3}), tmp.path() / "corpus" / "arc");
  write_motion(generate_synthetic({SynthShape::line, 3, 200, 1.0, 3}), tmp.path() / "corpus" / "line");
  RunConfig c = small_config({1, 3});
  c.corpus = tmp.path() / "corpus";
  c.output_dir = tmp.path() / "one";
  run_corpus(c);
  c.output_dir = tmp.path() / "two";
  c.jobs = 4;
  run_corpus(c);
  EXPECT_EQ(read_file(tmp.path() / "one" / "report.json"), read_file(tmp.path() / "two" / "report.json"));
  EXPECT_EQ(read_file(tmp.path() / "one" / "plots" / "arc.svg"),
            read_file(tmp.path() / "two" / "plots" / "arc.svg"));
}

TEST(Sweep, StorageReducesError) {
  const Motion m = generate_synthetic({SynthShape::scurve, 3, 500, 1.0, 5});
  const RunConfig c = small_config({5});
  const std::vector<double> values{0.0, 100.0, 1000.0, 10000.0};
  const SweepResult r = sweep_storage(c, m, values);
  ASSERT_EQ(r.rows.size(), 4u);
  EXPECT_EQ(r.k, 5);
  EXPECT_GT(r.estimate, 0.0);
  for (const auto& row : r.rows) EXPECT_TRUE(row.all_converged) << row.s_bar;
  // Without storage the system is the linear fallback xdot = -x.
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    EXPECT_LT(r.rows[i].sea, 0.5 * r.rows[0].sea) << r.rows[i].s_bar;
    if (i > 1) EXPECT_LE(r.rows[i].sea, r.rows[i - 1].sea * (1.0 + 1e-9)) << r.rows[i].s_bar;
  }
  EXPECT_EQ(r.rows[0].min_tank_fraction, 1.0);  // zero cap: nothing to report

  const std::vector<double> around{r.estimate, 10.0 * r.estimate};
  const SweepResult near = sweep_storage(c, m, around);
  EXPECT_LE(std::abs(near.rows[0].sea - near.rows[1].sea), 0.05 * near.rows[1].sea);

  EXPECT_THROW(sweep_storage(c, m, std::vector<double>{}), InvalidParameter);
  EXPECT_THROW(sweep_storage(c, m, std::vector<double>{-1.0}), InvalidParameter);
  const nlohmann::json j = to_json(r);
  EXPECT_EQ(j["rows"].size(), 4u);
}

TEST(Plot, Document) {
  const StabilizedDS ds(zero_field(2), 1.0);
  PlotInput in;
  in.title = "a<b & c";
  in.demos = {Eigen::MatrixXd::Random(20, 2)};
  in.rollouts = {Eigen::MatrixXd(0, 2)};
  in.ds = &ds;
  in.grid = 5;
  const auto svg = plot_motion(in);
  ASSERT_TRUE(svg);
  EXPECT_NE(svg->find("<svg"), std::string::npos);
  EXPECT_NE(svg->find("a&lt;b &amp; c"), std::string::npos);
  EXPECT_NE(svg->find("id=\"field\""), std::string::npos);
  EXPECT_EQ(*svg, *plot_motion(in));

  in.demos = {Eigen::MatrixXd::Zero(5, 3)};
  EXPECT_FALSE(plot_motion(in));
}

TEST(Plot, ArrowsVanishAtGoal) {
  const StabilizedDS ds(testing::random_rbf_field(9), 10.0);
  const auto arrows = field_arrows(ds, Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1), 3, 3);
  ASSERT_EQ(arrows.size(), 9u);
  EXPECT_EQ(arrows[4].base, Eigen::Vector2d::Zero());
  EXPECT_EQ(arrows[4].velocity, Eigen::Vector2d::Zero());
  EXPECT_THROW(field_arrows(ds, Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1), 1, 3), InvalidParameter);
}

TEST(Config, JsonOverridesAndRejectsUnknownKeys) {
  const auto doc = nlohmann::json::parse(R"({
    "backend": "gp", "k_candidates": [2, 3], "dt": 0.005, "s_bar": 12.5,
    "gp": {"noise": 0.01}, "gains": {"a": 0.2}, "seed": 7, "tank_in_vrmse": false
  })");
  const RunConfig c = run_config_from_json(doc);
  EXPECT_EQ(c.training.backend.kind, Backend::gp);
  EXPECT_EQ(c.k_candidates, (std::vector<int>{2, 3}));
  EXPECT_EQ(c.training.dt, 0.005);
  EXPECT_EQ(c.training.s_bar_override, 12.5);
  EXPECT_EQ(c.training.gains.a, 0.2);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_FALSE(c.tank_in_vrmse);
  EXPECT_EQ(c.demos_used, 3);

  EXPECT_FALSE(run_config_from_json(nlohmann::json::parse(R"({"s_bar": "auto"})"), c)
                   .training.s_bar_override);
  EXPECT_THROW(run_config_from_json(nlohmann::json::parse(R"({"speed": 1})")), ParseError);
  EXPECT_THROW(run_config_from_json(nlohmann::json::parse(R"({"gmr": {"iters": 1}})")), ParseError);
  EXPECT_THROW(run_config_from_json(nlohmann::json::parse(R"({"dt": "fast"})")), ParseError);

  const nlohmann::json echo = to_json(c);
  EXPECT_EQ(run_config_from_json(echo).k_candidates, c.k_candidates);
  EXPECT_FALSE(echo.contains("jobs"));
  EXPECT_TRUE(to_json(c, true).contains("jobs"));
}

TEST(Config, Validation) {
  RunConfig c;
  c.k_candidates.clear();
  EXPECT_THROW(c.validate(), InvalidParameter);
  c = {};
  c.jobs = 0;
  EXPECT_THROW(c.validate(), InvalidParameter);
  c = {};
  c.conv_tol = 0.0;
  EXPECT_THROW(c.validate(), InvalidParameter);
}

TEST(ParallelFor, CoversRangeAndRethrows) {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(100, 4, [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(parallel_for(10, 3,
                            [](std::size_t i) {
                              if (i == 7) throw InvalidParameter("boom");
                            }),
               InvalidParameter);
}

}  // namespace
}  // namespace tankds
