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

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tankds/corpus_io.hpp"
#include "tankds/dynamics.hpp"
#include "tankds/metrics.hpp"
#include "tankds/training.hpp"

namespace tankds {

/// Benchmark run settings. s_bar is estimated from the fitted field unless
/// training.s_bar_override is set; s_bar_sweep is only used by sweep_storage.
struct RunConfig {
  std::filesystem::path corpus;
  std::filesystem::path output_dir;  ///< empty: nothing is written
  TrainingConfig training;
  std::vector<int> k_candidates{4, 5, 6, 7};
  int demos_used = 3;
  long max_steps = 100000;
  double conv_tol = 1e-3;
  std::vector<double> s_bar_sweep;
  std::uint64_t seed = 0;
  int jobs = 1;
  bool tank_in_vrmse = true;

  void validate() const;
  IntegrateOptions integrate_options() const { return {training.dt, max_steps, conv_tol}; }
};

/// Keys missing from `doc` keep the values of `base`. Throws ParseError on
/// malformed documents and unknown keys.
RunConfig run_config_from_json(const nlohmann::json& doc, RunConfig base = {});
/// Full echo of the configuration. output_dir and jobs are left out unless
/// `with_runtime` is set, as they do not affect results.
nlohmann::json to_json(const RunConfig& config, bool with_runtime = false);

/// First demos_used demonstrations, goal-translated, with velocities, and
/// downsampled to training.downsample_T (shorter demonstrations are kept).
std::vector<Demonstration> preprocess(const Motion& motion, const RunConfig& config);

struct MotionResult {
  MetricsReport report;
  std::optional<StabilizedDS> ds;      ///< selected system, goal in world coordinates
  std::vector<Rollout> rollouts;       ///< one per demonstration, world coordinates
  std::vector<Demonstration> demos;    ///< preprocessed, goal-relative
};

/// Fits every candidate K (GMR) or the single backend model, integrates from
/// each demonstration start and keeps the model with the smallest SEA.
MotionResult run_motion(const RunConfig& config, const Motion& motion);

struct Aggregate {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

/// Throws InvalidParameter on empty input.
Aggregate aggregate(std::span<const double> values);

struct MotionFailure {
  std::string motion;
  std::string error;
};

struct CorpusSummary {
  std::vector<MetricsReport> reports;  ///< corpus order
  std::vector<MotionFailure> failures;
  std::optional<Aggregate> sea, vrmse, training_time;

  bool ok() const { return failures.empty(); }
};

/// Runs every motion of config.corpus, isolated from each other's failures.
/// With an output directory set, writes report.json, report.csv,
/// timing.json, rollouts/, plots/ and models/. Throws Error on an empty
/// corpus.
CorpusSummary run_corpus(const RunConfig& config);

/// Deterministic summary document (no timing).
nlohmann::json summary_json(const CorpusSummary& summary, const RunConfig& config);
/// One row per motion plus mean/min/max rows.
std::string summary_csv(const CorpusSummary& summary);

struct SweepRow {
  double s_bar = 0.0;
  double sea = 0.0;
  bool all_converged = false;
  double min_tank_fraction = 0.0;  ///< smallest s / cap before |x| < 5% |x0|
};

struct SweepResult {
  std::string motion;
  double estimate = 0.0;  ///< estimated cap of the trained model
  std::optional<int> k;
  std::vector<SweepRow> rows;
};

/// Trains once (first K candidate for GMR) and reports SEA per cap value.
SweepResult sweep_storage(const RunConfig& config, const Motion& motion,
                          std::span<const double> s_bar_values);

nlohmann::json to_json(const SweepResult& result);

/// Calls fn(i) for i in [0, n) on up to `jobs` threads. The first exception
/// is rethrown after all workers finish.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace tankds
