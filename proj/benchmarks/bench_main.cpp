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

#include <benchmark/benchmark.h>

#include "tankds/dynamics.hpp"
#include "tankds/protocol.hpp"
#include "tankds/regression.hpp"
#include "tankds/synthetic.hpp"
#include "tankds/training.hpp"

namespace {

using namespace tankds;

const std::vector<Demonstration>& scurve_demos() {
  static const std::vector<Demonstration> demos = [] {
    RunConfig config;
    return preprocess(generate_synthetic({SynthShape::scurve, 3, 1000, 1.0, 5}), config);
  }();
  return demos;
}

const TrainingSet& scurve_pairs() {
  static const TrainingSet pairs = build_training_pairs(scurve_demos());
  return pairs;
}

RegressorPtr fitted(Backend kind) {
  BackendSpec spec;
  spec.kind = kind;
  return fit_backend(scurve_pairs(), spec);
}

void BM_Predict(benchmark::State& state) {
  const RegressorPtr model = fitted(static_cast<Backend>(state.range(0)));
  const Eigen::Vector2d x(-20.0, 7.5);
  for (auto _ : state) benchmark::DoNotOptimize(model->predict(x));
  state.SetLabel(std::string(model->backend()));
}
BENCHMARK(BM_Predict)->Arg(static_cast<int>(Backend::gmr))->Arg(static_cast<int>(Backend::rbf))
    ->Arg(static_cast<int>(Backend::gp));

void BM_FitGmr(benchmark::State& state) {
  GmrOptions opt;
  opt.components = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fit_gmr(scurve_pairs(), opt));
}
BENCHMARK(BM_FitGmr)->DenseRange(4, 7)->Unit(benchmark::kMillisecond);

void BM_Integrate(benchmark::State& state) {
  const RegressorPtr model = fitted(Backend::gmr);
  const StabilizedDS ds(model, estimate_storage_cap(scurve_demos(), *model));
  const Eigen::VectorXd x0 = scurve_demos().front().positions.row(0).transpose();
  long steps = 0;
  for (auto _ : state) {
    const Rollout r = integrate(ds, x0);
    steps += r.steps;
  }
  state.counters["steps/s"] = benchmark::Counter(static_cast<double>(steps), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Integrate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
