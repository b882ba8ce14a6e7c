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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tankds/corpus_io.hpp"
#include "tankds/errors.hpp"
#include "tankds/protocol.hpp"
#include "tankds/svg_plot.hpp"
#include "tankds/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Flags shared by `run` and `sweep`. Values only override the config file
// when given on the command line.
struct RunFlags {
  std::string config_file;
  std::string corpus;
  std::string out;
  std::string backend;
  std::string sbar;
  std::vector<int> k;
  std::uint64_t seed = 0;
  int jobs = 1;
  double dt = 0.01;
  int demos = 3;
  long downsample = 100;
  long max_steps = 100000;
  double conv_tol = 1e-3;
  double multiplier = 1.0;
  bool no_tank_vrmse = false;

  CLI::Option* seed_opt = nullptr;
  CLI::Option* jobs_opt = nullptr;
  CLI::Option* dt_opt = nullptr;
  CLI::Option* demos_opt = nullptr;
  CLI::Option* downsample_opt = nullptr;
  CLI::Option* max_steps_opt = nullptr;
  CLI::Option* conv_tol_opt = nullptr;
  CLI::Option* multiplier_opt = nullptr;

  void attach(CLI::App* app) {
    app->add_option("corpus", corpus, "Motion directory or corpus root");
    app->add_option("-c,--config", config_file, "JSON run configuration");
    app->add_option("-o,--out", out, "Output directory");
    app->add_option("--backend", backend, "Regression backend: gmr, rbf or gp (default gmr)");
    app->add_option("--k", k, "GMR component candidates (default 4 5 6 7)");
    app->add_option("--sbar", sbar, "Storage cap: 'auto' (estimated, default) or a value in J");
    multiplier_opt = app->add_option("--sbar-multiplier", multiplier,
                                     "Factor applied to the estimated cap (default 1)");
    seed_opt = app->add_option("--seed", seed, "Random seed (default 0)");
    jobs_opt = app->add_option("-j,--jobs", jobs, "Worker threads (default 1)");
    dt_opt = app->add_option("--dt", dt, "Integration step in s (default 0.01)");
    demos_opt = app->add_option("--demos", demos, "Demonstrations used per motion (default 3)");
    downsample_opt = app->add_option("--T", downsample, "Samples kept per demonstration (default 100)");
    max_steps_opt = app->add_option("--max-steps", max_steps, "Rollout step limit (default 100000)");
    conv_tol_opt = app->add_option("--conv-tol", conv_tol, "Convergence radius (default 1e-3)");
    app->add_flag("--no-tank-vrmse", no_tank_vrmse, "Evaluate V_rmse with gamma = 1");
  }

  tankds::RunConfig build() const {
    tankds::RunConfig c;
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      if (!in) throw tankds::Error("cannot open config " + config_file);
      json doc;
      try {
        doc = json::parse(in);
      } catch (const json::exception& e) {
        throw tankds::ParseError(config_file + ": " + e.what());
      }
      c = tankds::run_config_from_json(doc);
    }
    if (!corpus.empty()) c.corpus = corpus;
    if (!out.empty()) c.output_dir = out;
    if (!backend.empty()) c.training.backend.kind = tankds::parse_backend(backend);
    if (!k.empty()) c.k_candidates = k;
    if (!sbar.empty()) {
      if (sbar == "auto") {
        c.training.s_bar_override.reset();
      } else {
        try {
          c.training.s_bar_override = std::stod(sbar);
        } catch (const std::exception&) {
          throw tankds::InvalidParameter("--sbar expects 'auto' or a number");
        }
      }
    }
    if (multiplier_opt->count()) c.training.s_bar_multiplier = multiplier;
    if (seed_opt->count()) c.seed = seed;
    if (jobs_opt->count()) c.jobs = jobs;
    if (dt_opt->count()) c.training.dt = dt;
    if (demos_opt->count()) c.demos_used = demos;
    if (downsample_opt->count()) c.training.downsample_T = downsample;
    if (max_steps_opt->count()) c.max_steps = max_steps;
    if (conv_tol_opt->count()) c.conv_tol = conv_tol;
    if (no_tank_vrmse) c.tank_in_vrmse = false;
    if (c.corpus.empty()) throw tankds::InvalidParameter("no corpus given");
    c.validate();
    return c;
  }
};

int cmd_run(const RunFlags& flags) {
  const tankds::RunConfig config = flags.build();
  const tankds::CorpusSummary summary = tankds::run_corpus(config);
  for (const auto& r : summary.reports) {
    std::printf("%-24s K=%-3s SEA=%-12.6g Vrmse=%-12.6g fit=%.3fs\n", r.motion.c_str(),
                r.k_selected ? std::to_string(*r.k_selected).c_str() : "-", r.sea, r.vrmse,
                r.training_time);
  }
  for (const auto& f : summary.failures)
    std::fprintf(stderr, "FAILED %s: %s\n", f.motion.c_str(), f.error.c_str());
  if (summary.sea)
    std::printf("SEA   mean %.6g [%.6g - %.6g]\n", summary.sea->mean, summary.sea->min, summary.sea->max);
  if (summary.vrmse)
    std::printf("Vrmse mean %.6g [%.6g - %.6g]\n", summary.vrmse->mean, summary.vrmse->min,
                summary.vrmse->max);
  if (config.output_dir.empty()) std::cout << tankds::summary_json(summary, config).dump(2) << '\n';
  return summary.ok() ? 0 : 1;
}

int cmd_sweep(const RunFlags& flags, std::vector<double> values) {
  tankds::RunConfig config = flags.build();
  if (values.empty()) values = config.s_bar_sweep;
  if (values.empty()) throw tankds::InvalidParameter("sweep needs --values or s_bar_sweep");
  json results = json::array();
  int status = 0;
  for (const auto& dir : tankds::list_motion_dirs(config.corpus)) {
    try {
      const tankds::Motion motion = tankds::read_motion(dir);
      const auto result = tankds::sweep_storage(config, motion, values);
      for (const auto& row : result.rows)
        std::printf("%-24s s_bar=%-12.6g SEA=%-12.6g converged=%d min_tank=%.4f\n",
                    motion.name.c_str(), row.s_bar, row.sea, row.all_converged ? 1 : 0,
                    row.min_tank_fraction);
      results.push_back(tankds::to_json(result));
    } catch (const std::exception& e) {
      std::fprintf(stderr, "FAILED %s: %s\n", dir.string().c_str(), e.what());
      status = 1;
    }
  }
  const json doc = {{"config", tankds::to_json(config)}, {"sweeps", results}};
  if (config.output_dir.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    fs::create_directories(config.output_dir);
    std::ofstream(config.output_dir / "sweep.json") << doc.dump(2) << '\n';
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tankds: energy-tank stabilized dynamical systems from demonstrations"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Benchmark protocol over a corpus");
  run_flags.attach(run);

  RunFlags sweep_flags;
  std::vector<double> sweep_values;
  auto* sweep = app.add_subcommand("sweep", "SEA per storage cap value");
  sweep_flags.attach(sweep);
  sweep->add_option("--values", sweep_values, "Cap values in J");

  tankds::SynthOptions synth_opts;
  std::string synth_shape = "scurve", synth_out, synth_name;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic motion");
  synth->add_option("out", synth_out, "Output directory")->required();
  synth->add_option("--shape", synth_shape, "line, scurve or arc (default scurve)");
  synth->add_option("--demos", synth_opts.demos, "Number of demonstrations (default 3)");
  synth->add_option("--T", synth_opts.samples, "Samples per demonstration (default 1000)");
  synth->add_option("--noise", synth_opts.noise, "Perturbation scale (default 0)");
  synth->add_option("--seed", synth_opts.seed, "Random seed (default 0)");
  synth->add_option("--name", synth_name, "Motion name (default: the shape)");

  std::string plot_motion_dir, plot_model, plot_out, plot_sbar;
  int plot_grid = 15;
  auto* plot = app.add_subcommand("plot", "Render a motion with a saved model as SVG");
  plot->add_option("motion", plot_motion_dir, "Motion directory")->required();
  plot->add_option("--model", plot_model, "Model JSON written by `run`")->required();
  plot->add_option("-o,--out", plot_out, "SVG file (default stdout)");
  plot->add_option("--sbar", plot_sbar, "Storage cap (default: estimated)");
  plot->add_option("--grid", plot_grid, "Arrow grid size (default 15)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_flags);
    if (*sweep) return cmd_sweep(sweep_flags, sweep_values);
    if (*synth) {
      synth_opts.shape = tankds::parse_synth_shape(synth_shape);
      tankds::Motion m = tankds::generate_synthetic(synth_opts);
      if (!synth_name.empty()) m.name = synth_name;
      tankds::write_motion(m, synth_out);
      std::printf("wrote %s (%d demos, T=%ld)\n", synth_out.c_str(), synth_opts.demos,
                  static_cast<long>(synth_opts.samples));
      return 0;
    }
    if (*plot) {
      const tankds::Motion motion = tankds::read_motion(plot_motion_dir);
      std::ifstream in(plot_model);
      if (!in) throw tankds::Error("cannot open model " + plot_model);
      const tankds::RegressorPtr model = tankds::model_from_json(json::parse(in));
      tankds::RunConfig config;
      const auto demos = tankds::preprocess(motion, config);
      const double s_bar = plot_sbar.empty()
                               ? tankds::estimate_storage_cap(demos, *model, config.training.gains)
                               : std::stod(plot_sbar);
      const Eigen::VectorXd goal =
          motion.goal.size() ? motion.goal : Eigen::VectorXd(Eigen::VectorXd::Zero(model->dim()));
      const tankds::StabilizedDS ds(model, s_bar, config.training.gains, goal);
      tankds::PlotInput input;
      input.title = motion.name;
      input.ds = &ds;
      input.grid = plot_grid;
      for (const auto& d : demos) {
        input.demos.push_back(d.positions.rowwise() + goal.transpose());
        input.rollouts.push_back(
            tankds::integrate(ds, d.positions.row(0).transpose() + goal).state_matrix());
      }
      const auto svg = tankds::plot_motion(input);
      if (!svg) {
        std::fprintf(stderr, "plot skipped: motion is not 2-D\n");
        return 0;
      }
      if (plot_out.empty()) {
        std::cout << *svg;
      } else {
        std::ofstream(plot_out) << *svg;
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
