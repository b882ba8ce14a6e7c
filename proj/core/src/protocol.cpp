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

#include "tankds/protocol.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "format.hpp"
#include "tankds/errors.hpp"
#include "tankds/svg_plot.hpp"

namespace tankds {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <typename T>
void take(const json& obj, const char* key, T& out) {
  if (auto it = obj.find(key); it != obj.end()) out = it->get<T>();
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items())
    if (!ok.count(key)) throw ParseError(where + ": unknown key '" + key + "'");
}

std::string safe_name(const std::string& name) {
  std::string out;
  for (char c : name)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.') ? c : '_';
  return out.empty() ? "motion" : out;
}

struct Candidate {
  std::optional<int> k;
  RegressorPtr model;
  double fit_seconds = 0.0;
  double s_bar = 0.0;
  std::vector<Rollout> rollouts;
  std::vector<double> sea_per_demo;
  double sea = kNaN;
};

Eigen::MatrixXd relative_path(const Rollout& r) {
  return r.state_matrix().rowwise() - r.goal.transpose();
}

std::vector<double> sea_per_demo(std::span<const Demonstration> demos,
                                 const std::vector<Rollout>& rollouts) {
  std::vector<double> out;
  for (std::size_t d = 0; d < demos.size(); ++d) {
    const Eigen::MatrixXd e = resample_equidistant(relative_path(rollouts[d]), demos[d].size());
    out.push_back(swept_error_area(demos[d].positions, e));
  }
  return out;
}

std::vector<Rollout> rollouts_from_starts(const StabilizedDS& ds,
                                          std::span<const Demonstration> demos,
                                          const IntegrateOptions& options) {
  std::vector<Rollout> out;
  for (const auto& demo : demos) {
    const Eigen::VectorXd x0 = demo.positions.row(0).transpose() + ds.goal();
    out.push_back(integrate(ds, x0, options));
  }
  return out;
}

double cap_for(const RunConfig& config, const std::vector<Demonstration>& demos,
               const Regressor& model) {
  if (config.training.s_bar_override) return *config.training.s_bar_override;
  return config.training.s_bar_multiplier *
         estimate_storage_cap(demos, model, config.training.gains);
}

BackendSpec spec_for(const RunConfig& config, std::optional<int> k) {
  BackendSpec spec = config.training.backend;
  spec.gmr.seed = config.seed;
  spec.rbf.seed = config.seed;
  if (k) spec.gmr.components = *k;
  return spec;
}

Candidate fit_candidate(const RunConfig& config, const std::vector<Demonstration>& demos,
                        const TrainingSet& pairs, const Eigen::VectorXd& goal,
                        std::optional<int> k) {
  Candidate c;
  c.k = k;
  const BackendSpec spec = spec_for(config, k);
  const auto t0 = std::chrono::steady_clock::now();
  c.model = fit_backend(pairs, spec);
  c.fit_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.s_bar = cap_for(config, demos, *c.model);
  const StabilizedDS ds(c.model, c.s_bar, config.training.gains, goal);
  c.rollouts = rollouts_from_starts(ds, demos, config.integrate_options());
  if (goal.size() == 2) {
    c.sea_per_demo = sea_per_demo(demos, c.rollouts);
    c.sea = 0.0;
    for (double v : c.sea_per_demo) c.sea += v;
  }
  return c;
}

AuditSummary combine_audits(const std::vector<Rollout>& rollouts, const StabilizedDS& ds,
                            double conv_tol) {
  AuditSummary s;
  long positive = 0, checked = 0;
  for (const auto& r : rollouts) {
    const AuditReport a = lyapunov_audit(r, ds, conv_tol);
    s.max_lyapunov_increase = std::max(s.max_lyapunov_increase, a.max_lyapunov_increase);
    s.max_tank_violation = std::max(s.max_tank_violation, a.max_tank_violation);
    s.max_vdot_discrepancy = std::max(s.max_vdot_discrepancy, a.max_vdot_discrepancy);
    positive += a.positive_vdot_steps;
    checked += a.steps_checked;
  }
  s.positive_vdot_fraction = checked > 0 ? static_cast<double>(positive) / checked : 0.0;
  return s;
}

std::optional<Aggregate> aggregate_finite(const std::vector<MetricsReport>& reports,
                                          double MetricsReport::*field) {
  std::vector<double> v;
  for (const auto& r : reports)
    if (std::isfinite(r.*field)) v.push_back(r.*field);
  if (v.empty()) return std::nullopt;
  return aggregate(v);
}

json aggregate_json(const std::optional<Aggregate>& a) {
  if (!a) return nullptr;
  return {{"mean", a->mean}, {"min", a->min}, {"max", a->max}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

std::string csv_num(double v) { return std::isfinite(v) ? detail::format_double(v) : ""; }

}  // namespace

// ---------------------------------------------------------------------------

void RunConfig::validate() const {
  training.validate();
  if (k_candidates.empty()) throw InvalidParameter("RunConfig: k_candidates is empty");
  for (int k : k_candidates)
    if (k < 1) throw InvalidParameter("RunConfig: K candidates must be >= 1");
  if (demos_used < 1) throw InvalidParameter("RunConfig: demos_used must be >= 1");
  if (max_steps < 1) throw InvalidParameter("RunConfig: max_steps must be >= 1");
  if (!(conv_tol > 0.0)) throw InvalidParameter("RunConfig: conv_tol must be positive");
  for (double s : s_bar_sweep)
    if (!(s >= 0.0) || !std::isfinite(s))
      throw InvalidParameter("RunConfig: sweep values must be finite and nonnegative");
  if (jobs < 1) throw InvalidParameter("RunConfig: jobs must be >= 1");
}

RunConfig run_config_from_json(const json& doc, RunConfig base) {
  RunConfig c = std::move(base);
  try {
    check_keys(doc,
               {"corpus", "output_dir", "backend", "gmr", "rbf", "gp", "gains", "k_candidates",
                "demos_used", "downsample_T", "dt", "conv_tol", "max_steps", "s_bar",
                "s_bar_multiplier", "s_bar_sweep", "seed", "jobs", "tank_in_vrmse"},
               "config");
    if (auto it = doc.find("corpus"); it != doc.end()) c.corpus = it->get<std::string>();
    if (auto it = doc.find("output_dir"); it != doc.end()) c.output_dir = it->get<std::string>();
    if (auto it = doc.find("backend"); it != doc.end())
      c.training.backend.kind = parse_backend(it->get<std::string>());
    if (auto it = doc.find("gmr"); it != doc.end()) {
      check_keys(*it, {"max_iter", "tol", "reg_factor"}, "config.gmr");
      take(*it, "max_iter", c.training.backend.gmr.max_iter);
      take(*it, "tol", c.training.backend.gmr.tol);
      take(*it, "reg_factor", c.training.backend.gmr.reg_factor);
    }
    if (auto it = doc.find("rbf"); it != doc.end()) {
      check_keys(*it, {"centers", "bandwidth", "ridge"}, "config.rbf");
      take(*it, "centers", c.training.backend.rbf.centers);
      take(*it, "bandwidth", c.training.backend.rbf.bandwidth);
      take(*it, "ridge", c.training.backend.rbf.ridge);
    }
    if (auto it = doc.find("gp"); it != doc.end()) {
      check_keys(*it, {"kernel_scale", "kernel_bandwidth", "noise"}, "config.gp");
      take(*it, "kernel_scale", c.training.backend.gp.kernel_scale);
      take(*it, "kernel_bandwidth", c.training.backend.gp.kernel_bandwidth);
      take(*it, "noise", c.training.backend.gp.noise);
    }
    if (auto it = doc.find("gains"); it != doc.end()) {
      check_keys(*it, {"a", "z_band", "s_lo_frac", "s_hi_frac", "alpha_max"}, "config.gains");
      take(*it, "a", c.training.gains.a);
      take(*it, "z_band", c.training.gains.z_band);
      take(*it, "s_lo_frac", c.training.gains.s_lo_frac);
      take(*it, "s_hi_frac", c.training.gains.s_hi_frac);
      take(*it, "alpha_max", c.training.gains.alpha_max);
    }
    take(doc, "k_candidates", c.k_candidates);
    take(doc, "demos_used", c.demos_used);
    take(doc, "downsample_T", c.training.downsample_T);
    take(doc, "dt", c.training.dt);
    take(doc, "conv_tol", c.conv_tol);
    take(doc, "max_steps", c.max_steps);
    if (auto it = doc.find("s_bar"); it != doc.end()) {
      if (it->is_string()) {
        if (it->get<std::string>() != "auto")
          throw ParseError("config: s_bar must be \"auto\" or a number");
        c.training.s_bar_override.reset();
      } else {
        c.training.s_bar_override = it->get<double>();
      }
    }
    take(doc, "s_bar_multiplier", c.training.s_bar_multiplier);
    take(doc, "s_bar_sweep", c.s_bar_sweep);
    take(doc, "seed", c.seed);
    take(doc, "jobs", c.jobs);
    take(doc, "tank_in_vrmse", c.tank_in_vrmse);
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  return c;
}

json to_json(const RunConfig& c, bool with_runtime) {
  const auto& b = c.training.backend;
  const auto& g = c.training.gains;
  json doc = {
      {"corpus", c.corpus.generic_string()},
      {"backend", std::string(to_string(b.kind))},
      {"gmr", {{"max_iter", b.gmr.max_iter}, {"tol", b.gmr.tol}, {"reg_factor", b.gmr.reg_factor}}},
      {"rbf", {{"centers", b.rbf.centers}, {"bandwidth", b.rbf.bandwidth}, {"ridge", b.rbf.ridge}}},
      {"gp",
       {{"kernel_scale", b.gp.kernel_scale},
        {"kernel_bandwidth", b.gp.kernel_bandwidth},
        {"noise", b.gp.noise}}},
      {"gains",
       {{"a", g.a},
        {"z_band", g.z_band},
        {"s_lo_frac", g.s_lo_frac},
        {"s_hi_frac", g.s_hi_frac},
        {"alpha_max", g.alpha_max}}},
      {"k_candidates", c.k_candidates},
      {"demos_used", c.demos_used},
      {"downsample_T", c.training.downsample_T},
      {"dt", c.training.dt},
      {"conv_tol", c.conv_tol},
      {"max_steps", c.max_steps},
      {"s_bar", c.training.s_bar_override ? json(*c.training.s_bar_override) : json("auto")},
      {"s_bar_multiplier", c.training.s_bar_multiplier},
      {"s_bar_sweep", c.s_bar_sweep},
      {"seed", c.seed},
      {"tank_in_vrmse", c.tank_in_vrmse}};
  if (with_runtime) {
    doc["output_dir"] = c.output_dir.generic_string();
    doc["jobs"] = c.jobs;
  }
  return doc;
}

// ---------------------------------------------------------------------------

std::vector<Demonstration> preprocess(const Motion& motion, const RunConfig& config) {
  if (motion.demos.empty()) throw InvalidParameter("motion '" + motion.name + "' has no demonstrations");
  const std::size_t used = std::min<std::size_t>(motion.demos.size(), config.demos_used);
  Eigen::VectorXd goal = motion.goal;
  if (goal.size() == 0) goal = Eigen::VectorXd::Zero(motion.demos.front().dim());
  std::vector<Demonstration> out;
  for (std::size_t i = 0; i < used; ++i) {
    Demonstration d = finite_diff_velocities(translate_to_goal(motion.demos[i], goal));
    const Eigen::Index T = std::min(d.size(), config.training.downsample_T);
    out.push_back(downsample(d, T));
  }
  return out;
}

MotionResult run_motion(const RunConfig& config, const Motion& motion) {
  config.validate();
  MotionResult result;
  result.demos = preprocess(motion, config);
  const auto& demos = result.demos;
  const Eigen::Index dim = demos.front().dim();
  const Eigen::VectorXd goal =
      motion.goal.size() ? motion.goal : Eigen::VectorXd(Eigen::VectorXd::Zero(dim));

  MetricsReport& report = result.report;
  report.motion = motion.name;
  report.backend = std::string(to_string(config.training.backend.kind));
  if (motion.demos.size() < static_cast<std::size_t>(config.demos_used))
    report.notes.push_back("only " + std::to_string(motion.demos.size()) +
                           " demonstrations available");
  for (std::size_t d = 0; d < demos.size(); ++d)
    if (auto r = goal_residual(demos[d]))
      report.notes.push_back("demo " + std::to_string(d) + " ends " +
                             detail::format_double(*r) + " from the goal");

  const TrainingSet pairs = build_training_pairs(demos, config.training.gains);

  std::vector<std::optional<int>> ks;
  if (config.training.backend.kind == Backend::gmr) {
    for (int k : config.k_candidates) ks.emplace_back(k);
  } else {
    ks.emplace_back(std::nullopt);
  }

  std::vector<std::optional<Candidate>> candidates(ks.size());
  std::vector<std::string> errors(ks.size());
  parallel_for(ks.size(), config.jobs, [&](std::size_t i) {
    try {
      candidates[i] = fit_candidate(config, demos, pairs, goal, ks[i]);
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });

  // Selection: minimum SEA; V_rmse when SEA is undefined (n != 2).
  std::optional<std::size_t> best;
  double best_score = std::numeric_limits<double>::infinity();
  std::string last_error;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (!candidates[i]) {
      last_error = errors[i];
      report.notes.push_back((ks[i] ? "K=" + std::to_string(*ks[i]) : std::string("fit")) +
                             " failed: " + errors[i]);
      continue;
    }
    auto& c = *candidates[i];
    double score = c.sea;
    if (dim != 2) {
      const StabilizedDS ds(c.model, c.s_bar, config.training.gains, goal);
      score = vrmse(demos, ds.with_tank(config.tank_in_vrmse)).total;
    }
    if (c.k) report.sea_by_k.emplace_back(*c.k, c.sea);
    if (score < best_score || !best) {
      best_score = score;
      best = i;
    }
  }
  if (!best) throw Error("motion '" + motion.name + "': every fit failed: " + last_error);
  if (dim != 2) report.notes.push_back("SEA undefined for n != 2; K selected by V_rmse");

  Candidate& c = *candidates[*best];
  const StabilizedDS ds(c.model, c.s_bar, config.training.gains, goal);
  report.k_selected = c.k;
  report.s_bar = c.s_bar;
  report.training_time = c.fit_seconds;
  report.sea = c.sea;
  report.sea_per_demo = c.sea_per_demo;
  const VrmseResult v = vrmse(demos, ds.with_tank(config.tank_in_vrmse));
  report.vrmse = v.total;
  report.vrmse_per_demo = v.per_demo;
  for (const auto& r : c.rollouts) {
    report.converged.push_back(r.converged);
    report.rollout_steps.push_back(r.steps);
  }
  report.audit = combine_audits(c.rollouts, ds, config.conv_tol);

  result.ds = ds;
  result.rollouts = std::move(c.rollouts);
  return result;
}

Aggregate aggregate(std::span<const double> values) {
  if (values.empty()) throw InvalidParameter("aggregate: no values");
  Aggregate a{0.0, values.front(), values.front()};
  for (double v : values) {
    a.mean += v;
    a.min = std::min(a.min, v);
    a.max = std::max(a.max, v);
  }
  a.mean /= static_cast<double>(values.size());
  return a;
}

CorpusSummary run_corpus(const RunConfig& config) {
  config.validate();
  const auto dirs = list_motion_dirs(config.corpus);
  if (dirs.empty()) throw Error("no motions found under " + config.corpus.string());

  const bool write = !config.output_dir.empty();
  if (write)
    for (const char* sub : {"rollouts", "plots", "models"})
      fs::create_directories(config.output_dir / sub);

  RunConfig inner = config;
  inner.jobs = std::max(1, config.jobs / static_cast<int>(dirs.size()));
  const int outer_jobs = std::max(1, config.jobs / inner.jobs);

  std::vector<std::optional<MetricsReport>> reports(dirs.size());
  std::vector<std::optional<MotionFailure>> failures(dirs.size());
  parallel_for(dirs.size(), outer_jobs, [&](std::size_t i) {
    std::string name = dirs[i].filename().string();
    try {
      const Motion motion = read_motion(dirs[i]);
      name = motion.name;
      MotionResult r = run_motion(inner, motion);
      if (write) {
        const std::string stem = safe_name(motion.name);
        for (std::size_t d = 0; d < r.rollouts.size(); ++d) {
          std::ostringstream csv;
          write_rollout_csv(r.rollouts[d], csv);
          write_text(config.output_dir / "rollouts" / (stem + "_demo" + std::to_string(d) + ".csv"),
                     csv.str());
        }
        write_text(config.output_dir / "models" / (stem + ".json"),
                   model_to_json(r.ds->model()).dump(2) + "\n");
        PlotInput plot;
        plot.title = motion.name;
        plot.ds = &*r.ds;
        for (const auto& d : r.demos)
          plot.demos.push_back(d.positions.rowwise() + r.ds->goal().transpose());
        for (const auto& ro : r.rollouts) plot.rollouts.push_back(ro.state_matrix());
        if (auto svg = plot_motion(plot))
          write_text(config.output_dir / "plots" / (stem + ".svg"), *svg);
        else
          r.report.notes.push_back("plot skipped: motion is not 2-D");
      }
      reports[i] = std::move(r.report);
    } catch (const std::exception& e) {
      failures[i] = MotionFailure{name, e.what()};
    }
  });

  CorpusSummary summary;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    if (reports[i]) summary.reports.push_back(std::move(*reports[i]));
    if (failures[i]) summary.failures.push_back(std::move(*failures[i]));
  }
  summary.sea = aggregate_finite(summary.reports, &MetricsReport::sea);
  summary.vrmse = aggregate_finite(summary.reports, &MetricsReport::vrmse);
  summary.training_time = aggregate_finite(summary.reports, &MetricsReport::training_time);

  if (write) {
    write_text(config.output_dir / "report.json", summary_json(summary, config).dump(2) + "\n");
    write_text(config.output_dir / "report.csv", summary_csv(summary));
    json timing = json::object();
    for (const auto& r : summary.reports) timing[r.motion] = r.training_time;
    write_text(config.output_dir / "timing.json",
               json{{"training_time", timing},
                    {"aggregate", aggregate_json(summary.training_time)}}
                       .dump(2) + "\n");
  }
  return summary;
}

json summary_json(const CorpusSummary& s, const RunConfig& config) {
  json motions = json::array();
  for (const auto& r : s.reports) motions.push_back(to_json(r));
  json failures = json::array();
  for (const auto& f : s.failures) failures.push_back({{"motion", f.motion}, {"error", f.error}});
  return {{"config", to_json(config)},
          {"motions", motions},
          {"failures", failures},
          {"aggregate", {{"sea", aggregate_json(s.sea)}, {"vrmse", aggregate_json(s.vrmse)}}}};
}

std::string summary_csv(const CorpusSummary& s) {
  std::ostringstream out;
  out << "motion,backend,k,sea,vrmse,training_time,s_bar,converged\n";
  for (const auto& r : s.reports) {
    const bool conv = std::all_of(r.converged.begin(), r.converged.end(), [](bool b) { return b; });
    out << r.motion << ',' << r.backend << ',' << (r.k_selected ? std::to_string(*r.k_selected) : "")
        << ',' << csv_num(r.sea) << ',' << csv_num(r.vrmse) << ',' << csv_num(r.training_time) << ','
        << csv_num(r.s_bar) << ',' << (conv ? 1 : 0) << '\n';
  }
  const std::pair<const char*, double Aggregate::*> rows[] = {
      {"mean", &Aggregate::mean}, {"min", &Aggregate::min}, {"max", &Aggregate::max}};
  for (const auto& [label, field] : rows) {
    auto cell = [&](const std::optional<Aggregate>& a) { return a ? csv_num((*a).*field) : ""; };
    out << label << ",,," << cell(s.sea) << ',' << cell(s.vrmse) << ',' << cell(s.training_time)
        << ",,\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------

SweepResult sweep_storage(const RunConfig& config, const Motion& motion,
                          std::span<const double> s_bar_values) {
  config.validate();
  if (s_bar_values.empty()) throw InvalidParameter("sweep_storage: no s_bar values");
  for (double v : s_bar_values)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw InvalidParameter("sweep_storage: s_bar values must be finite and nonnegative");

  const std::vector<Demonstration> demos = preprocess(motion, config);
  const Eigen::Index dim = demos.front().dim();
  const Eigen::VectorXd goal =
      motion.goal.size() ? motion.goal : Eigen::VectorXd(Eigen::VectorXd::Zero(dim));

  SweepResult out;
  out.motion = motion.name;
  if (config.training.backend.kind == Backend::gmr) out.k = config.k_candidates.front();
  const TrainingSet pairs = build_training_pairs(demos, config.training.gains);
  const RegressorPtr model = fit_backend(pairs, spec_for(config, out.k));
  out.estimate = estimate_storage_cap(demos, *model, config.training.gains);

  out.rows.resize(s_bar_values.size());
  parallel_for(s_bar_values.size(), config.jobs, [&](std::size_t i) {
    SweepRow& row = out.rows[i];
    row.s_bar = s_bar_values[i];
    const StabilizedDS ds(model, row.s_bar, config.training.gains, goal);
    const auto rollouts = rollouts_from_starts(ds, demos, config.integrate_options());
    row.sea = kNaN;
    if (dim == 2) {
      row.sea = 0.0;
      for (double v : sea_per_demo(demos, rollouts)) row.sea += v;
    }
    row.all_converged = std::all_of(rollouts.begin(), rollouts.end(),
                                    [](const Rollout& r) { return r.converged; });
    row.min_tank_fraction = 1.0;
    for (const auto& r : rollouts) {
      const double r0 = (r.states.front() - r.goal).norm();
      for (std::size_t k = 0; k < r.states.size(); ++k) {
        const double rk = (r.states[k] - r.goal).norm();
        if (rk < 0.05 * r0) break;
        const double cap = kappa(rk, config.training.gains) * row.s_bar;
        if (cap > 0.0) row.min_tank_fraction = std::min(row.min_tank_fraction, r.tank[k] / cap);
      }
    }
  });
  return out;
}

json to_json(const SweepResult& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"s_bar", row.s_bar},
                    {"sea", row.sea},
                    {"all_converged", row.all_converged},
                    {"min_tank_fraction", row.min_tank_fraction}});
  return {{"motion", r.motion},
          {"estimate", r.estimate},
          {"k", r.k ? json(*r.k) : json(nullptr)},
          {"rows", rows}};
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!first) first = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

}  // namespace tankds
