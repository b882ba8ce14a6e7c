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

#include "tankds/training.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tankds/errors.hpp"

namespace tankds {

void TrainingConfig::validate() const {
  gains.validate();
  if (!(dt > 0.0)) throw InvalidParameter("TrainingConfig: dt must be positive");
  if (downsample_T < 2) throw InvalidParameter("TrainingConfig: downsample_T must be >= 2");
  if (s_bar_override && !(*s_bar_override >= 0.0))
    throw InvalidParameter("TrainingConfig: s_bar override must be nonnegative");
  if (!(s_bar_multiplier >= 0.0))
    throw InvalidParameter("TrainingConfig: s_bar multiplier must be nonnegative");
}

void Demonstration::validate() const {
  if (times.size() != positions.rows())
    throw DimensionMismatch("Demonstration: " + std::to_string(times.size()) +
                            " timestamps for " + std::to_string(positions.rows()) + " samples");
  if (positions.rows() < 1 || positions.cols() < 1)
    throw InvalidParameter("Demonstration: no samples");
  if (!positions.allFinite() || !times.allFinite())
    throw InvalidParameter("Demonstration: non-finite samples");
  for (Eigen::Index i = 1; i < times.size(); ++i)
    if (!(times(i) > times(i - 1)))
      throw InvalidParameter("Demonstration: timestamps are not strictly increasing at sample " +
                             std::to_string(i));
  if (velocities) {
    if (velocities->rows() != positions.rows() || velocities->cols() != positions.cols())
      throw DimensionMismatch("Demonstration: velocities do not match positions");
    if (!velocities->allFinite()) throw InvalidParameter("Demonstration: non-finite velocities");
  }
  if (translated() && goal.size() != positions.cols())
    throw DimensionMismatch("Demonstration: goal dimension differs from positions");
}

Demonstration translate_to_goal(const Demonstration& demo, const Eigen::VectorXd& goal) {
  if (goal.size() != demo.dim())
    throw DimensionMismatch("translate_to_goal: goal has dimension " +
                            std::to_string(goal.size()) + ", demonstration " +
                            std::to_string(demo.dim()));
  if (!goal.allFinite()) throw InvalidParameter("translate_to_goal: goal is not finite");
  Demonstration out = demo;
  if (!demo.translated()) {
    out.positions = demo.positions.rowwise() - goal.transpose();
  } else if (demo.goal != goal) {
    out.positions = (demo.positions.rowwise() + demo.goal.transpose()).rowwise() -
                    goal.transpose();
  }
  out.goal = goal;
  return out;
}

Demonstration finite_diff_velocities(const Demonstration& demo) {
  if (demo.velocities) return demo;
  const Eigen::Index n = demo.size();
  if (n < 3) throw InvalidParameter("finite_diff_velocities: need at least 3 samples");

  const auto& t = demo.times;
  const auto& x = demo.positions;
  Eigen::MatrixXd v(n, demo.dim());
  v.row(0) = (x.row(1) - x.row(0)) / (t(1) - t(0));
  v.row(n - 1) = (x.row(n - 1) - x.row(n - 2)) / (t(n - 1) - t(n - 2));
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    const double hb = t(i) - t(i - 1);
    const double hf = t(i + 1) - t(i);
    v.row(i) = -hf / (hb * (hb + hf)) * x.row(i - 1) + (hf - hb) / (hb * hf) * x.row(i) +
               hb / (hf * (hb + hf)) * x.row(i + 1);
  }
  Demonstration out = demo;
  out.velocities = std::move(v);
  return out;
}

Demonstration downsample(const Demonstration& demo, Eigen::Index T) {
  const Eigen::Index n = demo.size();
  if (T < 2) throw InvalidParameter("downsample: T must be at least 2");
  if (T > n)
    throw InvalidParameter("downsample: cannot keep " + std::to_string(T) + " of " +
                           std::to_string(n) + " samples");
  if (T == n) return demo;

  Demonstration out;
  out.goal = demo.goal;
  out.times.resize(T);
  out.positions.resize(T, demo.dim());
  if (demo.velocities) out.velocities = Eigen::MatrixXd(T, demo.dim());
  for (Eigen::Index i = 0; i < T; ++i) {
    // round(i (n-1) / (T-1)) in integer arithmetic
    const Eigen::Index src = (i * (n - 1) + (T - 1) / 2) / (T - 1);
    out.times(i) = demo.times(src);
    out.positions.row(i) = demo.positions.row(src);
    if (demo.velocities) out.velocities->row(i) = demo.velocities->row(src);
  }
  return out;
}

std::optional<double> goal_residual(const Demonstration& demo, double fraction) {
  double arc = 0.0;
  for (Eigen::Index i = 1; i < demo.size(); ++i)
    arc += (demo.positions.row(i) - demo.positions.row(i - 1)).norm();
  const double residual = demo.positions.row(demo.size() - 1).norm();
  if (residual > fraction * arc) return residual;
  return std::nullopt;
}

TrainingSet build_training_pairs(std::span<const Demonstration> demos, const GainParams& params) {
  if (demos.empty()) throw InvalidParameter("build_training_pairs: no demonstrations");
  Eigen::Index total = 0;
  const Eigen::Index dim = demos.front().dim();
  for (const auto& d : demos) {
    d.validate();
    if (!d.velocities) throw InvalidParameter("build_training_pairs: demonstration lacks velocities");
    if (d.dim() != dim) throw DimensionMismatch("build_training_pairs: mixed dimensions");
    total += d.size();
  }

  TrainingSet set;
  set.inputs.resize(total, dim);
  set.targets.resize(total, dim);
  Eigen::Index row = 0;
  for (const auto& d : demos) {
    for (Eigen::Index i = 0; i < d.size(); ++i, ++row) {
      const auto x = d.positions.row(i);
      set.inputs.row(row) = x;
      set.targets.row(row) = kappa_inv(x.norm(), params) * (d.velocities->row(i) + x);
    }
  }
  return set;
}

Eigen::VectorXd reconstruct_velocity(const Eigen::Ref<const Eigen::VectorXd>& x,
                                     const Eigen::Ref<const Eigen::VectorXd>& target,
                                     const GainParams& params) {
  return -x + kappa(x.norm(), params) * target;
}

std::vector<double> extracted_energy(std::span<const Demonstration> demos,
                                     const Regressor& model, const GainParams& params) {
  if (demos.empty()) throw InvalidParameter("estimate_storage_cap: no demonstrations");
  std::vector<double> energy;
  energy.reserve(demos.size());
  for (const auto& d : demos) {
    d.validate();
    if (d.size() < 2) throw InvalidParameter("estimate_storage_cap: need two samples per demonstration");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      const Eigen::VectorXd x = d.positions.row(i).transpose();
      const double z = z_power(x, model.predict(x), params);
      const double gap = i + 1 < d.size() ? d.times(i + 1) - d.times(i)
                                          : d.times(i) - d.times(i - 1);
      sum += std::max(0.0, z) * gap;
    }
    energy.push_back(sum);
  }
  return energy;
}

double estimate_storage_cap(std::span<const Demonstration> demos, const Regressor& model,
                            const GainParams& params) {
  const auto energy = extracted_energy(demos, model, params);
  return *std::max_element(energy.begin(), energy.end());
}

}  // namespace tankds
