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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tankds/regression.hpp"
#include "tankds/smooth_gains.hpp"

namespace tankds {

/// One demonstrated motion: T timestamped samples in n dimensions.
///
/// Positions are absolute while `goal` is empty. After translate_to_goal
/// they are expressed relative to `goal`, so the target sits at the origin.
struct Demonstration {
  Eigen::VectorXd times;                      ///< strictly increasing [s]
  Eigen::MatrixXd positions;                  ///< T x n
  std::optional<Eigen::MatrixXd> velocities;  ///< T x n [units/s]
  Eigen::VectorXd goal;                       ///< attractor the positions are relative to

  Eigen::Index size() const { return positions.rows(); }
  Eigen::Index dim() const { return positions.cols(); }
  bool translated() const { return goal.size() > 0; }

  /// Throws InvalidParameter / DimensionMismatch on malformed data.
  void validate() const;
};

/// Everything needed to turn demonstrations into a stabilized system.
struct TrainingConfig {
  GainParams gains;
  double dt = 0.01;                  ///< integration step [s]
  Eigen::Index downsample_T = 100;   ///< samples kept per demonstration
  std::optional<double> s_bar_override;  ///< fixed cap instead of the estimate [J]
  double s_bar_multiplier = 1.0;     ///< applied to the estimated cap
  BackendSpec backend;

  void validate() const;
};

/// Re-expresses positions relative to `goal`. Idempotent for a fixed goal;
/// a demonstration already relative to another goal is shifted accordingly.
Demonstration translate_to_goal(const Demonstration& demo, const Eigen::VectorXd& goal);

/// Three-point differences on the actual timestamps (exact for quadratics),
/// one-sided at the ends. Velocities that are already present are kept.
Demonstration finite_diff_velocities(const Demonstration& demo);

/// Keeps T samples at equispaced indices, first and last included.
Demonstration downsample(const Demonstration& demo, Eigen::Index T);

/// Distance of the final sample from the origin when it exceeds `fraction`
/// of the arc length; std::nullopt otherwise.
std::optional<double> goal_residual(const Demonstration& demo, double fraction = 0.02);

/// Inputs are positions, targets kappa_inv(|x|) (xdot + x), concatenated
/// across demonstrations in order.
TrainingSet build_training_pairs(std::span<const Demonstration> demos,
                                 const GainParams& params = {});

/// Inverse of the target transform: xdot = -x + kappa(|x|) target.
Eigen::VectorXd reconstruct_velocity(const Eigen::Ref<const Eigen::VectorXd>& x,
                                     const Eigen::Ref<const Eigen::VectorXd>& target,
                                     const GainParams& params = {});

/// Energy the fitted field extracts along each demonstration: the sum of
/// max(0, z_t) dt_t with z_t = kappa(|x_t|) x_t^T f(x_t) and dt_t the
/// forward timestamp gap (the last sample reuses the previous gap).
std::vector<double> extracted_energy(std::span<const Demonstration> demos,
                                     const Regressor& model, const GainParams& params = {});

/// Storage cap s_bar: the largest per-demonstration extracted energy.
double estimate_storage_cap(std::span<const Demonstration> demos, const Regressor& model,
                            const GainParams& params = {});

}  // namespace tankds
