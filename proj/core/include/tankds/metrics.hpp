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
#include <nlohmann/json.hpp>

#include "tankds/dynamics.hpp"
#include "tankds/training.hpp"

namespace tankds {

/// T points at equal arc-length spacing along the polyline through the rows
/// of `path`. Endpoints are kept; a zero-length path yields T copies.
Eigen::MatrixXd resample_equidistant(const Eigen::MatrixXd& path, Eigen::Index T);

/// Area of the quadrilateral e_t -> e_next -> d_next -> d_t, i.e. the
/// strip between one segment of the reproduction and the matching segment
/// of the demonstration. Points must be 2-D.
double tetragon_area(const Eigen::Ref<const Eigen::VectorXd>& e_t,
                     const Eigen::Ref<const Eigen::VectorXd>& e_next,
                     const Eigen::Ref<const Eigen::VectorXd>& d_t,
                     const Eigen::Ref<const Eigen::VectorXd>& d_next);

/// Swept error area of one demonstration/reproduction pair of equal length.
double swept_error_area(const Eigen::MatrixXd& demo, const Eigen::MatrixXd& reproduction);

/// Sum of swept_error_area over demonstrations. Reproductions must already
/// be resampled to their demonstration's length.
double sea(std::span<const Eigen::MatrixXd> demos, std::span<const Eigen::MatrixXd> reproductions);

struct VrmseResult {
  double total = 0.0;
  std::vector<double> per_demo;
};

/// Velocity RMSE of the stabilized field at demonstrated states, summed over
/// demonstrations. The tank starts at kappa(|x_1|) s_bar and is evolved along
/// the demonstrated states with the demonstration's timestamps.
VrmseResult vrmse(std::span<const Demonstration> demos, const StabilizedDS& ds);

struct AuditSummary {
  double max_lyapunov_increase = 0.0;
  double max_tank_violation = 0.0;
  double max_vdot_discrepancy = 0.0;
  double positive_vdot_fraction = 0.0;
};

/// Reproduction accuracy of one motion.
struct MetricsReport {
  std::string motion;
  std::string backend;
  double sea = 0.0;   ///< [length^2]
  double vrmse = 0.0; ///< [length/s]
  std::vector<double> sea_per_demo;
  std::vector<double> vrmse_per_demo;
  std::vector<bool> converged;
  std::vector<long> rollout_steps;
  double training_time = 0.0;  ///< wall clock of the selected fit [s]
  std::optional<int> k_selected;
  std::vector<std::pair<int, double>> sea_by_k;
  double s_bar = 0.0;
  AuditSummary audit;
  std::vector<std::string> notes;
};

/// Deterministic fields only; wall-clock timing is reported separately.
nlohmann::json to_json(const MetricsReport& report);

}  // namespace tankds
