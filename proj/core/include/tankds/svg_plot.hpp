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
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tankds/dynamics.hpp"

namespace tankds {

struct Arrow {
  Eigen::Vector2d base;
  Eigen::Vector2d velocity;
};

/// Velocities on an nx x ny grid spanning [lo, hi] (world coordinates),
/// each evaluated with a full tank s = kappa(|x - goal|) s_bar.
std::vector<Arrow> field_arrows(const StabilizedDS& ds, const Eigen::Vector2d& lo,
                                const Eigen::Vector2d& hi, int nx, int ny);

struct PlotInput {
  std::string title;
  std::vector<Eigen::MatrixXd> demos;     ///< world coordinates, one point per row
  std::vector<Eigen::MatrixXd> rollouts;  ///< world coordinates
  const StabilizedDS* ds = nullptr;       ///< arrow layer when set
  int grid = 15;
};

/// Demonstration points, reproduction polylines and a velocity arrow grid as
/// an SVG document. Returns std::nullopt for non-2-D data. Output is a pure
/// function of the input.
std::optional<std::string> plot_motion(const PlotInput& input);

}  // namespace tankds
