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

#include "tankds/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tankds/errors.hpp"

namespace tankds {

Eigen::MatrixXd resample_equidistant(const Eigen::MatrixXd& path, Eigen::Index T) {
  const Eigen::Index n = path.rows();
  if (n < 1) throw InvalidParameter("resample_equidistant: empty path");
  if (T < 2) throw InvalidParameter("resample_equidistant: T must be at least 2");

  std::vector<double> cum(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index i = 1; i < n; ++i)
    cum[i] = cum[i - 1] + (path.row(i) - path.row(i - 1)).norm();
  const double total = cum.back();

  Eigen::MatrixXd out(T, path.cols());
  if (!(total > 0.0)) {
    out.rowwise() = path.row(0);
    return out;
  }
  out.row(0) = path.row(0);
  out.row(T - 1) = path.row(n - 1);
  std::size_t seg = 1;
  for (Eigen::Index j = 1; j + 1 < T; ++j) {
    const double target = total * static_cast<double>(j) / static_cast<double>(T - 1);
    while (seg + 1 < cum.size() && cum[seg] < target) ++seg;
    const double len = cum[seg] - cum[seg - 1];
    const double u = len > 0.0 ? std::clamp((target - cum[seg - 1]) / len, 0.0, 1.0) : 0.0;
    out.row(j) = (1.0 - u) * path.row(static_cast<Eigen::Index>(seg) - 1) +
                 u * path.row(static_cast<Eigen::Index>(seg));
  }
  return out;
}

double tetragon_area(const Eigen::Ref<const Eigen::VectorXd>& e_t,
                     const Eigen::Ref<const Eigen::VectorXd>& e_next,
                     const Eigen::Ref<const Eigen::VectorXd>& d_t,
                     const Eigen::Ref<const Eigen::VectorXd>& d_next) {
  if (e_t.size() != 2 || e_next.size() != 2 || d_t.size() != 2 || d_next.size() != 2)
    throw DimensionMismatch("tetragon_area: swept error area is defined for 2-D points only");
  const Eigen::Vector2d p[4] = {e_t, e_next, d_next, d_t};
  double twice = 0.0;
  for (int i = 0; i < 4; ++i) {
    const auto& a = p[i];
    const auto& b = p[(i + 1) % 4];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * std::abs(twice);
}

double swept_error_area(const Eigen::MatrixXd& demo, const Eigen::MatrixXd& reproduction) {
  if (demo.rows() != reproduction.rows() || demo.cols() != reproduction.cols())
    throw DimensionMismatch("sea: reproduction has " + std::to_string(reproduction.rows()) +
                            " samples, demonstration " + std::to_string(demo.rows()));
  double area = 0.0;
  for (Eigen::Index t = 0; t + 1 < demo.rows(); ++t)
    area += tetragon_area(reproduction.row(t).transpose(), reproduction.row(t + 1).transpose(),
                          demo.row(t).transpose(), demo.row(t + 1).transpose());
  return area;
}

double sea(std::span<const Eigen::MatrixXd> demos, std::span<const Eigen::MatrixXd> reproductions) {
  if (demos.size() != reproductions.size())
    throw DimensionMismatch("sea: " + std::to_string(demos.size()) + " demonstrations but " +
                            std::to_string(reproductions.size()) + " reproductions");
  double total = 0.0;
  for (std::size_t d = 0; d < demos.size(); ++d)
    total += swept_error_area(demos[d], reproductions[d]);
  return total;
}

VrmseResult vrmse(std::span<const Demonstration> demos, const StabilizedDS& ds) {
  const GainParams& p = ds.gains();
  VrmseResult out;
  for (const auto& demo : demos) {
    if (!demo.velocities) throw InvalidParameter("vrmse: demonstration lacks velocities");
    if (demo.dim() != ds.dim()) throw DimensionMismatch("vrmse: dimension mismatch");
    const Eigen::Index T = demo.size();
    TankState tank = init_tank(demo.positions.row(0).transpose(), ds.s_bar(), p);
    double sq = 0.0;
    for (Eigen::Index t = 0; t < T; ++t) {
      const Eigen::VectorXd x = demo.positions.row(t).transpose();
      const VelocityEval eval = esds_velocity(ds, x, tank);
      sq += (demo.velocities->row(t).transpose() - eval.xdot).squaredNorm();
      if (t + 1 < T) {
        tank = tank_step(tank, x, eval.xdot, eval.z, demo.times(t + 1) - demo.times(t), p);
        // The tank follows the demonstrated state, not the Euler prediction.
        const double cap = kappa(demo.positions.row(t + 1).norm(), p) * ds.s_bar();
        tank.s = std::min(tank.s, cap);
      }
    }
    out.per_demo.push_back(std::sqrt(sq / static_cast<double>(T)));
    out.total += out.per_demo.back();
  }
  return out;
}

nlohmann::json to_json(const MetricsReport& r) {
  nlohmann::json by_k = nlohmann::json::array();
  for (const auto& [k, v] : r.sea_by_k) by_k.push_back({{"k", k}, {"sea", v}});
  return {{"motion", r.motion},
          {"backend", r.backend},
          {"sea", r.sea},
          {"vrmse", r.vrmse},
          {"sea_per_demo", r.sea_per_demo},
          {"vrmse_per_demo", r.vrmse_per_demo},
          {"converged", r.converged},
          {"rollout_steps", r.rollout_steps},
          {"k_selected", r.k_selected ? nlohmann::json(*r.k_selected) : nlohmann::json(nullptr)},
          {"sea_by_k", by_k},
          {"s_bar", r.s_bar},
          {"audit",
           {{"max_lyapunov_increase", r.audit.max_lyapunov_increase},
            {"max_tank_violation", r.audit.max_tank_violation},
            {"max_vdot_discrepancy", r.audit.max_vdot_discrepancy},
            {"positive_vdot_fraction", r.audit.positive_vdot_fraction}}},
          {"notes", r.notes}};
}

}  // namespace tankds
