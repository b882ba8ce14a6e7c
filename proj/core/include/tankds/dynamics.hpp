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

#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "tankds/regression.hpp"
#include "tankds/smooth_gains.hpp"

namespace tankds {

/// Virtual energy tank: stored energy s and its cap parameter s_bar [J].
/// Valid for a state x when 0 <= s <= kappa(|x|) s_bar.
struct TankState {
  double s = 0.0;
  double s_bar = 0.0;
};

/// Learned field plus tank parameters: xdot = -x + gamma(z, s) kappa(|x|) f(x)
/// in coordinates relative to `goal`.
class StabilizedDS {
 public:
  StabilizedDS(RegressorPtr model, double s_bar, GainParams gains = {},
               Eigen::VectorXd goal = {});

  const Regressor& model() const { return *model_; }
  const RegressorPtr& model_ptr() const { return model_; }
  double s_bar() const { return s_bar_; }
  const GainParams& gains() const { return gains_; }
  /// Attractor in world coordinates (zero vector by default).
  const Eigen::VectorXd& goal() const { return goal_; }
  Eigen::Index dim() const { return model_->dim(); }

  /// With the tank disabled gamma is pinned to 1, i.e. the raw learned
  /// system without stability guarantee. Used for sensitivity checks only.
  bool tank_enabled() const { return tank_enabled_; }

  StabilizedDS with_s_bar(double s_bar) const;
  StabilizedDS with_goal(Eigen::VectorXd goal) const;
  StabilizedDS with_tank(bool enabled) const;

 private:
  RegressorPtr model_;
  double s_bar_;
  GainParams gains_;
  Eigen::VectorXd goal_;
  bool tank_enabled_ = true;
};

struct VelocityEval {
  Eigen::VectorXd xdot;
  Eigen::VectorXd f;  ///< raw field value
  double z = 0.0;
  double gamma = 1.0;
};

/// Velocity at goal-relative state x. Throws NumericalError when the
/// backend returns a non-finite value.
VelocityEval esds_velocity(const StabilizedDS& ds, const Eigen::Ref<const Eigen::VectorXd>& x,
                           const TankState& tank);

enum class StorageBranch {
  nominal,     ///< sdot = alpha |x|^2 - beta z
  follow_cap,  ///< storage at the cap rides the shrinking cap
};

struct StorageRate {
  double rate = 0.0;
  double nominal = 0.0;   ///< alpha |x|^2 - beta z
  double cap_rate = 0.0;  ///< d/dt kappa(|x|) s_bar
  double cap = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  StorageBranch branch = StorageBranch::nominal;
};

StorageRate storage_rate(const TankState& tank, const Eigen::Ref<const Eigen::VectorXd>& x,
                         const Eigen::Ref<const Eigen::VectorXd>& xdot, double z,
                         const GainParams& params);

/// One explicit Euler step of the storage. The result is clamped to
/// [0, kappa(|x + xdot dt|) s_bar]. Throws InvalidParameter when dt <= 0.
TankState tank_step(const TankState& tank, const Eigen::Ref<const Eigen::VectorXd>& x,
                    const Eigen::Ref<const Eigen::VectorXd>& xdot, double z, double dt,
                    const GainParams& params);

/// s = kappa(|x0|) s_bar.
TankState init_tank(const Eigen::Ref<const Eigen::VectorXd>& x0, double s_bar,
                    const GainParams& params = {});

struct IntegrateOptions {
  double dt = 0.01;
  long max_steps = 100000;
  double conv_tol = 1e-3;
};

/// A co-integrated trajectory. Entry k of every trace belongs to time k*dt;
/// states are in world coordinates.
struct Rollout {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> velocities;
  std::vector<double> tank;
  std::vector<double> gamma;
  std::vector<double> lyapunov;  ///< 0.5 |x - goal|^2 + s
  Eigen::VectorXd goal;
  double dt = 0.0;
  double s_bar = 0.0;
  bool converged = false;
  long steps = 0;

  /// States stacked as rows.
  Eigen::MatrixXd state_matrix() const;
};

/// Explicit Euler on state and tank from (x0, init_tank). Stops once
/// |x - goal| < conv_tol or after max_steps. A non-finite state raises
/// DivergenceError.
Rollout integrate(const StabilizedDS& ds, const Eigen::Ref<const Eigen::VectorXd>& x0,
                  const IntegrateOptions& options = {});

struct AuditReport {
  double max_lyapunov_increase = 0.0;  ///< largest V_s(k+1) - V_s(k), >= 0
  double max_tank_violation = 0.0;     ///< largest excursion outside [0, cap]
  double max_vdot_discrepancy = 0.0;   ///< |analytic - finite difference|
  double max_positive_vdot = 0.0;      ///< largest analytic V_s rate outside the ball
  long positive_vdot_steps = 0;
  long steps_checked = 0;

  double positive_vdot_fraction() const {
    return steps_checked > 0 ? static_cast<double>(positive_vdot_steps) / steps_checked : 0.0;
  }
};

/// Numerical check of the Lyapunov argument along a rollout: V_s jumps,
/// tank bounds, and the closed-form V_s rate of the active storage branch
/// against finite differences. A step whose upper clamp binds counts as
/// following the cap. Steps inside |x| < conv_tol are not counted
/// in the sign summary.
AuditReport lyapunov_audit(const Rollout& rollout, const StabilizedDS& ds,
                           double conv_tol = 1e-3);

/// CSV with header t,x1..xn,v1..vn,s,gamma,V_s.
void write_rollout_csv(const Rollout& rollout, std::ostream& out);

}  // namespace tankds
