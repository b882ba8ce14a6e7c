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

#include "tankds/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "format.hpp"
#include "tankds/errors.hpp"

namespace tankds {

StabilizedDS::StabilizedDS(RegressorPtr model, double s_bar, GainParams gains,
                           Eigen::VectorXd goal)
    : model_(std::move(model)), s_bar_(s_bar), gains_(gains), goal_(std::move(goal)) {
  if (!model_ || !model_->fitted()) throw NotFitted("StabilizedDS: model is not fitted");
  if (!(s_bar_ >= 0.0)) throw InvalidParameter("StabilizedDS: s_bar must be nonnegative");
  gains_.validate();
  if (goal_.size() == 0) goal_ = Eigen::VectorXd::Zero(model_->dim());
  if (goal_.size() != model_->dim())
    throw DimensionMismatch("StabilizedDS: goal dimension differs from model dimension");
}

StabilizedDS StabilizedDS::with_s_bar(double s_bar) const {
  StabilizedDS out = *this;
  if (!(s_bar >= 0.0)) throw InvalidParameter("StabilizedDS: s_bar must be nonnegative");
  out.s_bar_ = s_bar;
  return out;
}

StabilizedDS StabilizedDS::with_goal(Eigen::VectorXd goal) const {
  return StabilizedDS(model_, s_bar_, gains_, std::move(goal)).with_tank(tank_enabled_);
}

StabilizedDS StabilizedDS::with_tank(bool enabled) const {
  StabilizedDS out = *this;
  out.tank_enabled_ = enabled;
  return out;
}

VelocityEval esds_velocity(const StabilizedDS& ds, const Eigen::Ref<const Eigen::VectorXd>& x,
                           const TankState& tank) {
  const GainParams& p = ds.gains();
  VelocityEval out;
  out.f = ds.model().predict(x);
  if (!out.f.allFinite())
    throw NumericalError("esds_velocity: " + std::string(ds.model().backend()) +
                         " backend returned a non-finite field value");
  const double k = kappa(x.norm(), p);
  out.z = k * x.dot(out.f);
  out.gamma = ds.tank_enabled() ? gamma_gain(out.z, tank.s, k * tank.s_bar, p) : 1.0;
  out.xdot = -x + (out.gamma * k) * out.f;
  return out;
}

StorageRate storage_rate(const TankState& tank, const Eigen::Ref<const Eigen::VectorXd>& x,
                         const Eigen::Ref<const Eigen::VectorXd>& xdot, double z,
                         const GainParams& params) {
  StorageRate r;
  r.cap = kappa(x.norm(), params) * tank.s_bar;
  r.alpha = alpha_gain(tank.s, r.cap, params);
  r.beta = beta_gain(z, tank.s, r.cap, params);
  r.nominal = r.alpha * x.squaredNorm() - r.beta * z;
  r.cap_rate = kappa_dot(x, xdot, params) * tank.s_bar;
  // Storage sitting at the cap follows the cap down when the cap shrinks
  // faster than the nominal rate would empty the storage.
  if (tank.s >= r.cap && r.nominal > r.cap_rate && r.cap_rate < 0.0) {
    r.rate = r.cap_rate;
    r.branch = StorageBranch::follow_cap;
  } else {
    r.rate = r.nominal;
    r.branch = StorageBranch::nominal;
  }
  return r;
}

TankState tank_step(const TankState& tank, const Eigen::Ref<const Eigen::VectorXd>& x,
                    const Eigen::Ref<const Eigen::VectorXd>& xdot, double z, double dt,
                    const GainParams& params) {
  if (!(dt > 0.0)) throw InvalidParameter("tank_step: dt must be positive");
  const StorageRate r = storage_rate(tank, x, xdot, z, params);
  const double cap_next = kappa((x + dt * xdot).norm(), params) * tank.s_bar;
  TankState next = tank;
  next.s = std::clamp(tank.s + r.rate * dt, 0.0, cap_next);
  return next;
}

TankState init_tank(const Eigen::Ref<const Eigen::VectorXd>& x0, double s_bar,
                    const GainParams& params) {
  if (!(s_bar >= 0.0)) throw InvalidParameter("init_tank: s_bar must be nonnegative");
  return {kappa(x0.norm(), params) * s_bar, s_bar};
}

Eigen::MatrixXd Rollout::state_matrix() const {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(states.size()), goal.size());
  for (std::size_t i = 0; i < states.size(); ++i)
    m.row(static_cast<Eigen::Index>(i)) = states[i].transpose();
  return m;
}

Rollout integrate(const StabilizedDS& ds, const Eigen::Ref<const Eigen::VectorXd>& x0,
                  const IntegrateOptions& options) {
  if (!(options.dt > 0.0)) throw InvalidParameter("integrate: dt must be positive");
  if (options.max_steps < 0) throw InvalidParameter("integrate: max_steps must be nonnegative");
  if (x0.size() != ds.dim())
    throw DimensionMismatch("integrate: initial state has dimension " +
                            std::to_string(x0.size()) + ", system " + std::to_string(ds.dim()));
  if (!x0.allFinite()) throw InvalidParameter("integrate: initial state is not finite");

  const GainParams& p = ds.gains();
  Rollout out;
  out.goal = ds.goal();
  out.dt = options.dt;
  out.s_bar = ds.s_bar();

  Eigen::VectorXd y = x0 - ds.goal();
  TankState tank = init_tank(y, ds.s_bar(), p);

  for (long k = 0;; ++k) {
    const VelocityEval eval = esds_velocity(ds, y, tank);
    out.times.push_back(static_cast<double>(k) * options.dt);
    out.states.push_back(y + ds.goal());
    out.velocities.push_back(eval.xdot);
    out.tank.push_back(tank.s);
    out.gamma.push_back(eval.gamma);
    out.lyapunov.push_back(0.5 * y.squaredNorm() + tank.s);
    out.steps = k;

    if (y.norm() < options.conv_tol) {
      out.converged = true;
      break;
    }
    if (k >= options.max_steps) break;

    tank = tank_step(tank, y, eval.xdot, eval.z, options.dt, p);
    y += options.dt * eval.xdot;
    if (!y.allFinite() || !std::isfinite(tank.s))
      throw DivergenceError("integrate: non-finite state at step " + std::to_string(k + 1) +
                                " (this is a bug: the stabilized system cannot diverge)",
                            k + 1);
  }
  return out;
}

AuditReport lyapunov_audit(const Rollout& rollout, const StabilizedDS& ds, double conv_tol) {
  const GainParams& p = ds.gains();
  AuditReport report;
  const std::size_t n = rollout.states.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Eigen::VectorXd y = rollout.states[k] - rollout.goal;
    const double cap = kappa(y.norm(), p) * rollout.s_bar;
    const double s = rollout.tank[k];
    report.max_tank_violation = std::max({report.max_tank_violation, -s, s - cap});
    if (k + 1 == n) break;

    report.max_lyapunov_increase =
        std::max(report.max_lyapunov_increase, rollout.lyapunov[k + 1] - rollout.lyapunov[k]);

    const TankState tank{s, rollout.s_bar};
    const VelocityEval eval = esds_velocity(ds, y, tank);
    const StorageRate rate = storage_rate(tank, y, eval.xdot, eval.z, p);
    const double r2 = y.squaredNorm();
    // A binding upper clamp makes the step follow the cap.
    const double next_cap = kappa((y + eval.xdot * rollout.dt).norm(), p) * rollout.s_bar;
    const bool clamped = s + rate.rate * rollout.dt > next_cap;
    const double vdot =
        rate.branch == StorageBranch::nominal && !clamped
            ? -(1.0 - rate.alpha) * r2 + (eval.gamma - rate.beta) * eval.z
            : -r2 + eval.gamma * eval.z + rate.cap_rate;
    const double fd = (rollout.lyapunov[k + 1] - rollout.lyapunov[k]) / rollout.dt;
    report.max_vdot_discrepancy = std::max(report.max_vdot_discrepancy, std::abs(vdot - fd));

    ++report.steps_checked;
    if (y.norm() >= conv_tol && vdot > 0.0) {
      ++report.positive_vdot_steps;
      report.max_positive_vdot = std::max(report.max_positive_vdot, vdot);
    }
  }
  return report;
}

void write_rollout_csv(const Rollout& rollout, std::ostream& out) {
  const Eigen::Index n = rollout.goal.size();
  out << 't';
  for (Eigen::Index i = 1; i <= n; ++i) out << ",x" << i;
  for (Eigen::Index i = 1; i <= n; ++i) out << ",v" << i;
  out << ",s,gamma,V_s\n";
  for (std::size_t k = 0; k < rollout.states.size(); ++k) {
    out << detail::format_double(rollout.times[k]);
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << detail::format_double(rollout.states[k](i));
    for (Eigen::Index i = 0; i < n; ++i)
      out << ',' << detail::format_double(rollout.velocities[k](i));
    out << ',' << detail::format_double(rollout.tank[k]) << ','
        << detail::format_double(rollout.gamma[k]) << ','
        << detail::format_double(rollout.lyapunov[k]) << '\n';
  }
}

}  // namespace tankds
