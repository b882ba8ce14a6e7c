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

#include <Eigen/Core>

namespace tankds {

/// Tuning of the radial gate and the tank gain functions.
///
/// Defaults are the values of the reference formulation: kappa(r) =
/// 1 - exp(-0.1 r^2), tank bands at 10% and 90% of the cap, alpha clamped
/// to 0.99, and a +-0.01 smoothing band on the power term.
struct GainParams {
  double a = 0.1;           ///< radial gate sharpness [1/length^2]
  double z_band = 0.01;     ///< smoothing half-width on z [power units]
  double s_lo_frac = 0.1;   ///< lower tank band, fraction of cap
  double s_hi_frac = 0.9;   ///< upper tank band, fraction of cap
  double alpha_max = 0.99;  ///< strict upper bound on alpha

  /// Throws InvalidParameter when an invariant is violated.
  void validate() const;
};

/// Sinusoidal smooth step: 0 below lo, 1 above hi, C1 in between.
/// Throws InvalidParameter when lo >= hi.
double h1(double x, double lo, double hi);

/// Complement of h1.
double h2(double x, double lo, double hi);

/// Radial gate 1 - exp(-a r^2). Throws InvalidParameter when r < 0.
double kappa(double r, const GainParams& params = {});

/// 1/kappa(r) away from the origin, exactly 1 at r == 0.
double kappa_inv(double r, const GainParams& params = {});

/// Time derivative of kappa(|x|) along xdot.
double kappa_dot(const Eigen::Ref<const Eigen::VectorXd>& x,
                 const Eigen::Ref<const Eigen::VectorXd>& xdot,
                 const GainParams& params = {});

/// Power injected by the nonlinear field: kappa(|x|) x^T f.
double z_power(const Eigen::Ref<const Eigen::VectorXd>& x,
               const Eigen::Ref<const Eigen::VectorXd>& f_val,
               const GainParams& params = {});

// The three gains take the current cap = kappa(|x|) * s_bar from the caller.
// A zero cap (at the goal, or with an empty tank budget) collapses every band
// to a point; the step limits used there are documented in smooth_gains.cpp.

double alpha_gain(double s, double cap, const GainParams& params = {});
double beta_gain(double z, double s, double cap, const GainParams& params = {});
double gamma_gain(double z, double s, double cap, const GainParams& params = {});

}  // namespace tankds
