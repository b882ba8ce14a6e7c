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

#include "tankds/smooth_gains.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "tankds/errors.hpp"

namespace tankds {
namespace {

// h1 with the step limit h1(x, c, c) = [x >= c]; only used where a band
// width can legitimately shrink to zero.
double smooth_step(double x, double lo, double hi) {
  if (x >= hi) return 1.0;
  if (x <= lo) return 0.0;
  const double u = (x - lo) / (hi - lo);
  return 0.5 * (1.0 + std::sin(std::numbers::pi * (u - 0.5)));
}

// Bands at s_lo_frac*cap and s_hi_frac*cap are only well separated for a
// normal, positive cap.
bool degenerate_cap(double cap, const GainParams& p) {
  return !(p.s_lo_frac * cap > 0.0) || !(p.s_hi_frac * cap < cap);
}

}  // namespace

void GainParams::validate() const {
  if (!(a > 0.0)) throw InvalidParameter("GainParams: a must be positive");
  if (!(z_band > 0.0)) throw InvalidParameter("GainParams: z_band must be positive");
  if (!(s_lo_frac > 0.0 && s_lo_frac < s_hi_frac && s_hi_frac < 1.0))
    throw InvalidParameter("GainParams: need 0 < s_lo_frac < s_hi_frac < 1");
  if (!(alpha_max > 0.0 && alpha_max < 1.0))
    throw InvalidParameter("GainParams: alpha_max must lie in (0, 1)");
}

double h1(double x, double lo, double hi) {
  if (!(lo < hi))
    throw InvalidParameter("h1: lower bound " + std::to_string(lo) +
                           " is not below upper bound " + std::to_string(hi));
  return smooth_step(x, lo, hi);
}

double h2(double x, double lo, double hi) { return 1.0 - h1(x, lo, hi); }

double kappa(double r, const GainParams& params) {
  if (!(r >= 0.0)) throw InvalidParameter("kappa: radius must be nonnegative");
  return -std::expm1(-params.a * r * r);
}

double kappa_inv(double r, const GainParams& params) {
  const double k = kappa(r, params);
  // k underflows to zero only for r indistinguishable from the origin.
  return k > 0.0 ? 1.0 / k : 1.0;
}

double kappa_dot(const Eigen::Ref<const Eigen::VectorXd>& x,
                 const Eigen::Ref<const Eigen::VectorXd>& xdot,
                 const GainParams& params) {
  if (x.size() != xdot.size())
    throw DimensionMismatch("kappa_dot: state and velocity differ in size");
  return 2.0 * params.a * std::exp(-params.a * x.squaredNorm()) * x.dot(xdot);
}

double z_power(const Eigen::Ref<const Eigen::VectorXd>& x,
               const Eigen::Ref<const Eigen::VectorXd>& f_val,
               const GainParams& params) {
  if (x.size() != f_val.size())
    throw DimensionMismatch("z_power: state has size " + std::to_string(x.size()) +
                            ", field value has size " + std::to_string(f_val.size()));
  return kappa(x.norm(), params) * x.dot(f_val);
}

double alpha_gain(double s, double cap, const GainParams& p) {
  if (degenerate_cap(cap, p)) return 0.0;
  const double up = smooth_step(s, 0.0, p.s_lo_frac * cap);
  const double down = 1.0 - smooth_step(s, p.s_hi_frac * cap, cap);
  return std::min(p.alpha_max, up * down);
}

// With a zero cap every s >= 0 sits both at the cap and at the floor. The
// values below are the cap -> 0+ limits at fixed s > 0, and at s == 0 the
// choice that honours both zero cases of beta at once.
double beta_gain(double z, double s, double cap, const GainParams& p) {
  if (degenerate_cap(cap, p)) {
    return s > 0.0 ? smooth_step(z, 0.0, p.z_band) : 0.0;
  }
  const double empty = 1.0 - smooth_step(s, 0.0, p.s_lo_frac * cap);
  const double full = smooth_step(s, p.s_hi_frac * cap, cap);
  return 1.0 - smooth_step(z, -p.z_band, 0.0) * empty -
         full * (1.0 - smooth_step(z, 0.0, p.z_band));
}

double gamma_gain(double z, double s, double cap, const GainParams& p) {
  if (degenerate_cap(cap, p)) {
    return s > 0.0 ? 1.0 : 1.0 - smooth_step(z, 0.0, p.z_band);
  }
  const double empty = 1.0 - smooth_step(s, 0.0, p.s_lo_frac * cap);
  return 1.0 - smooth_step(z, 0.0, p.z_band) * empty;
}

}  // namespace tankds
