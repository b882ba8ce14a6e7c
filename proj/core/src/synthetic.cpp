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

#include "tankds/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "tankds/errors.hpp"

namespace tankds {
namespace {

constexpr double kPi = std::numbers::pi;

Demonstration make_line(const Eigen::Vector2d& start, Eigen::Index samples) {
  constexpr double kDuration = 6.0;
  Demonstration d;
  d.times.resize(samples);
  d.positions.resize(samples, 2);
  d.velocities = Eigen::MatrixXd(samples, 2);
  for (Eigen::Index i = 0; i < samples; ++i) {
    const double t = kDuration * static_cast<double>(i) / static_cast<double>(samples - 1);
    d.times(i) = t;
    d.positions.row(i) = std::exp(-t) * start.transpose();
    d.velocities->row(i) = -d.positions.row(i);
  }
  return d;
}

// Remaining path fraction w = 1 - u under dw/dt = -eps w / (w + eps):
// nearly constant speed eps while w >> eps, then w ~ exp(-t) near the goal
// so that xdot + x = O(|x|^2). Closed form w + eps ln w = 1 - eps t.
constexpr double kSpeed = 0.1;
constexpr double kEndFraction = 1e-3;

double remaining_fraction(double t) {
  const double rhs = 1.0 - kSpeed * t;
  double w = std::clamp(rhs, kEndFraction * 1e-3, 1.0);
  for (int it = 0; it < 100; ++it) {
    const double g = w + kSpeed * std::log(w) - rhs;
    const double next = std::max(w - g / (1.0 + kSpeed / w), 0.5 * w);
    if (std::abs(next - w) <= 1e-15 * w) return next;
    w = next;
  }
  return w;
}

// Path p(u) from `start` to the origin with `half_waves` half-waves of
// amplitude `amp` perpendicular to it, plus a smooth sine-series wobble that
// vanishes at both ends. Velocities are exact; the last sample is moved onto
// the goal.
Demonstration make_curve(const Eigen::Vector2d& start, double amp, double half_waves,
                         Eigen::Index samples, const Eigen::Matrix<double, 3, 2>& wobble) {
  const double duration = (1.0 - kEndFraction - kSpeed * std::log(kEndFraction)) / kSpeed;
  const Eigen::Vector2d normal = Eigen::Vector2d(-start.y(), start.x()).normalized();

  Demonstration d;
  d.times.resize(samples);
  d.positions.resize(samples, 2);
  d.velocities = Eigen::MatrixXd(samples, 2);
  for (Eigen::Index i = 0; i < samples; ++i) {
    const double t = duration * static_cast<double>(i) / static_cast<double>(samples - 1);
    const double w = remaining_fraction(t);
    const double u = 1.0 - w;
    const double du = kSpeed * w / (w + kSpeed);
    const double k0 = half_waves * kPi;
    Eigen::Vector2d p = w * start + amp * std::sin(k0 * u) * normal;
    Eigen::Vector2d dp = -start + amp * k0 * std::cos(k0 * u) * normal;
    for (int m = 0; m < 3; ++m) {
      const double k = (m + 1) * kPi;
      p += std::sin(k * u) * wobble.row(m).transpose();
      dp += k * std::cos(k * u) * wobble.row(m).transpose();
    }
    d.times(i) = t;
    d.positions.row(i) = p.transpose();
    d.velocities->row(i) = (du * dp).transpose();
  }
  d.positions.row(samples - 1).setZero();
  d.velocities->row(samples - 1).setZero();
  return d;
}

}  // namespace

std::string_view to_string(SynthShape shape) {
  switch (shape) {
    case SynthShape::line: return "line";
    case SynthShape::scurve: return "scurve";
    case SynthShape::arc: return "arc";
  }
  return "unknown";
}

SynthShape parse_synth_shape(std::string_view name) {
  if (name == "line") return SynthShape::line;
  if (name == "scurve") return SynthShape::scurve;
  if (name == "arc") return SynthShape::arc;
  throw InvalidParameter("unknown shape '" + std::string(name) + "' (expected line, scurve or arc)");
}

Motion generate_synthetic(const SynthOptions& options) {
  if (options.samples < 10) throw InvalidParameter("generate_synthetic: need at least 10 samples");
  if (options.demos < 1) throw InvalidParameter("generate_synthetic: need at least one demonstration");
  if (!(options.noise >= 0.0)) throw InvalidParameter("generate_synthetic: noise must be nonnegative");

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Motion motion;
  motion.name = std::string(to_string(options.shape));
  motion.dim = 2;
  motion.goal = Eigen::Vector2d::Zero();

  const Eigen::Vector2d start(-40.0, 0.0);
  for (int d = 0; d < options.demos; ++d) {
    switch (options.shape) {
      case SynthShape::line: {
        const double gx = gauss(rng);
        const double gy = gauss(rng);
        const Eigen::Vector2d s = Eigen::Vector2d(-40.0, 20.0) + options.noise * Eigen::Vector2d(gx, gy);
        motion.demos.push_back(make_line(s, options.samples));
        break;
      }
      case SynthShape::scurve:
      case SynthShape::arc: {
        const double half_waves = options.shape == SynthShape::scurve ? 2.0 : 1.0;
        const double amp = 15.0 + options.noise * gauss(rng);
        Eigen::Matrix<double, 3, 2> wobble;
        for (int m = 0; m < 3; ++m)
          for (int c = 0; c < 2; ++c) wobble(m, c) = 0.2 * options.noise * gauss(rng) / (m + 1);
        motion.demos.push_back(make_curve(start, amp, half_waves, options.samples, wobble));
        break;
      }
    }
    motion.files.push_back("demo_" + std::to_string(d + 1) + ".csv");
  }
  return motion;
}

}  // namespace tankds
