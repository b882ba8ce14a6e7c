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

#include <cstdint>
#include <string_view>

#include "tankds/corpus_io.hpp"

namespace tankds {

enum class SynthShape { line, scurve, arc };

std::string_view to_string(SynthShape shape);
SynthShape parse_synth_shape(std::string_view name);

struct SynthOptions {
  SynthShape shape = SynthShape::scurve;
  int demos = 3;
  Eigen::Index samples = 1000;  ///< T, at least 10
  double noise = 0.0;           ///< perturbation scale [length]
  std::uint64_t seed = 0;
};

/// Goal-terminating 2-D motions in millimetre-like units, goal at the origin.
///
/// line:   x(t) = x0 exp(-t) over 6 s; noise moves x0.
/// scurve: one full sine period superimposed on the straight path from
///         (-40, 0); roughly constant speed, exponential approach over the
///         last tenth of the path, last sample on the goal.
/// arc:    half a sine period (single bump) on the same path.
/// All shapes carry exact velocity columns. Curved shapes keep their
/// endpoints fixed; noise perturbs the amplitude and adds a smooth wobble
/// that vanishes at both ends.
Motion generate_synthetic(const SynthOptions& options);

}  // namespace tankds
