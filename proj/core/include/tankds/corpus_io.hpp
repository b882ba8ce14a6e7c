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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tankds/training.hpp"

namespace tankds {

/// One motion: the demonstrations listed by a corpus.json manifest.
struct Motion {
  std::string name;
  Eigen::Index dim = 0;
  Eigen::VectorXd goal;
  std::vector<std::string> files;
  std::vector<Demonstration> demos;  ///< absolute positions, as read
};

/// Demonstration CSV: header t,x1..xn[,v1..vn], one sample per line.
Demonstration read_demonstration_csv(std::istream& in, const std::string& source = "<stream>");
Demonstration read_demonstration_csv(const std::filesystem::path& path);
void write_demonstration_csv(const Demonstration& demo, std::ostream& out);

/// Reads `dir`/corpus.json ({"name", "dim", "goal", "files"}) and every
/// listed file. Throws ParseError on malformed input.
Motion read_motion(const std::filesystem::path& dir);

/// Writes the CSV files and the manifest into `dir` (created if needed).
void write_motion(const Motion& motion, const std::filesystem::path& dir);

/// A directory holding corpus.json is a single motion; otherwise every
/// immediate subdirectory with a manifest is one, in lexicographic order.
std::vector<std::filesystem::path> list_motion_dirs(const std::filesystem::path& root);

}  // namespace tankds
