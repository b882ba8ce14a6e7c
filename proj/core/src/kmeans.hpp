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
#include <vector>

#include <Eigen/Core>

namespace tankds::detail {

struct KMeansResult {
  Eigen::MatrixXd centers;  // k x d
  std::vector<int> labels;  // one per row of the data
};

// k-means++ seeding followed by Lloyd iterations. Rows are samples.
KMeansResult kmeans(const Eigen::MatrixXd& data, int k, std::uint64_t seed,
                    int max_iter = 100);

}  // namespace tankds::detail
