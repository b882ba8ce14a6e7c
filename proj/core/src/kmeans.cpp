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

#include "kmeans.hpp"

#include <limits>
#include <random>

#include "tankds/errors.hpp"

namespace tankds::detail {

KMeansResult kmeans(const Eigen::MatrixXd& data, int k, std::uint64_t seed, int max_iter) {
  const Eigen::Index n = data.rows();
  if (k < 1 || k > n) throw InvalidParameter("kmeans: need 1 <= k <= number of samples");

  std::mt19937_64 rng(seed);
  KMeansResult out;
  out.centers.resize(k, data.cols());

  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  out.centers.row(0) = data.row(pick(rng));

  Eigen::VectorXd d2(n);
  for (Eigen::Index i = 0; i < n; ++i) d2(i) = (data.row(i) - out.centers.row(0)).squaredNorm();

  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index chosen = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      for (chosen = 0; chosen < n - 1; ++chosen) {
        target -= d2(chosen);
        if (target <= 0.0 && d2(chosen) > 0.0) break;
      }
    } else {
      chosen = pick(rng);
    }
    out.centers.row(c) = data.row(chosen);
    for (Eigen::Index i = 0; i < n; ++i)
      d2(i) = std::min(d2(i), (data.row(i) - out.centers.row(c)).squaredNorm());
  }

  out.labels.assign(static_cast<std::size_t>(n), -1);
  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (data.row(i) - out.centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (out.labels[i] != best) {
        out.labels[i] = best;
        changed = true;
      }
    }
    if (!changed) break;

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, data.cols());
    std::vector<int> counts(k, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(out.labels[i]) += data.row(i);
      ++counts[out.labels[i]];
    }
    for (int c = 0; c < k; ++c) {
      // Empty clusters keep their previous center.
      if (counts[c] > 0) out.centers.row(c) = sums.row(c) / counts[c];
    }
  }
  return out;
}

}  // namespace tankds::detail
