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

#include <atomic>
#include <filesystem>
#include <functional>
#include <memory>
#include <random>
#include <string>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "tankds/regression.hpp"
#include "tankds/training.hpp"

namespace tankds::testing {

/// Regressor backed by an arbitrary callable.
class FunctionRegressor final : public Regressor {
 public:
  using Fn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

  FunctionRegressor(Eigen::Index dim, Fn fn) : dim_(dim), fn_(std::move(fn)) {}

  Eigen::VectorXd predict(const Eigen::Ref<const Eigen::VectorXd>& x) const override {
    return fn_(x);
  }
  Eigen::Index dim() const override { return dim_; }
  std::string_view backend() const override { return "function"; }
  bool fitted() const override { return true; }
  nlohmann::json params_json() const override { return nlohmann::json::object(); }

 private:
  Eigen::Index dim_;
  Fn fn_;
};

inline RegressorPtr make_function(Eigen::Index dim, FunctionRegressor::Fn fn) {
  return std::make_shared<FunctionRegressor>(dim, std::move(fn));
}

inline RegressorPtr zero_field(Eigen::Index dim) {
  return make_function(dim, [dim](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(dim); });
}

/// Uniform-time demonstration with the given positions and velocities.
inline Demonstration uniform_demo(const Eigen::MatrixXd& positions, const Eigen::MatrixXd& velocities,
                                  double dt) {
  Demonstration d;
  d.times = Eigen::VectorXd::LinSpaced(positions.rows(), 0.0, dt * (positions.rows() - 1));
  d.positions = positions;
  d.velocities = velocities;
  return d;
}

/// Fresh directory under the system temp path, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("tankds_" + tag + "_" + std::to_string(counter++) +
             "_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Random Gaussian RBF field: 25 centers uniform in [-50, 50]^2,
/// coefficients uniform in [-10, 10], bandwidth from the median heuristic
/// over the centers.
inline RegressorPtr random_rbf_field(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(-50.0, 50.0), coef(-10.0, 10.0);
  Eigen::MatrixXd centers(25, 2), weights(25, 2);
  for (Eigen::Index i = 0; i < 25; ++i) {
    centers.row(i) << pos(rng), pos(rng);
    weights.row(i) << coef(rng), coef(rng);
  }
  return std::make_shared<RbfRidgeModel>(centers, median_pairwise_distance(centers), 1e-6,
                                         weights);
}

}  // namespace tankds::testing
