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

#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "json_util.hpp"
#include "tankds/errors.hpp"
#include "tankds/regression.hpp"

namespace tankds {

GpModel::GpModel(Eigen::MatrixXd train_inputs, double kernel_scale, double kernel_bandwidth,
                 double noise, Eigen::MatrixXd dual_coefficients)
    : train_inputs_(std::move(train_inputs)),
      scale_(kernel_scale),
      bandwidth_(kernel_bandwidth),
      noise_(noise),
      dual_(std::move(dual_coefficients)) {
  if (train_inputs_.rows() < 1) throw InvalidParameter("GpModel: no training inputs");
  if (!(scale_ > 0.0) || !(bandwidth_ > 0.0) || !(noise_ > 0.0))
    throw InvalidParameter("GpModel: scale, bandwidth and noise must be positive");
  if (dual_.rows() != train_inputs_.rows() || dual_.cols() != train_inputs_.cols())
    throw DimensionMismatch("GpModel: dual coefficients must be count x dim");
}

Eigen::VectorXd GpModel::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (!fitted()) throw NotFitted("GpModel::predict: model is not fitted");
  if (x.size() != dim())
    throw DimensionMismatch("GpModel::predict: expected dimension " + std::to_string(dim()) +
                            ", got " + std::to_string(x.size()));
  const double inv = 0.5 / (bandwidth_ * bandwidth_);
  const Eigen::VectorXd k =
      scale_ * scale_ *
      (-(train_inputs_.rowwise() - x.transpose()).rowwise().squaredNorm().array() * inv)
          .exp()
          .matrix();
  return dual_.transpose() * k;
}

nlohmann::json GpModel::params_json() const {
  return {{"count", train_inputs_.rows()},
          {"kernel_scale", scale_},
          {"kernel_bandwidth", bandwidth_},
          {"noise", noise_},
          {"train_inputs", detail::to_row_major(train_inputs_)},
          {"dual_coefficients", detail::to_row_major(dual_)}};
}

GpModel GpModel::from_params(const nlohmann::json& params, Eigen::Index dim) {
  const auto count = params.at("count").get<Eigen::Index>();
  return GpModel(detail::from_row_major(params.at("train_inputs"), count, dim, "gp inputs"),
                 params.at("kernel_scale").get<double>(),
                 params.at("kernel_bandwidth").get<double>(), params.at("noise").get<double>(),
                 detail::from_row_major(params.at("dual_coefficients"), count, dim,
                                        "gp dual coefficients"));
}

GpModel fit_gp(const TrainingSet& data, const GpOptions& options) {
  data.validate();
  const Eigen::Index count = data.count();
  if (count > GpModel::kMaxTrainingPoints)
    throw InvalidParameter("fit_gp: " + std::to_string(count) +
                           " samples exceed the exact-solve limit of " +
                           std::to_string(GpModel::kMaxTrainingPoints));
  if (!(options.kernel_scale > 0.0)) throw InvalidParameter("fit_gp: kernel_scale must be positive");

  const double bandwidth = options.kernel_bandwidth > 0.0
                               ? options.kernel_bandwidth
                               : median_pairwise_distance(data.inputs);
  double noise = options.noise;
  if (!(noise > 0.0)) {
    const Eigen::RowVectorXd mean = data.targets.colwise().mean();
    const double var = (data.targets.rowwise() - mean).colwise().squaredNorm().mean() /
                       static_cast<double>(count);
    noise = std::max(1e-4 * var, 1e-10);
  }

  const double inv = 0.5 / (bandwidth * bandwidth);
  const double s2 = options.kernel_scale * options.kernel_scale;
  Eigen::MatrixXd gram(count, count);
  for (Eigen::Index i = 0; i < count; ++i) {
    gram(i, i) = s2 + noise;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = s2 * std::exp(-(data.inputs.row(i) - data.inputs.row(j)).squaredNorm() * inv);
      gram(i, j) = v;
      gram(j, i) = v;
    }
  }

  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success)
    throw NumericalError("fit_gp: Gram matrix plus noise is not positive definite (count=" +
                         std::to_string(count) + ", noise=" + std::to_string(noise) +
                         ", bandwidth=" + std::to_string(bandwidth) +
                         "); increase the noise level");
  Eigen::MatrixXd dual = llt.solve(data.targets);
  if (!dual.allFinite()) throw NumericalError("fit_gp: non-finite dual coefficients");

  return GpModel(data.inputs, options.kernel_scale, bandwidth, noise, std::move(dual));
}

}  // namespace tankds
