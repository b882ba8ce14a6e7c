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
#include "kmeans.hpp"
#include "tankds/errors.hpp"
#include "tankds/regression.hpp"

namespace tankds {

RbfRidgeModel::RbfRidgeModel(Eigen::MatrixXd centers, double bandwidth, double ridge,
                             Eigen::MatrixXd coefficients)
    : centers_(std::move(centers)),
      bandwidth_(bandwidth),
      ridge_(ridge),
      coefficients_(std::move(coefficients)) {
  if (centers_.rows() < 1) throw InvalidParameter("RbfRidgeModel: need at least one center");
  if (!(bandwidth_ > 0.0)) throw InvalidParameter("RbfRidgeModel: bandwidth must be positive");
  if (!(ridge_ > 0.0)) throw InvalidParameter("RbfRidgeModel: ridge must be positive");
  if (coefficients_.rows() != centers_.rows() || coefficients_.cols() != centers_.cols())
    throw DimensionMismatch("RbfRidgeModel: coefficients must be M x dim");
}

Eigen::VectorXd RbfRidgeModel::features(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (!fitted()) throw NotFitted("RbfRidgeModel: model is not fitted");
  if (x.size() != dim())
    throw DimensionMismatch("RbfRidgeModel: expected dimension " + std::to_string(dim()) +
                            ", got " + std::to_string(x.size()));
  const double inv_b2 = 1.0 / (bandwidth_ * bandwidth_);
  return (-(centers_.rowwise() - x.transpose()).rowwise().squaredNorm().array() * inv_b2)
      .exp()
      .matrix();
}

Eigen::VectorXd RbfRidgeModel::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return coefficients_.transpose() * features(x);
}

nlohmann::json RbfRidgeModel::params_json() const {
  return {{"centers_count", centers_.rows()},
          {"bandwidth", bandwidth_},
          {"ridge", ridge_},
          {"centers", detail::to_row_major(centers_)},
          {"coefficients", detail::to_row_major(coefficients_)}};
}

RbfRidgeModel RbfRidgeModel::from_params(const nlohmann::json& params, Eigen::Index dim) {
  const auto m = params.at("centers_count").get<Eigen::Index>();
  return RbfRidgeModel(detail::from_row_major(params.at("centers"), m, dim, "rbf centers"),
                       params.at("bandwidth").get<double>(), params.at("ridge").get<double>(),
                       detail::from_row_major(params.at("coefficients"), m, dim,
                                              "rbf coefficients"));
}

RbfRidgeModel fit_rbf_ridge(const TrainingSet& data, const RbfOptions& options) {
  data.validate();
  if (options.centers < 1 || options.centers > data.count())
    throw InvalidParameter("fit_rbf_ridge: need 1 <= centers <= " +
                           std::to_string(data.count()));
  if (!(options.ridge > 0.0)) throw InvalidParameter("fit_rbf_ridge: ridge must be positive");

  const double bandwidth =
      options.bandwidth > 0.0 ? options.bandwidth : median_pairwise_distance(data.inputs);
  Eigen::MatrixXd centers = detail::kmeans(data.inputs, options.centers, options.seed).centers;

  // Feature matrix through a provisional model so fitting and prediction
  // share one kernel definition.
  const Eigen::Index m = centers.rows();
  RbfRidgeModel probe(centers, bandwidth, options.ridge,
                      Eigen::MatrixXd::Zero(m, data.dim()));
  Eigen::MatrixXd phi(data.count(), m);
  for (Eigen::Index i = 0; i < data.count(); ++i)
    phi.row(i) = probe.features(data.inputs.row(i).transpose()).transpose();

  Eigen::MatrixXd normal = phi.transpose() * phi;
  normal.diagonal().array() += options.ridge;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
  if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().array() > 0.0).all())
    throw SingularModel("fit_rbf_ridge: regularized normal equations are singular");
  Eigen::MatrixXd coefficients = ldlt.solve(phi.transpose() * data.targets);
  if (!coefficients.allFinite())
    throw NumericalError("fit_rbf_ridge: non-finite coefficients");

  return RbfRidgeModel(std::move(centers), bandwidth, options.ridge, std::move(coefficients));
}

}  // namespace tankds
