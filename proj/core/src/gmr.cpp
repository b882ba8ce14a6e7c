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
#include <limits>
#include <numbers>
#include <string>

#include "json_util.hpp"
#include "kmeans.hpp"
#include "tankds/errors.hpp"
#include "tankds/regression.hpp"

namespace tankds {
namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

// Column-wise log N(z_i | mean, cov) for samples stored as rows of z.
// Also returns tr(cov^-1) through inv_trace.
Eigen::VectorXd log_gaussian(const Eigen::MatrixXd& z, const Eigen::VectorXd& mean,
                             const Eigen::MatrixXd& cov, int component, double* inv_trace) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw SingularModel("fit_gmr: covariance of component " + std::to_string(component) +
                        " is not positive definite");
  const Eigen::MatrixXd& l = llt.matrixL();
  const double log_det = 2.0 * l.diagonal().array().log().sum();

  Eigen::MatrixXd diff = (z.rowwise() - mean.transpose()).transpose();
  llt.matrixL().solveInPlace(diff);
  if (inv_trace) {
    Eigen::MatrixXd l_inv = Eigen::MatrixXd::Identity(cov.rows(), cov.cols());
    llt.matrixL().solveInPlace(l_inv);
    *inv_trace = l_inv.squaredNorm();
  }
  const double d = static_cast<double>(cov.rows());
  return (-0.5 * (d * kLog2Pi + log_det + diff.colwise().squaredNorm().array())).matrix()
      .transpose();
}

}  // namespace

GmrModel::GmrModel(Eigen::VectorXd weights, std::vector<Eigen::VectorXd> means,
                   std::vector<Eigen::MatrixXd> covariances, std::uint64_t seed)
    : weights_(std::move(weights)),
      means_(std::move(means)),
      covariances_(std::move(covariances)),
      seed_(seed) {
  const auto k = static_cast<std::size_t>(weights_.size());
  if (k == 0 || means_.size() != k || covariances_.size() != k)
    throw InvalidParameter("GmrModel: weights, means and covariances must have equal count");
  const Eigen::Index joint = means_.front().size();
  if (joint < 2 || joint % 2 != 0)
    throw DimensionMismatch("GmrModel: joint dimension must be 2n");
  for (std::size_t i = 0; i < k; ++i) {
    if (means_[i].size() != joint || covariances_[i].rows() != joint ||
        covariances_[i].cols() != joint)
      throw DimensionMismatch("GmrModel: component " + std::to_string(i) +
                              " has inconsistent shape");
  }
  dim_ = joint / 2;
  build_conditionals();
}

void GmrModel::build_conditionals() {
  const Eigen::Index n = dim_;
  input_chol_.clear();
  gain_.clear();
  log_norm_.resize(components());
  for (int k = 0; k < components(); ++k) {
    const Eigen::MatrixXd& cov = covariances_[k];
    Eigen::LLT<Eigen::MatrixXd> llt(cov.topLeftCorner(n, n));
    if (llt.info() != Eigen::Success)
      throw SingularModel("GmrModel: input block of component " + std::to_string(k) +
                          " is not positive definite");
    const Eigen::MatrixXd& l = llt.matrixL();
    const double log_det = 2.0 * l.diagonal().array().log().sum();
    log_norm_(k) = std::log(weights_(k)) - 0.5 * (static_cast<double>(n) * kLog2Pi + log_det);
    gain_.push_back(llt.solve(cov.topRightCorner(n, n)).transpose());
    input_chol_.push_back(std::move(llt));
  }
}

Eigen::VectorXd GmrModel::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (!fitted()) throw NotFitted("GmrModel::predict: model is not fitted");
  if (x.size() != dim_)
    throw DimensionMismatch("GmrModel::predict: expected dimension " + std::to_string(dim_) +
                            ", got " + std::to_string(x.size()));
  const int k_count = components();
  Eigen::VectorXd log_resp(k_count);
  for (int k = 0; k < k_count; ++k) {
    Eigen::VectorXd d = x - means_[k].head(dim_);
    input_chol_[k].matrixL().solveInPlace(d);
    log_resp(k) = log_norm_(k) - 0.5 * d.squaredNorm();
  }
  const double lse = log_sum_exp(log_resp);

  Eigen::VectorXd y = Eigen::VectorXd::Zero(dim_);
  for (int k = 0; k < k_count; ++k) {
    const double h = std::exp(log_resp(k) - lse);
    if (h == 0.0) continue;
    y += h * (means_[k].tail(dim_) + gain_[k] * (x - means_[k].head(dim_)));
  }
  return y;
}

nlohmann::json GmrModel::params_json() const {
  nlohmann::json means = nlohmann::json::array();
  nlohmann::json covs = nlohmann::json::array();
  for (int k = 0; k < components(); ++k) {
    means.push_back(detail::to_array(means_[k]));
    covs.push_back(detail::to_row_major(covariances_[k]));
  }
  return {{"components", components()},
          {"seed", seed_},
          {"weights", detail::to_array(weights_)},
          {"means", means},
          {"covariances", covs}};
}

GmrModel GmrModel::from_params(const nlohmann::json& params, Eigen::Index dim) {
  const int k = params.at("components").get<int>();
  Eigen::VectorXd weights = detail::from_array(params.at("weights"));
  if (weights.size() != k) throw ParseError("gmr: weights do not match component count");
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covs;
  for (int i = 0; i < k; ++i) {
    means.push_back(detail::from_array(params.at("means").at(i)));
    if (means.back().size() != 2 * dim) throw ParseError("gmr: mean has wrong dimension");
    covs.push_back(detail::from_row_major(params.at("covariances").at(i), 2 * dim, 2 * dim,
                                          "gmr covariance"));
  }
  return GmrModel(std::move(weights), std::move(means), std::move(covs),
                  params.at("seed").get<std::uint64_t>());
}

// EM with an inverse-Wishart style penalty -lambda/2 tr(cov^-1) per
// component, whose M-step is cov = (scatter + lambda I) / N_k. Choosing
// lambda = reg_factor * avg_var * N floors every eigenvalue at
// reg_factor * avg_var, and the penalized log-likelihood stays monotone.
GmrModel fit_gmr(const TrainingSet& data, const GmrOptions& options) {
  data.validate();
  const int k_count = options.components;
  const Eigen::Index count = data.count();
  if (k_count < 1) throw InvalidParameter("fit_gmr: need at least one component");
  if (k_count > count)
    throw InvalidParameter("fit_gmr: " + std::to_string(k_count) + " components but only " +
                           std::to_string(count) + " samples");
  if (options.max_iter < 1) throw InvalidParameter("fit_gmr: max_iter must be positive");
  if (!(options.tol > 0.0)) throw InvalidParameter("fit_gmr: tol must be positive");

  const Eigen::Index joint = 2 * data.dim();
  Eigen::MatrixXd z(count, joint);
  z << data.inputs, data.targets;

  const Eigen::RowVectorXd center = z.colwise().mean();
  double avg_var = (z.rowwise() - center).colwise().squaredNorm().mean() /
                   static_cast<double>(count);
  if (!(avg_var > 0.0)) avg_var = 1.0;
  const double lambda = options.reg_factor * avg_var * static_cast<double>(count);
  const Eigen::MatrixXd penalty = lambda * Eigen::MatrixXd::Identity(joint, joint);

  Eigen::MatrixXd resp = Eigen::MatrixXd::Zero(count, k_count);
  {
    const auto init = detail::kmeans(z, k_count, options.seed);
    for (Eigen::Index i = 0; i < count; ++i) resp(i, init.labels[i]) = 1.0;
  }

  Eigen::VectorXd weights = Eigen::VectorXd::Constant(k_count, 1.0 / k_count);
  std::vector<Eigen::VectorXd> means(k_count, center.transpose());
  std::vector<Eigen::MatrixXd> covs(
      k_count, ((z.rowwise() - center).transpose() * (z.rowwise() - center) + penalty) /
                   static_cast<double>(count));

  GmrModel model;
  Eigen::MatrixXd log_p(count, k_count);
  double previous = -std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < options.max_iter; ++iter) {
    // M-step
    const Eigen::VectorXd mass = resp.colwise().sum().transpose();
    for (int k = 0; k < k_count; ++k) {
      // A component that lost all responsibility keeps its parameters.
      if (!(mass(k) > 1e-12 * static_cast<double>(count))) {
        weights(k) = mass(k) / static_cast<double>(count);
        continue;
      }
      weights(k) = mass(k) / static_cast<double>(count);
      means[k] = (z.transpose() * resp.col(k)) / mass(k);
      const Eigen::MatrixXd centered = z.rowwise() - means[k].transpose();
      covs[k] = (centered.transpose() * resp.col(k).asDiagonal() * centered + penalty) / mass(k);
      covs[k] = 0.5 * (covs[k] + covs[k].transpose());
    }

    // E-step
    double penalty_sum = 0.0;
    for (int k = 0; k < k_count; ++k) {
      double inv_trace = 0.0;
      log_p.col(k) = log_gaussian(z, means[k], covs[k], k, &inv_trace);
      log_p.col(k).array() += std::log(weights(k));
      penalty_sum += inv_trace;
    }
    double log_lik = 0.0;
    for (Eigen::Index i = 0; i < count; ++i) {
      const double lse = log_sum_exp(log_p.row(i).transpose());
      log_lik += lse;
      resp.row(i) = (log_p.row(i).array() - lse).exp();
    }
    const double objective = log_lik - 0.5 * lambda * penalty_sum;
    if (!std::isfinite(objective))
      throw SingularModel("fit_gmr: EM objective became non-finite at iteration " +
                          std::to_string(iter));
    model.objective_trace_.push_back(objective);

    if (objective - previous < options.tol * (1.0 + std::abs(objective))) break;
    previous = objective;
  }

  model.weights_ = weights;
  model.means_ = std::move(means);
  model.covariances_ = std::move(covs);
  model.seed_ = options.seed;
  model.dim_ = data.dim();
  model.build_conditionals();
  return model;
}

}  // namespace tankds
