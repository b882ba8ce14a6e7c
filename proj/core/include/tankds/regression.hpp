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
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Cholesky>
#include <nlohmann/json.hpp>

namespace tankds {

/// Supervised pairs for learning the nonlinear field: one sample per row.
struct TrainingSet {
  Eigen::MatrixXd inputs;   ///< count x dim demonstrated states
  Eigen::MatrixXd targets;  ///< count x dim transformed observations

  Eigen::Index dim() const { return inputs.cols(); }
  Eigen::Index count() const { return inputs.rows(); }

  /// Equal shapes, at least two samples, all entries finite.
  void validate() const;
};

/// A fitted map x -> f(x). Fitted models are immutable and may be shared
/// freely between threads.
class Regressor {
 public:
  virtual ~Regressor() = default;

  /// Throws NotFitted on a default-constructed model and DimensionMismatch
  /// when x does not match dim().
  virtual Eigen::VectorXd predict(const Eigen::Ref<const Eigen::VectorXd>& x) const = 0;

  virtual Eigen::Index dim() const = 0;
  virtual std::string_view backend() const = 0;
  virtual bool fitted() const = 0;

  /// Backend-specific part of the serialized document.
  virtual nlohmann::json params_json() const = 0;
};

using RegressorPtr = std::shared_ptr<const Regressor>;

// ---------------------------------------------------------------------------
// Gaussian mixture regression

struct GmrOptions {
  int components = 5;
  std::uint64_t seed = 0;
  int max_iter = 500;
  /// EM stops once the objective rises by less than tol * (1 + |objective|).
  double tol = 1e-9;
  /// Covariance floor as a fraction of the average per-column data variance.
  double reg_factor = 1e-10;
};

/// Joint Gaussian mixture over (input, target) with conditional-mean
/// prediction.
class GmrModel final : public Regressor {
 public:
  GmrModel() = default;
  GmrModel(Eigen::VectorXd weights, std::vector<Eigen::VectorXd> means,
           std::vector<Eigen::MatrixXd> covariances, std::uint64_t seed = 0);

  Eigen::VectorXd predict(const Eigen::Ref<const Eigen::VectorXd>& x) const override;
  Eigen::Index dim() const override { return dim_; }
  std::string_view backend() const override { return "gmr"; }
  bool fitted() const override { return !means_.empty(); }
  nlohmann::json params_json() const override;

  int components() const { return static_cast<int>(means_.size()); }
  const Eigen::VectorXd& weights() const { return weights_; }
  const std::vector<Eigen::VectorXd>& means() const { return means_; }
  const std::vector<Eigen::MatrixXd>& covariances() const { return covariances_; }
  std::uint64_t seed() const { return seed_; }

  /// EM objective after each iteration (penalized log-likelihood).
  const std::vector<double>& objective_trace() const { return objective_trace_; }

  static GmrModel from_params(const nlohmann::json& params, Eigen::Index dim);

 private:
  friend GmrModel fit_gmr(const TrainingSet&, const GmrOptions&);
  void build_conditionals();

  Eigen::Index dim_ = 0;
  Eigen::VectorXd weights_;
  std::vector<Eigen::VectorXd> means_;
  std::vector<Eigen::MatrixXd> covariances_;
  std::uint64_t seed_ = 0;
  std::vector<double> objective_trace_;

  // Cached input-marginal factorizations and regression matrices.
  std::vector<Eigen::LLT<Eigen::MatrixXd>> input_chol_;
  std::vector<Eigen::MatrixXd> gain_;
  Eigen::VectorXd log_norm_;
};

/// EM from a seeded k-means partition. Throws InvalidParameter when
/// components > count and SingularModel when a covariance stops being
/// positive definite.
GmrModel fit_gmr(const TrainingSet& data, const GmrOptions& options);

// ---------------------------------------------------------------------------
// Gaussian RBF features with ridge-regularized least squares

struct RbfOptions {
  int centers = 25;
  double bandwidth = 0.0;  ///< <= 0 selects the median pairwise input distance
  double ridge = 1e-6;
  std::uint64_t seed = 0;
};

/// f(x) = W^T phi(x), phi_j(x) = exp(-|x - c_j|^2 / bandwidth^2).
class RbfRidgeModel final : public Regressor {
 public:
  RbfRidgeModel() = default;
  /// centers: M x dim, coefficients: M x dim.
  RbfRidgeModel(Eigen::MatrixXd centers, double bandwidth, double ridge,
                Eigen::MatrixXd coefficients);

  Eigen::VectorXd predict(const Eigen::Ref<const Eigen::VectorXd>& x) const override;
  Eigen::Index dim() const override { return centers_.cols(); }
  std::string_view backend() const override { return "rbf"; }
  bool fitted() const override { return centers_.rows() > 0; }
  nlohmann::json params_json() const override;

  Eigen::VectorXd features(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  const Eigen::MatrixXd& centers() const { return centers_; }
  const Eigen::MatrixXd& coefficients() const { return coefficients_; }
  double bandwidth() const { return bandwidth_; }
  double ridge() const { return ridge_; }

  static RbfRidgeModel from_params(const nlohmann::json& params, Eigen::Index dim);

 private:
  Eigen::MatrixXd centers_;
  double bandwidth_ = 1.0;
  double ridge_ = 1e-6;
  Eigen::MatrixXd coefficients_;
};

RbfRidgeModel fit_rbf_ridge(const TrainingSet& data, const RbfOptions& options);

// ---------------------------------------------------------------------------
// Exact Gaussian process regression (posterior mean)

struct GpOptions {
  double kernel_scale = 1.0;
  double kernel_bandwidth = 0.0;  ///< <= 0 selects the median heuristic
  double noise = 0.0;             ///< <= 0 selects 1e-4 * target variance
};

/// k(x, x') = scale^2 exp(-|x - x'|^2 / (2 bandwidth^2)); prediction is
/// k(x)^T (K + noise I)^{-1} Y.
class GpModel final : public Regressor {
 public:
  static constexpr Eigen::Index kMaxTrainingPoints = 5000;

  GpModel() = default;
  GpModel(Eigen::MatrixXd train_inputs, double kernel_scale, double kernel_bandwidth,
          double noise, Eigen::MatrixXd dual_coefficients);

  Eigen::VectorXd predict(const Eigen::Ref<const Eigen::VectorXd>& x) const override;
  Eigen::Index dim() const override { return train_inputs_.cols(); }
  std::string_view backend() const override { return "gp"; }
  bool fitted() const override { return train_inputs_.rows() > 0; }
  nlohmann::json params_json() const override;

  const Eigen::MatrixXd& train_inputs() const { return train_inputs_; }
  const Eigen::MatrixXd& dual_coefficients() const { return dual_; }
  double kernel_scale() const { return scale_; }
  double kernel_bandwidth() const { return bandwidth_; }
  double noise() const { return noise_; }

  static GpModel from_params(const nlohmann::json& params, Eigen::Index dim);

 private:
  Eigen::MatrixXd train_inputs_;
  double scale_ = 1.0;
  double bandwidth_ = 1.0;
  double noise_ = 1e-6;
  Eigen::MatrixXd dual_;
};

GpModel fit_gp(const TrainingSet& data, const GpOptions& options);

// ---------------------------------------------------------------------------

/// Median Euclidean distance between distinct input rows. Large sets are
/// thinned with a fixed stride so the cost stays bounded.
double median_pairwise_distance(const Eigen::MatrixXd& inputs);

enum class Backend { gmr, rbf, gp };

/// Backend choice plus the hyperparameters of every backend.
struct BackendSpec {
  Backend kind = Backend::gmr;
  GmrOptions gmr;
  RbfOptions rbf;
  GpOptions gp;
};

std::string_view to_string(Backend backend);
/// Accepts "gmr", "rbf" or "gp"; throws InvalidParameter otherwise.
Backend parse_backend(std::string_view name);

RegressorPtr fit_backend(const TrainingSet& data, const BackendSpec& spec);

/// Versioned document {"backend", "version", "dim", "params"}.
inline constexpr int kModelFormatVersion = 1;
nlohmann::json model_to_json(const Regressor& model);
RegressorPtr model_from_json(const nlohmann::json& doc);

}  // namespace tankds
