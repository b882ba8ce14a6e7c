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

#include "tankds/regression.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tankds/errors.hpp"

namespace tankds {

void TrainingSet::validate() const {
  if (inputs.rows() != targets.rows() || inputs.cols() != targets.cols())
    throw DimensionMismatch("TrainingSet: inputs are " + std::to_string(inputs.rows()) + "x" +
                            std::to_string(inputs.cols()) + " but targets are " +
                            std::to_string(targets.rows()) + "x" +
                            std::to_string(targets.cols()));
  if (inputs.rows() < 2) throw InvalidParameter("TrainingSet: need at least two samples");
  if (inputs.cols() < 1) throw InvalidParameter("TrainingSet: dimension must be positive");
  if (!inputs.allFinite() || !targets.allFinite())
    throw InvalidParameter("TrainingSet: non-finite entries");
}

double median_pairwise_distance(const Eigen::MatrixXd& inputs) {
  constexpr Eigen::Index kMaxPoints = 1000;
  const Eigen::Index n = inputs.rows();
  if (n < 2) return 1.0;
  const Eigen::Index stride = (n + kMaxPoints - 1) / kMaxPoints;

  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < n; i += stride) rows.push_back(i);

  std::vector<double> dist;
  dist.reserve(rows.size() * (rows.size() - 1) / 2);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = i + 1; j < rows.size(); ++j)
      dist.push_back((inputs.row(rows[i]) - inputs.row(rows[j])).norm());
  if (dist.empty()) return 1.0;

  auto mid = dist.begin() + static_cast<std::ptrdiff_t>(dist.size() / 2);
  std::nth_element(dist.begin(), mid, dist.end());
  return *mid > 0.0 ? *mid : 1.0;
}

std::string_view to_string(Backend backend) {
  switch (backend) {
    case Backend::gmr: return "gmr";
    case Backend::rbf: return "rbf";
    case Backend::gp: return "gp";
  }
  return "unknown";
}

Backend parse_backend(std::string_view name) {
  if (name == "gmr") return Backend::gmr;
  if (name == "rbf") return Backend::rbf;
  if (name == "gp") return Backend::gp;
  throw InvalidParameter("unknown backend '" + std::string(name) + "' (expected gmr, rbf or gp)");
}

RegressorPtr fit_backend(const TrainingSet& data, const BackendSpec& spec) {
  switch (spec.kind) {
    case Backend::gmr: return std::make_shared<GmrModel>(fit_gmr(data, spec.gmr));
    case Backend::rbf: return std::make_shared<RbfRidgeModel>(fit_rbf_ridge(data, spec.rbf));
    case Backend::gp: return std::make_shared<GpModel>(fit_gp(data, spec.gp));
  }
  throw InvalidParameter("fit_backend: unknown backend");
}

nlohmann::json model_to_json(const Regressor& model) {
  if (!model.fitted()) throw NotFitted("model_to_json: model is not fitted");
  return {{"backend", std::string(model.backend())},
          {"version", kModelFormatVersion},
          {"dim", model.dim()},
          {"params", model.params_json()}};
}

RegressorPtr model_from_json(const nlohmann::json& doc) {
  try {
    const int version = doc.at("version").get<int>();
    if (version != kModelFormatVersion)
      throw ParseError("model document version " + std::to_string(version) +
                       " is not supported");
    const auto backend = doc.at("backend").get<std::string>();
    const auto dim = doc.at("dim").get<Eigen::Index>();
    const auto& params = doc.at("params");
    if (backend == "gmr") return std::make_shared<GmrModel>(GmrModel::from_params(params, dim));
    if (backend == "rbf")
      return std::make_shared<RbfRidgeModel>(RbfRidgeModel::from_params(params, dim));
    if (backend == "gp") return std::make_shared<GpModel>(GpModel::from_params(params, dim));
    throw ParseError("unknown regression backend '" + backend + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed model document: ") + e.what());
  }
}

}  // namespace tankds
