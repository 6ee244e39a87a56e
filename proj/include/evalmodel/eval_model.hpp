/*
 * Copyright 2026 The evalmodel Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Evaluation models: per-subject-type regressors mapping
// (condition, subject vector, proxies) to the true metric.

#ifndef EVALMODEL_EVAL_MODEL_HPP_
#define EVALMODEL_EVAL_MODEL_HPP_

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <span>
#include <utility>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evalmodel/evaluation_sample.hpp"
#include "evalmodel/learners.hpp"

namespace evalmodel {

// Which input blocks the model sees.
struct FeatureBlocks {
  bool condition = true;
  bool subject = true;
  bool proxy = true;

  friend bool operator==(const FeatureBlocks&, const FeatureBlocks&) = default;
};

struct FeatureLayout {
  std::size_t condition_dims = 0;
  std::size_t subject_dims = 0;
  std::size_t proxy_dims = 0;
  FeatureBlocks blocks;

  std::size_t width() const;
  // Concatenates the selected blocks. Throws InputError when the sample's
  // block sizes differ from the layout.
  std::vector<double> features(const EvaluationSample& sample) const;

  friend bool operator==(const FeatureLayout&, const FeatureLayout&) = default;
};

// Output range applied after prediction.
struct MetricClamp {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  double apply(double v) const { return v < lo ? lo : (v > hi ? hi : v); }
  // The natural range of a named metric, e.g. [0, 1] for roc_auc.
  static MetricClamp for_metric(const std::string& metric);
};

struct MetaFitOptions {
  FeatureBlocks blocks;
  MetricClamp clamp;
  // Types with fewer rows use the pooled model.
  std::size_t min_group_rows = 5;
  // Fit a pooled all-types model used for unseen and small types.
  bool fit_fallback = true;
};

struct TypeReport {
  std::size_t rows = 0;
  // Training RMSE of the model that serves this type.
  double train_rmse = 0.0;
  bool uses_fallback = false;
};

class EvaluationModel {
 public:
  std::map<int, std::shared_ptr<const Regressor>> per_type_models;
  // May be null when fitting without fallback.
  std::shared_ptr<const Regressor> fallback;
  BaseLearnerConfig learner;
  FeatureLayout layout;
  MetricClamp clamp;
  std::map<int, TypeReport> training_report;
  double fallback_train_rmse = 0.0;

  // The regressor serving `type_id`. Throws RoutingError when there is none.
  const Regressor& route(int type_id) const;
};

inline constexpr const char* kEvalModelSchema = "evalmodel.eval_model/1";

// Throws ConfigError on an empty training set and InputError when samples
// disagree on block sizes.
EvaluationModel meta_fit(const std::vector<EvaluationSample>& train, const BaseLearnerConfig& cfg,
                         const MetaFitOptions& options = {});

// true_metric of the sample is ignored.
double meta_predict(const EvaluationModel& em, const EvaluationSample& sample);

// meta_predict(a) - meta_predict(b) under a shared condition.
double estimate_effect(const EvaluationModel& em, const std::vector<double>& condition,
                       const SubjectVector& subject_a, const SubjectVector& subject_b,
                       const std::vector<double>& proxies_a,
                       const std::vector<double>& proxies_b);

// Root-mean-square error of meta_predict against true_metric.
double prediction_rmse(const EvaluationModel& em, const std::vector<EvaluationSample>& samples);

// Distinct random index pairs (i != j) drawn from [0, n). Throws InputError
// when n < 2.
std::vector<std::pair<std::size_t, std::size_t>> sample_pairs(std::size_t n, std::size_t pairs,
                                                              std::uint64_t seed);

// RMSE of estimated effects (pred_i - pred_j) against true effects
// (truth_i - truth_j) over the given pairs.
double effect_rmse(std::span<const double> predictions, std::span<const double> truth,
                   const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

nlohmann::json to_json(const EvaluationModel& em);
EvaluationModel eval_model_from_json(const nlohmann::json& j);

}  // namespace evalmodel

#endif  // EVALMODEL_EVAL_MODEL_HPP_
