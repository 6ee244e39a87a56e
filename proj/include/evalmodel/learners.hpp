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

// Base regressors for evaluation models.

#ifndef EVALMODEL_LEARNERS_HPP_
#define EVALMODEL_LEARNERS_HPP_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evalmodel/matrix.hpp"

namespace evalmodel {

enum class LearnerKind { kLinear, kMlp, kGradientBoostedTrees };

const char* to_string(LearnerKind kind);
LearnerKind learner_kind_from_string(const std::string& name);

struct BaseLearnerConfig {
  LearnerKind kind = LearnerKind::kLinear;
  // Linear.
  double ridge_strength = 1e-6;
  // Mlp.
  std::vector<std::size_t> hidden = {32};
  double learning_rate = 1e-3;
  std::size_t epochs = 200;
  std::size_t batch_size = 32;
  // Gradient-boosted trees.
  std::size_t trees = 100;
  std::size_t depth = 4;
  double shrinkage = 0.1;
  double subsample = 1.0;
  std::size_t min_samples_leaf = 5;
  std::size_t max_bins = 255;
  // Start boosting from a ridge fit (ridge_strength) instead of the mean.
  bool linear_init = false;

  std::uint64_t seed = 0;

  void validate() const;
  // Short display name, e.g. "Linear", "MLP", "GBT".
  std::string display_name() const;
};

nlohmann::json to_json(const BaseLearnerConfig& cfg);
BaseLearnerConfig learner_config_from_json(const nlohmann::json& j);

class Regressor {
 public:
  virtual ~Regressor() = default;
  // Throws InputError if row.size() != input_width().
  virtual double predict(std::span<const double> row) const = 0;
  virtual std::size_t input_width() const = 0;
  virtual LearnerKind kind() const = 0;
  virtual nlohmann::json to_json() const = 0;
};

// Linear: ridge least squares via the normal equations with ridge_strength
// on the diagonal (intercept unpenalized). Mlp: ReLU network trained by
// mini-batch Adam on standardized inputs and targets. GBT: additive
// histogram regression trees on residuals with shrinkage.
//
// Throws InputError on non-finite input or shape mismatch and NumericError
// when the unregularized linear system is singular.
std::unique_ptr<Regressor> fit_base(const Matrix& rows, std::span<const double> targets,
                                    const BaseLearnerConfig& cfg);

std::unique_ptr<Regressor> regressor_from_json(const nlohmann::json& j);

// Coefficient access for the linear learner (intercept last).
std::vector<double> linear_coefficients(const Regressor& model);

}  // namespace evalmodel

#endif  // EVALMODEL_LEARNERS_HPP_
