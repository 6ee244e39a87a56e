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

#ifndef EVALMODEL_METRICS_HPP_
#define EVALMODEL_METRICS_HPP_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace evalmodel {

enum class MetricKind { kClassification, kRegression };

// Named metric values. The names (and their order) are fixed per kind:
//   classification: roc_auc, acc, recall, precision, f1, pr_auc
//   regression:     rmse, r2, mae, mape, mse
class MetricVector {
 public:
  MetricVector() = default;
  MetricVector(MetricKind kind, std::vector<double> values);

  static const std::vector<std::string>& names(MetricKind kind);
  // Index of `name` in names(kind); throws InputError if absent.
  static std::size_t index_of(MetricKind kind, std::string_view name);
  // Admissible range of a metric value, used for clamping predictions.
  static std::pair<double, double> range(std::string_view name);

  MetricKind kind() const { return kind_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double get(std::string_view name) const;

  friend bool operator==(const MetricVector&, const MetricVector&) = default;

 private:
  MetricKind kind_ = MetricKind::kRegression;
  std::vector<double> values_;
};

nlohmann::json to_json(const MetricVector& metrics);

// Mann-Whitney probability that a random positive outscores a random
// negative, ties counted 1/2. Labels are 0/1. Throws DegenerateInputError when
// only one class is present.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

// Step-interpolated area under the precision-recall curve (average precision).
double pr_auc(std::span<const double> scores, std::span<const int> labels);

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

Confusion confusion_at(std::span<const double> scores, std::span<const int> labels,
                       double threshold);

// Full classification MetricVector. Predicted positive iff score >= threshold.
// Precision of an empty positive-prediction set is 0; f1 is 0 when
// precision + recall = 0.
MetricVector classification_summary(std::span<const double> scores,
                                    std::span<const int> labels,
                                    double threshold = 0.5);

// rmse, r2 = 1 - SS_res / SS_tot, mae, mape (rows with |target| < 1e-12
// skipped), mse.
MetricVector regression_summary(std::span<const double> preds,
                                std::span<const double> targets);

}  // namespace evalmodel

#endif  // EVALMODEL_METRICS_HPP_
