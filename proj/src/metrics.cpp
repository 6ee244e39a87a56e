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

#include "evalmodel/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "evalmodel/errors.hpp"

namespace evalmodel {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) {
    throw InputError("length mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  }
  if (a == 0) throw DegenerateInputError("metric of an empty sample");
}

std::size_t count_positives(std::span<const int> labels) {
  std::size_t pos = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw InputError("labels must be 0 or 1");
    pos += static_cast<std::size_t>(y);
  }
  return pos;
}

std::vector<std::size_t> order_by_score_desc(std::span<const double> scores) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return idx;
}

}  // namespace

MetricVector::MetricVector(MetricKind kind, std::vector<double> values)
    : kind_(kind), values_(std::move(values)) {
  if (values_.size() != names(kind_).size()) {
    throw InputError("metric vector has the wrong number of values");
  }
}

const std::vector<std::string>& MetricVector::names(MetricKind kind) {
  static const std::vector<std::string> kClassification = {
      "roc_auc", "acc", "recall", "precision", "f1", "pr_auc"};
  static const std::vector<std::string> kRegression = {"rmse", "r2", "mae", "mape", "mse"};
  return kind == MetricKind::kClassification ? kClassification : kRegression;
}

std::size_t MetricVector::index_of(MetricKind kind, std::string_view name) {
  const auto& n = names(kind);
  const auto it = std::find(n.begin(), n.end(), name);
  if (it == n.end()) throw InputError("unknown metric '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - n.begin());
}

std::pair<double, double> MetricVector::range(std::string_view name) {
  if (name == "roc_auc" || name == "acc" || name == "recall" || name == "precision" ||
      name == "f1" || name == "pr_auc") {
    return {0.0, 1.0};
  }
  if (name == "rmse" || name == "mae" || name == "mape" || name == "mse") return {0.0, kInf};
  if (name == "r2") return {-kInf, 1.0};
  return {-kInf, kInf};
}

double MetricVector::get(std::string_view name) const {
  return values_.at(index_of(kind_, name));
}

nlohmann::json to_json(const MetricVector& metrics) {
  nlohmann::json j = nlohmann::json::object();
  const auto& names = MetricVector::names(metrics.kind());
  for (std::size_t i = 0; i < names.size(); ++i) j[names[i]] = metrics[i];
  return j;
}

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  check_lengths(scores.size(), labels.size());
  const std::size_t pos = count_positives(labels);
  const std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0) throw DegenerateInputError("roc_auc needs both classes");

  // Midranks over ascending scores.
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double positive_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[idx[k]] == 1) positive_rank_sum += midrank;
    }
    i = j;
  }
  const double p = static_cast<double>(pos);
  const double u = positive_rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(neg));
}

double pr_auc(std::span<const double> scores, std::span<const int> labels) {
  check_lengths(scores.size(), labels.size());
  const std::size_t pos = count_positives(labels);
  if (pos == 0) throw DegenerateInputError("pr_auc needs at least one positive");
  const auto idx = order_by_score_desc(scores);
  double area = 0.0;
  double prev_recall = 0.0;
  std::size_t tp = 0, fp = 0, i = 0;
  while (i < idx.size()) {
    const double s = scores[idx[i]];
    while (i < idx.size() && scores[idx[i]] == s) {
      if (labels[idx[i]] == 1) ++tp; else ++fp;
      ++i;
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(pos);
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    area += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return area;
}

Confusion confusion_at(std::span<const double> scores, std::span<const int> labels,
                       double threshold) {
  check_lengths(scores.size(), labels.size());
  Confusion c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (labels[i] == 1) {
      predicted ? ++c.tp : ++c.fn;
    } else if (labels[i] == 0) {
      predicted ? ++c.fp : ++c.tn;
    } else {
      throw InputError("labels must be 0 or 1");
    }
  }
  return c;
}

MetricVector classification_summary(std::span<const double> scores,
                                    std::span<const int> labels, double threshold) {
  const Confusion c = confusion_at(scores, labels, threshold);
  const std::size_t n = scores.size();
  if (c.tp + c.fn == 0) throw DegenerateInputError("recall undefined: no positive labels");
  const double acc = static_cast<double>(c.tp + c.tn) / static_cast<double>(n);
  const double recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  const double precision =
      c.tp + c.fp == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  const double f1 =
      precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
  return MetricVector(MetricKind::kClassification,
                      {roc_auc(scores, labels), acc, recall, precision, f1,
                       pr_auc(scores, labels)});
}

MetricVector regression_summary(std::span<const double> preds,
                                std::span<const double> targets) {
  check_lengths(preds.size(), targets.size());
  const double n = static_cast<double>(preds.size());
  const double mean_t = std::accumulate(targets.begin(), targets.end(), 0.0) / n;
  double ss_res = 0.0, ss_tot = 0.0, abs_sum = 0.0, ape_sum = 0.0;
  std::size_t ape_count = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const double e = preds[i] - targets[i];
    ss_res += e * e;
    ss_tot += (targets[i] - mean_t) * (targets[i] - mean_t);
    abs_sum += std::fabs(e);
    if (std::fabs(targets[i]) >= 1e-12) {
      ape_sum += std::fabs(e / targets[i]);
      ++ape_count;
    }
  }
  if (!(ss_tot > 0.0)) throw DegenerateInputError("r2 undefined: targets have zero variance");
  if (ape_count == 0) throw DegenerateInputError("mape undefined: all targets are zero");
  const double mse = ss_res / n;
  return MetricVector(MetricKind::kRegression,
                      {std::sqrt(mse), 1.0 - ss_res / ss_tot, abs_sum / n,
                       ape_sum / static_cast<double>(ape_count), mse});
}

}  // namespace evalmodel
