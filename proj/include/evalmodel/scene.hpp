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

// Evaluation scenes: a dataset, split into a "real system" that produces
// true metrics and a disjoint proxy pool that dataset-based estimators may
// use.

#ifndef EVALMODEL_SCENE_HPP_
#define EVALMODEL_SCENE_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evalmodel/agent_space.hpp"
#include "evalmodel/matrix.hpp"
#include "evalmodel/metrics.hpp"

namespace evalmodel {

struct SceneDataset {
  std::string name;
  std::vector<std::string> feature_names;
  Matrix features;
  // 0/1 for classification scenes.
  std::vector<double> targets;
  TaskKind task_kind = TaskKind::kRegression;

  std::size_t rows() const { return features.rows(); }
  std::size_t input_dim() const { return features.cols(); }
  MetricKind metric_kind() const {
    return task_kind == TaskKind::kRegression ? MetricKind::kRegression
                                              : MetricKind::kClassification;
  }
  // Throws InputError on row-count disagreement or non-finite cells.
  void validate() const;
};

// Column roles for load_csv.
struct CsvSchema {
  std::string target;
  // Feature columns in order; empty means every non-target, non-dropped column.
  std::vector<std::string> features;
  std::vector<std::string> drop;
  // Text columns integer-encoded by the position of their level in the list.
  std::map<std::string, std::vector<std::string>> ordinal;
  TaskKind task_kind = TaskKind::kRegression;
  // Text columns with more distinct levels than this are rejected.
  std::size_t max_one_hot_levels = 32;
};

CsvSchema csv_schema_from_json(const nlohmann::json& j);

// Drops rows with any missing cell ("", NA, NaN, null), one-hot encodes
// unlisted text columns (levels sorted), integer-encodes ordinal columns.
// A text classification target is label-encoded in sorted level order.
SceneDataset load_csv(const std::string& path, const CsvSchema& schema);

struct SyntheticSceneConfig {
  TaskKind kind = TaskKind::kRegression;
  std::size_t rows = 1000;
  // Includes the randomized treatment column (the last feature).
  std::size_t input_dim = 8;
  std::uint64_t seed = 0;
  double noise_std = 0.5;
};

nlohmann::json to_json(const SyntheticSceneConfig& cfg);
SyntheticSceneConfig synthetic_scene_config_from_json(const nlohmann::json& j);

// Features i.i.d. N(0, 1) except the last column, a Bernoulli(0.5)
// treatment indicator. The outcome is a random sparse nonlinear function of
// the features with a heterogeneous treatment effect; regression adds
// Gaussian noise, classification draws Bernoulli(logistic(.)). Throws
// ConfigError when rows < 50 or input_dim < 2.
SceneDataset make_synthetic_scene(const SyntheticSceneConfig& cfg);
SceneDataset make_synthetic_scene(TaskKind kind, std::size_t rows, std::size_t input_dim,
                                  std::uint64_t seed);

struct SceneSystem {
  std::shared_ptr<const SceneDataset> data;
  // Rows that define true metrics (20%).
  std::vector<std::size_t> system_rows;
  // Rows available to proxy estimators (80%).
  std::vector<std::size_t> proxy_pool;
  // Seed of the split; the one source of the system's irreducible noise.
  std::uint64_t noise_seed = 0;
};

inline constexpr double kSystemFraction = 0.2;

// Uniformly random 20/80 split. Throws ConfigError when rows < 10.
SceneSystem build_system(std::shared_ptr<const SceneDataset> data, std::uint64_t seed);

// Agent score for every dataset row (output 0; a probability for
// classification agents).
std::vector<double> score_rows(const SceneDataset& data, const AgentSpec& agent);

// Metrics of precomputed per-row scores restricted to `rows`.
MetricVector evaluate_rows(const SceneDataset& data, std::span<const std::size_t> rows,
                           std::span<const double> scores_by_row);

MetricVector true_metric(const SceneSystem& system, const AgentSpec& agent);
MetricVector true_metric(const SceneSystem& system, std::span<const double> scores_by_row);

}  // namespace evalmodel

#endif  // EVALMODEL_SCENE_HPP_
