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

#ifndef EVALMODEL_EVALUATION_SAMPLE_HPP_
#define EVALMODEL_EVALUATION_SAMPLE_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "evalmodel/agent_space.hpp"
#include "evalmodel/metrics.hpp"
#include "evalmodel/proxy.hpp"
#include "evalmodel/scene.hpp"

namespace evalmodel {

// One (condition, subject, proxies) -> true metric observation.
struct EvaluationSample {
  // Empty when the scene has no evaluation condition.
  std::vector<double> condition;
  SubjectVector subject;
  std::vector<double> proxies;
  double true_metric = 0.0;

  friend bool operator==(const EvaluationSample&, const EvaluationSample&) = default;
};

struct EvalDataset {
  std::vector<EvaluationSample> train;
  std::vector<EvaluationSample> test;
  std::vector<std::string> condition_names;
  std::vector<std::string> proxy_names;
  std::string metric;
  nlohmann::json provenance = nlohmann::json::object();
};

// Everything measured for one agent in one scene.
struct AgentRecord {
  AgentSpec agent;
  SubjectVector subject;
  MetricVector truth;
  std::vector<MetricVector> proxies;
};

struct SceneRecords {
  std::vector<AgentRecord> records;
  // Agents whose true or proxy metric was undefined.
  std::size_t dropped = 0;
};

SceneRecords compute_scene_records(const SceneSystem& system,
                                   const std::vector<AgentSpec>& agents,
                                   const SpaceConfig& space, const ProxyConfig& proxy);

// One sample per record; the proxy vector holds every metric of every
// estimator, the target is `metric` of the true MetricVector.
std::vector<EvaluationSample> samples_for_metric(const std::vector<AgentRecord>& records,
                                                 std::string_view metric);

// Seeded split of the samples into (train, test), train_frac of them in train.
std::pair<std::vector<EvaluationSample>, std::vector<EvaluationSample>> split_samples(
    std::vector<EvaluationSample> samples, double train_frac, std::uint64_t seed);

// Measures every agent and splits the resulting samples 80/20 by default.
// Throws ConfigError on an empty agent list.
EvalDataset build_eval_dataset(const SceneSystem& system, const std::vector<AgentSpec>& agents,
                               const SpaceConfig& space, const ProxyConfig& proxy,
                               std::string_view metric, double train_frac = 0.8,
                               std::uint64_t seed = 0, bool iris_sampled = true);

// 64-bit FNV-1a, used to fingerprint configs in provenance sidecars.
std::uint64_t fnv1a64(std::string_view text);

inline constexpr const char* kSamplesSchema = "evalmodel.samples/1";

// Columnar CSV (split, type_id, cond.*, subj.*, <estimator>.<metric>...,
// true_metric) plus a JSON sidecar at `path + ".json"` with provenance.
void write_eval_dataset(const std::string& path, const EvalDataset& dataset);
EvalDataset read_eval_dataset(const std::string& path);

}  // namespace evalmodel

#endif  // EVALMODEL_EVALUATION_SAMPLE_HPP_
