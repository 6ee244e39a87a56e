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

// Heterogeneous space of frozen mini agents (linear maps and narrow MLPs),
// their sampling, execution and per-type fixed-width encoding.

#ifndef EVALMODEL_AGENT_SPACE_HPP_
#define EVALMODEL_AGENT_SPACE_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evalmodel/random.hpp"

namespace evalmodel {

enum class AgentType { kLinear = 0, kMlp = 1 };

enum class TaskKind { kRegression, kBinaryClassification, kTernaryDecision };

const char* to_string(AgentType type);
const char* to_string(TaskKind task);
TaskKind task_kind_from_string(const std::string& name);

struct AgentSpec {
  AgentType agent_type = AgentType::kLinear;
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;
  // Empty for linear agents; widths in [1, 8] otherwise.
  std::vector<std::size_t> hidden_dims;
  // Layer-major; within a layer, row-major (output unit, input unit).
  std::vector<double> weights;
  std::vector<double> bias;
  TaskKind task_kind = TaskKind::kRegression;

  // Layer widths [input, hidden..., output].
  std::vector<std::size_t> layer_dims() const;
  std::size_t expected_weight_count() const;
  std::size_t expected_bias_count() const;
  // Throws ConfigError when any invariant is broken.
  void validate() const;

  friend bool operator==(const AgentSpec&, const AgentSpec&) = default;
};

struct SpaceConfig {
  std::size_t input_dim = 0;
  std::size_t output_dim = 1;
  std::size_t max_hidden = 8;
  // Hidden-layer count is drawn uniformly from [1, max_depth].
  std::size_t max_depth = 2;
  // Probability of drawing a linear agent.
  double type_probability = 0.5;
  double param_mean = 0.0;
  double param_std = 1.0;
  TaskKind task_kind = TaskKind::kRegression;
  std::uint64_t seed = 0;

  void validate() const;
};

inline constexpr const char* kSpaceConfigSchema = "evalmodel.space_config/1";
inline constexpr const char* kAgentSchema = "evalmodel.agent/1";

nlohmann::json to_json(const SpaceConfig& cfg);
SpaceConfig space_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AgentSpec& agent);
AgentSpec agent_from_json(const nlohmann::json& j);

AgentSpec sample_agent(const SpaceConfig& cfg, RandomStream& stream);

// Linear: affine map. Mlp: ReLU hidden layers, affine output. The head is
// logistic for binary classification and identity otherwise (ternary agents
// emit 3 raw scores).
std::vector<double> forward(const AgentSpec& agent, std::span<const double> features);

// Argmax of the ternary head, ties to the lowest index.
int decide(const AgentSpec& agent, std::span<const double> features);

struct SubjectVector {
  int type_id = 0;
  std::vector<double> values;

  std::size_t width() const { return values.size(); }
  friend bool operator==(const SubjectVector&, const SubjectVector&) = default;
};

// Width of every SubjectVector produced under cfg:
// 4 header fields + max_depth hidden widths + the largest parameter count.
std::size_t subject_width(const SpaceConfig& cfg);

// Layout: [type_id, input_dim, output_dim, n_hidden, hidden widths (padded
// to max_depth), weights, biases, zero padding]. Throws EncodingError if the
// agent does not fit the space.
SubjectVector vectorize(const AgentSpec& agent, const SpaceConfig& cfg);

// Inverse of vectorize; the task kind comes from cfg.
AgentSpec decode(const SubjectVector& subject, const SpaceConfig& cfg);

}  // namespace evalmodel

#endif  // EVALMODEL_AGENT_SPACE_HPP_
