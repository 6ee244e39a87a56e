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

#include "evalmodel/agent_space.hpp"

#include <algorithm>
#include <cmath>

#include "evalmodel/errors.hpp"

namespace evalmodel {
namespace {

constexpr std::size_t kHeaderFields = 4;

std::size_t param_count(std::span<const std::size_t> dims) {
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) total += dims[l] * dims[l + 1] + dims[l + 1];
  return total;
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::size_t as_count(double v, const char* what) {
  if (!(v >= 0.0) || v != std::floor(v)) {
    throw EncodingError(std::string("subject vector field '") + what + "' is not a count");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

const char* to_string(AgentType type) {
  return type == AgentType::kLinear ? "linear" : "mlp";
}

const char* to_string(TaskKind task) {
  switch (task) {
    case TaskKind::kRegression:
      return "regression";
    case TaskKind::kBinaryClassification:
      return "binary_classification";
    case TaskKind::kTernaryDecision:
      return "ternary_decision";
  }
  return "unknown";
}

TaskKind task_kind_from_string(const std::string& name) {
  if (name == "regression") return TaskKind::kRegression;
  if (name == "binary_classification" || name == "classification") {
    return TaskKind::kBinaryClassification;
  }
  if (name == "ternary_decision") return TaskKind::kTernaryDecision;
  throw ConfigError("unknown task kind '" + name + "'");
}

std::vector<std::size_t> AgentSpec::layer_dims() const {
  std::vector<std::size_t> dims;
  dims.reserve(hidden_dims.size() + 2);
  dims.push_back(input_dim);
  dims.insert(dims.end(), hidden_dims.begin(), hidden_dims.end());
  dims.push_back(output_dim);
  return dims;
}

std::size_t AgentSpec::expected_weight_count() const {
  const auto dims = layer_dims();
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) total += dims[l] * dims[l + 1];
  return total;
}

std::size_t AgentSpec::expected_bias_count() const {
  std::size_t total = output_dim;
  for (auto h : hidden_dims) total += h;
  return total;
}

void AgentSpec::validate() const {
  if (input_dim == 0 || output_dim == 0) throw ConfigError("agent dimensions must be positive");
  if ((agent_type == AgentType::kMlp) == hidden_dims.empty()) {
    throw ConfigError("hidden layers must be present exactly for MLP agents");
  }
  for (auto h : hidden_dims) {
    if (h < 1 || h > 8) throw ConfigError("hidden width must lie in [1, 8]");
  }
  if (weights.size() != expected_weight_count() || bias.size() != expected_bias_count()) {
    throw ConfigError("agent parameter count does not match its dimensions");
  }
  if (task_kind == TaskKind::kTernaryDecision && output_dim != 3) {
    throw ConfigError("ternary decision agents need output_dim = 3");
  }
}

void SpaceConfig::validate() const {
  if (input_dim == 0 || output_dim == 0) {
    throw ConfigError("space input_dim and output_dim must be positive");
  }
  if (max_hidden < 1 || max_hidden > 8) throw ConfigError("max_hidden must lie in [1, 8]");
  if (max_depth < 1) throw ConfigError("max_depth must be at least 1");
  if (!(type_probability >= 0.0 && type_probability <= 1.0)) {
    throw ConfigError("type_probability must lie in [0, 1]");
  }
  if (!(param_std > 0.0)) throw ConfigError("param_std must be positive");
  if (task_kind == TaskKind::kTernaryDecision && output_dim != 3) {
    throw ConfigError("ternary decision spaces need output_dim = 3");
  }
}

nlohmann::json to_json(const SpaceConfig& cfg) {
  return {{"schema", kSpaceConfigSchema},
          {"input_dim", cfg.input_dim},
          {"output_dim", cfg.output_dim},
          {"max_hidden", cfg.max_hidden},
          {"max_depth", cfg.max_depth},
          {"type_probability", cfg.type_probability},
          {"param_law", {{"mean", cfg.param_mean}, {"std", cfg.param_std}}},
          {"task_kind", to_string(cfg.task_kind)},
          {"seed", cfg.seed}};
}

SpaceConfig space_config_from_json(const nlohmann::json& j) {
  if (j.value("schema", std::string{}) != kSpaceConfigSchema) {
    throw ConfigError("space config: unsupported schema");
  }
  SpaceConfig cfg;
  try {
    cfg.input_dim = j.at("input_dim").get<std::size_t>();
    cfg.output_dim = j.at("output_dim").get<std::size_t>();
    cfg.max_hidden = j.value("max_hidden", cfg.max_hidden);
    cfg.max_depth = j.value("max_depth", cfg.max_depth);
    cfg.type_probability = j.value("type_probability", cfg.type_probability);
    if (j.contains("param_law")) {
      cfg.param_mean = j["param_law"].value("mean", cfg.param_mean);
      cfg.param_std = j["param_law"].value("std", cfg.param_std);
    }
    cfg.task_kind = task_kind_from_string(j.value("task_kind", std::string("regression")));
    cfg.seed = j.value("seed", cfg.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("space config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

nlohmann::json to_json(const AgentSpec& agent) {
  return {{"schema", kAgentSchema},
          {"agent_type", to_string(agent.agent_type)},
          {"input_dim", agent.input_dim},
          {"output_dim", agent.output_dim},
          {"hidden_dims", agent.hidden_dims},
          {"weights", agent.weights},
          {"bias", agent.bias},
          {"task_kind", to_string(agent.task_kind)}};
}

AgentSpec agent_from_json(const nlohmann::json& j) {
  if (j.value("schema", std::string{}) != kAgentSchema) {
    throw ConfigError("agent: unsupported schema");
  }
  AgentSpec a;
  try {
    a.agent_type = j.at("agent_type").get<std::string>() == "mlp" ? AgentType::kMlp
                                                                  : AgentType::kLinear;
    a.input_dim = j.at("input_dim").get<std::size_t>();
    a.output_dim = j.at("output_dim").get<std::size_t>();
    a.hidden_dims = j.at("hidden_dims").get<std::vector<std::size_t>>();
    a.weights = j.at("weights").get<std::vector<double>>();
    a.bias = j.at("bias").get<std::vector<double>>();
    a.task_kind = task_kind_from_string(j.at("task_kind").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("agent: ") + e.what());
  }
  a.validate();
  return a;
}

AgentSpec sample_agent(const SpaceConfig& cfg, RandomStream& stream) {
  cfg.validate();
  AgentSpec a;
  a.input_dim = cfg.input_dim;
  a.output_dim = cfg.output_dim;
  a.task_kind = cfg.task_kind;
  if (stream.bernoulli(cfg.type_probability)) {
    a.agent_type = AgentType::kLinear;
  } else {
    a.agent_type = AgentType::kMlp;
    const auto depth = static_cast<std::size_t>(stream.uniform_int(1, cfg.max_depth));
    for (std::size_t l = 0; l < depth; ++l) {
      a.hidden_dims.push_back(static_cast<std::size_t>(stream.uniform_int(1, cfg.max_hidden)));
    }
  }
  a.weights.resize(a.expected_weight_count());
  a.bias.resize(a.expected_bias_count());
  for (auto& w : a.weights) w = stream.normal(cfg.param_mean, cfg.param_std);
  for (auto& b : a.bias) b = stream.normal(cfg.param_mean, cfg.param_std);
  return a;
}

std::vector<double> forward(const AgentSpec& agent, std::span<const double> features) {
  if (features.size() != agent.input_dim) {
    throw InputError("agent expects " + std::to_string(agent.input_dim) + " features, got " +
                     std::to_string(features.size()));
  }
  const auto dims = agent.layer_dims();
  std::vector<double> current(features.begin(), features.end());
  std::vector<double> next;
  std::size_t w_off = 0;
  std::size_t b_off = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const std::size_t in = dims[l];
    const std::size_t out = dims[l + 1];
    const bool hidden = l + 2 < dims.size();
    next.assign(out, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      double acc = agent.bias[b_off + o];
      const double* w = agent.weights.data() + w_off + o * in;
      for (std::size_t i = 0; i < in; ++i) acc += w[i] * current[i];
      next[o] = hidden ? std::max(0.0, acc) : acc;
    }
    w_off += in * out;
    b_off += out;
    current.swap(next);
  }
  if (agent.task_kind == TaskKind::kBinaryClassification) {
    for (auto& v : current) v = logistic(v);
  }
  return current;
}

int decide(const AgentSpec& agent, std::span<const double> features) {
  const auto scores = forward(agent, features);
  return static_cast<int>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

std::size_t subject_width(const SpaceConfig& cfg) {
  std::vector<std::size_t> linear = {cfg.input_dim, cfg.output_dim};
  std::vector<std::size_t> deepest = {cfg.input_dim};
  for (std::size_t l = 0; l < cfg.max_depth; ++l) deepest.push_back(cfg.max_hidden);
  deepest.push_back(cfg.output_dim);
  // Every extra layer or unit adds parameters, so the widest, deepest MLP
  // bounds every MLP; a linear agent can still be larger when max_hidden is
  // small.
  const std::size_t widest = std::max(param_count(linear), param_count(deepest));
  return kHeaderFields + cfg.max_depth + widest;
}

SubjectVector vectorize(const AgentSpec& agent, const SpaceConfig& cfg) {
  agent.validate();
  if (agent.input_dim != cfg.input_dim || agent.output_dim != cfg.output_dim) {
    throw EncodingError("agent dimensions do not match the space");
  }
  if (agent.hidden_dims.size() > cfg.max_depth) throw EncodingError("agent is deeper than the space");
  for (auto h : agent.hidden_dims) {
    if (h > cfg.max_hidden) throw EncodingError("agent is wider than the space");
  }
  const std::size_t width = subject_width(cfg);
  SubjectVector v;
  v.type_id = static_cast<int>(agent.agent_type);
  v.values.reserve(width);
  v.values.push_back(static_cast<double>(v.type_id));
  v.values.push_back(static_cast<double>(agent.input_dim));
  v.values.push_back(static_cast<double>(agent.output_dim));
  v.values.push_back(static_cast<double>(agent.hidden_dims.size()));
  for (std::size_t l = 0; l < cfg.max_depth; ++l) {
    v.values.push_back(l < agent.hidden_dims.size() ? static_cast<double>(agent.hidden_dims[l])
                                                    : 0.0);
  }
  v.values.insert(v.values.end(), agent.weights.begin(), agent.weights.end());
  v.values.insert(v.values.end(), agent.bias.begin(), agent.bias.end());
  if (v.values.size() > width) throw EncodingError("agent exceeds the space's vector width");
  v.values.resize(width, 0.0);
  return v;
}

AgentSpec decode(const SubjectVector& subject, const SpaceConfig& cfg) {
  const auto& v = subject.values;
  if (v.size() != subject_width(cfg)) throw EncodingError("subject vector has the wrong width");
  AgentSpec a;
  const auto type_id = as_count(v[0], "type_id");
  if (type_id > 1) throw EncodingError("unknown agent type id");
  a.agent_type = static_cast<AgentType>(type_id);
  a.input_dim = as_count(v[1], "input_dim");
  a.output_dim = as_count(v[2], "output_dim");
  const auto depth = as_count(v[3], "n_hidden");
  if (depth > cfg.max_depth) throw EncodingError("subject vector depth exceeds the space");
  for (std::size_t l = 0; l < depth; ++l) a.hidden_dims.push_back(as_count(v[4 + l], "hidden"));
  a.task_kind = cfg.task_kind;
  std::size_t off = kHeaderFields + cfg.max_depth;
  const std::size_t nw = a.expected_weight_count();
  const std::size_t nb = a.expected_bias_count();
  if (off + nw + nb > v.size()) throw EncodingError("subject vector is truncated");
  a.weights.assign(v.begin() + static_cast<std::ptrdiff_t>(off),
                   v.begin() + static_cast<std::ptrdiff_t>(off + nw));
  off += nw;
  a.bias.assign(v.begin() + static_cast<std::ptrdiff_t>(off),
                v.begin() + static_cast<std::ptrdiff_t>(off + nb));
  try {
    a.validate();
  } catch (const ConfigError& e) {
    throw EncodingError(std::string("decoded agent is invalid: ") + e.what());
  }
  return a;
}

}  // namespace evalmodel
