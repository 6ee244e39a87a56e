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

// Dataset-based proxy metrics: holdout-p, k-fold and bootstrap estimates of
// an agent's metric computed on the proxy pool only.
//
// Agents are frozen, so "holdout-p" evaluates the agent on a p-fraction
// subsample of the pool; nothing is refit.

#ifndef EVALMODEL_PROXY_HPP_
#define EVALMODEL_PROXY_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evalmodel/agent_space.hpp"
#include "evalmodel/metrics.hpp"
#include "evalmodel/scene.hpp"

namespace evalmodel {

struct ProxyConfig {
  std::vector<double> holdout_fractions = {1.0, 0.5, 0.2, 0.1};
  std::vector<std::size_t> cv_folds = {5, 10};
  bool bootstrap = true;
  std::uint64_t seed = 0;

  void validate() const;
};

nlohmann::json to_json(const ProxyConfig& cfg);
ProxyConfig proxy_config_from_json(const nlohmann::json& j);

// Receives every dataset row index an estimator evaluates.
using RowAudit = std::function<void(std::span<const std::size_t>)>;

// The estimators below take the agent's precomputed per-row scores
// (score_rows) so one forward pass serves every estimator.

MetricVector holdout_proxy(const SceneDataset& data, std::span<const std::size_t> pool,
                           std::span<const double> scores_by_row, double fraction,
                           std::uint64_t seed, const RowAudit& audit = {});

// Each metric is averaged over the folds where it is defined; a metric
// undefined on every fold is nan (leave-one-out has no r2). Throws
// DegenerateInputError when no metric is defined on any fold.
struct KFoldResult {
  MetricVector metrics;
  // Folds on which at least one metric was undefined.
  std::size_t skipped_folds = 0;
};

KFoldResult kfold_proxy(const SceneDataset& data, std::span<const std::size_t> pool,
                        std::span<const double> scores_by_row, std::size_t k,
                        std::uint64_t seed, const RowAudit& audit = {});

MetricVector bootstrap_proxy(const SceneDataset& data, std::span<const std::size_t> pool,
                             std::span<const double> scores_by_row, std::uint64_t seed,
                             const RowAudit& audit = {});

// Agent-taking conveniences.
MetricVector holdout_proxy(const SceneSystem& system, const AgentSpec& agent, double fraction,
                           std::uint64_t seed);
KFoldResult kfold_proxy(const SceneSystem& system, const AgentSpec& agent, std::size_t k,
                        std::uint64_t seed);
MetricVector bootstrap_proxy(const SceneSystem& system, const AgentSpec& agent,
                             std::uint64_t seed);

// Estimator names in proxy-vector order, e.g. holdout-100, holdout-50,
// holdout-20, holdout-10, cv-5, cv-10, bootstrap.
std::vector<std::string> estimator_names(const ProxyConfig& cfg);

// "<estimator>.<metric>" for every entry of the flattened proxy vector.
std::vector<std::string> proxy_column_names(const ProxyConfig& cfg, MetricKind kind);

// One MetricVector per estimator, in estimator_names order. Every estimator
// derives its seed from cfg.seed, so all agents share the same subsamples.
std::vector<MetricVector> proxy_metrics(const SceneSystem& system,
                                        std::span<const double> scores_by_row,
                                        const ProxyConfig& cfg, const RowAudit& audit = {});

std::vector<double> flatten(const std::vector<MetricVector>& metrics);

}  // namespace evalmodel

#endif  // EVALMODEL_PROXY_HPP_
