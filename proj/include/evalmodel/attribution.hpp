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

#ifndef EVALMODEL_ATTRIBUTION_HPP_
#define EVALMODEL_ATTRIBUTION_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evalmodel/eval_model.hpp"

namespace evalmodel {

// Cooperative game over at most 3 players. Coalitions are bitmasks over the
// player list (bit i set = players[i] in the coalition).
struct CoalitionGame {
  std::vector<std::string> players;
  std::map<std::uint32_t, double> value_of;

  double value(std::uint32_t mask) const;
  bool complete() const;
};

// Exact Shapley values by averaging marginal contributions over all k!
// player orderings. Throws InputError if the game is incomplete or k > 3.
std::map<std::string, double> shapley_values(const CoalitionGame& game);

// Player names used by coalition_values.
inline constexpr const char* kSubjectPlayer = "subject";
inline constexpr const char* kProxyPlayer = "proxy";
inline constexpr const char* kConditionPlayer = "condition";

// Fits one evaluation model per non-empty coalition of feature blocks and
// scores it by -RMSE on `test`. The empty coalition is the baseline that
// predicts the true metric by proxies[baseline_proxy_index] (holdout-100 for
// scenes, Last10Days for the trade scene).
CoalitionGame coalition_values(const std::vector<EvaluationSample>& train,
                               const std::vector<EvaluationSample>& test,
                               const std::vector<std::string>& players,
                               const BaseLearnerConfig& learner,
                               std::size_t baseline_proxy_index,
                               const MetricClamp& clamp = {});

// JSON report: per-player value, contribution share, coalition table.
nlohmann::json attribution_report(const CoalitionGame& game);

}  // namespace evalmodel

#endif  // EVALMODEL_ATTRIBUTION_HPP_
