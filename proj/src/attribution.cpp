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

#include "evalmodel/attribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "evalmodel/errors.hpp"

namespace evalmodel {
namespace {

std::string coalition_name(const std::vector<std::string>& players, std::uint32_t mask) {
  std::string out = "{";
  for (std::size_t i = 0; i < players.size(); ++i) {
    if ((mask >> i) & 1U) {
      if (out.size() > 1) out += ",";
      out += players[i];
    }
  }
  return out + "}";
}

}  // namespace

double CoalitionGame::value(std::uint32_t mask) const {
  const auto it = value_of.find(mask);
  if (it == value_of.end()) {
    throw InputError("coalition " + coalition_name(players, mask) + " has no value");
  }
  return it->second;
}

bool CoalitionGame::complete() const {
  const std::uint32_t count = 1U << players.size();
  for (std::uint32_t m = 0; m < count; ++m) {
    if (!value_of.contains(m)) return false;
  }
  return true;
}

std::map<std::string, double> shapley_values(const CoalitionGame& game) {
  const std::size_t k = game.players.size();
  if (k == 0 || k > 3) throw InputError("shapley_values supports 1 to 3 players");
  if (!game.complete()) throw InputError("incomplete coalition game");
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> phi(k, 0.0);
  std::size_t orderings = 0;
  do {
    std::uint32_t mask = 0;
    for (std::size_t p : order) {
      const std::uint32_t next = mask | (1U << p);
      phi[p] += game.value(next) - game.value(mask);
      mask = next;
    }
    ++orderings;
  } while (std::next_permutation(order.begin(), order.end()));
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < k; ++i) out[game.players[i]] = phi[i] / static_cast<double>(orderings);
  return out;
}

CoalitionGame coalition_values(const std::vector<EvaluationSample>& train,
                               const std::vector<EvaluationSample>& test,
                               const std::vector<std::string>& players,
                               const BaseLearnerConfig& learner,
                               std::size_t baseline_proxy_index, const MetricClamp& clamp) {
  if (players.empty() || players.size() > 3) throw InputError("need 1 to 3 players");
  if (train.empty() || test.empty()) throw InputError("coalition_values needs train and test");
  for (const auto& p : players) {
    if (p != kSubjectPlayer && p != kProxyPlayer && p != kConditionPlayer) {
      throw InputError("unknown player '" + p + "'");
    }
    const auto& s = train.front();
    const std::size_t dims = p == kSubjectPlayer   ? s.subject.values.size()
                             : p == kProxyPlayer   ? s.proxies.size()
                                                   : s.condition.size();
    if (dims == 0) throw InputError("player '" + p + "' has an empty feature block");
  }
  if (baseline_proxy_index >= train.front().proxies.size()) {
    throw InputError("baseline proxy index out of range");
  }

  CoalitionGame game;
  game.players = players;
  double ss = 0.0;
  for (const auto& s : test) {
    const double e = clamp.apply(s.proxies.at(baseline_proxy_index)) - s.true_metric;
    ss += e * e;
  }
  game.value_of[0] = -std::sqrt(ss / static_cast<double>(test.size()));

  const std::uint32_t count = 1U << players.size();
  for (std::uint32_t mask = 1; mask < count; ++mask) {
    MetaFitOptions options;
    options.clamp = clamp;
    options.blocks = {false, false, false};
    for (std::size_t i = 0; i < players.size(); ++i) {
      if (!((mask >> i) & 1U)) continue;
      if (players[i] == kSubjectPlayer) options.blocks.subject = true;
      if (players[i] == kProxyPlayer) options.blocks.proxy = true;
      if (players[i] == kConditionPlayer) options.blocks.condition = true;
    }
    try {
      const EvaluationModel em = meta_fit(train, learner, options);
      game.value_of[mask] = -prediction_rmse(em, test);
    } catch (const Error& e) {
      throw NumericError("coalition " + coalition_name(players, mask) + " failed: " + e.what());
    }
  }
  return game;
}

nlohmann::json attribution_report(const CoalitionGame& game) {
  const auto phi = shapley_values(game);
  double total = 0.0;
  for (const auto& [name, v] : phi) total += v;
  nlohmann::json players = nlohmann::json::array();
  for (const auto& name : game.players) {
    const double v = phi.at(name);
    players.push_back({{"player", name},
                       {"shapley", v},
                       {"share", total != 0.0 ? nlohmann::json(v / total) : nlohmann::json(nullptr)}});
  }
  nlohmann::json coalitions = nlohmann::json::array();
  for (const auto& [mask, v] : game.value_of) {
    coalitions.push_back({{"coalition", coalition_name(game.players, mask)}, {"value", v}});
  }
  return {{"schema", "evalmodel.attribution/1"},
          {"players", players},
          {"coalitions", coalitions},
          {"grand_minus_null", game.value((1U << game.players.size()) - 1) - game.value(0)}};
}

}  // namespace evalmodel
