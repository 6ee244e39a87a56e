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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "evalmodel/attribution.hpp"
#include "evalmodel/errors.hpp"
#include "evalmodel/random.hpp"

namespace evalmodel {
namespace {

double factorial(int k) { return k <= 1 ? 1.0 : k * factorial(k - 1); }

// Closed-form subset weighting |S|!(k-|S|-1)!/k! over coalitions without i.
std::vector<double> shapley_oracle(const CoalitionGame& g) {
  const int k = static_cast<int>(g.players.size());
  std::vector<double> phi(k, 0.0);
  for (int i = 0; i < k; ++i) {
    for (std::uint32_t s = 0; s < (1u << k); ++s) {
      if (s & (1u << i)) continue;
      const int size = __builtin_popcount(s);
      const double w = factorial(size) * factorial(k - size - 1) / factorial(k);
      phi[i] += w * (g.value(s | (1u << i)) - g.value(s));
    }
  }
  return phi;
}

CoalitionGame game3(const std::vector<double>& v) {
  CoalitionGame g{{"a", "b", "c"}, {}};
  for (std::uint32_t m = 0; m < 8; ++m) g.value_of[m] = v[m];
  return g;
}

TEST(Shapley, ThreePlayerGameMatchesOracle) {
  // Masks: 0, a, b, ab, c, ac, bc, abc.
  const auto g = game3({0, 1, 2, 4, 0, 1, 2, 5});
  const auto phi = shapley_values(g);
  EXPECT_NEAR(phi.at("a"), 11.0 / 6.0, 1e-12);
  EXPECT_NEAR(phi.at("b"), 17.0 / 6.0, 1e-12);
  EXPECT_NEAR(phi.at("c"), 1.0 / 3.0, 1e-12);
  const auto oracle = shapley_oracle(g);
  EXPECT_NEAR(phi.at("a"), oracle[0], 1e-12);
  EXPECT_NEAR(phi.at("b"), oracle[1], 1e-12);
  EXPECT_NEAR(phi.at("c"), oracle[2], 1e-12);
}

TEST(Shapley, SymmetricTwoPlayerGame) {
  CoalitionGame g{{"a", "b"}, {{0, 0.0}, {1, 1.0}, {2, 1.0}, {3, 4.0}}};
  const auto phi = shapley_values(g);
  EXPECT_DOUBLE_EQ(phi.at("a"), 2.0);
  EXPECT_DOUBLE_EQ(phi.at("b"), 2.0);
}

TEST(Shapley, AdditiveGame) {
  const std::vector<double> w = {0.3, -1.2, 2.5};
  std::vector<double> v(8, 0.0);
  for (std::uint32_t m = 0; m < 8; ++m) {
    for (int i = 0; i < 3; ++i) v[m] += (m >> i & 1u) ? w[i] : 0.0;
  }
  const auto phi = shapley_values(game3(v));
  EXPECT_NEAR(phi.at("a"), w[0], 1e-12);
  EXPECT_NEAR(phi.at("b"), w[1], 1e-12);
  EXPECT_NEAR(phi.at("c"), w[2], 1e-12);
}

TEST(Shapley, EfficiencyOnRandomGames) {
  RandomStream rng(1);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> v(8);
    for (auto& x : v) x = rng.normal(0.0, 3.0);
    const auto g = game3(v);
    const auto phi = shapley_values(g);
    const auto oracle = shapley_oracle(g);
    EXPECT_NEAR(phi.at("a") + phi.at("b") + phi.at("c"), v[7] - v[0], 1e-12);
    EXPECT_NEAR(phi.at("a"), oracle[0], 1e-12);
  }
}

TEST(Shapley, RejectsIncompleteOrLargeGames) {
  auto g = game3({0, 1, 2, 4, 0, 1, 2, 5});
  g.value_of.erase(5);
  EXPECT_FALSE(g.complete());
  EXPECT_THROW(shapley_values(g), InputError);
  CoalitionGame big{{"a", "b", "c", "d"}, {}};
  for (std::uint32_t m = 0; m < 16; ++m) big.value_of[m] = 0.0;
  EXPECT_THROW(shapley_values(big), InputError);
}

// Target equals the first proxy; the subject carries only noise.
std::vector<EvaluationSample> proxy_driven(std::size_t n, std::uint64_t seed) {
  RandomStream rng(seed);
  std::vector<EvaluationSample> out;
  for (std::size_t i = 0; i < n; ++i) {
    EvaluationSample s;
    s.subject.values = {0.0, rng.normal(), rng.normal()};
    const double t = rng.uniform();
    s.proxies = {t + rng.normal(0.0, 0.05), rng.uniform()};
    s.true_metric = t;
    out.push_back(s);
  }
  return out;
}

TEST(CoalitionValues, ProxyDominatesWhenTargetIsProxy) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto g = coalition_values(proxy_driven(300, seed), proxy_driven(100, seed + 100),
                                    {kSubjectPlayer, kProxyPlayer}, BaseLearnerConfig{}, 0);
    ASSERT_TRUE(g.complete());
    EXPECT_GE(g.value(2), g.value(1)) << seed;
    const auto phi = shapley_values(g);
    EXPECT_GT(phi.at(kProxyPlayer), phi.at(kSubjectPlayer)) << seed;
  }
}

TEST(CoalitionValues, DuplicateBlocksGiveEqualSingletons) {
  auto train = proxy_driven(200, 1);
  auto test = proxy_driven(80, 2);
  for (auto* set : {&train, &test}) {
    for (auto& s : *set) s.condition = s.proxies;
  }
  const auto g = coalition_values(train, test, {kConditionPlayer, kProxyPlayer}, BaseLearnerConfig{}, 0);
  EXPECT_DOUBLE_EQ(g.value(1), g.value(2));
  const auto phi = shapley_values(g);
  EXPECT_NEAR(phi.at(kConditionPlayer), phi.at(kProxyPlayer), 1e-12);
}

TEST(CoalitionValues, BadInputsThrow) {
  const auto train = proxy_driven(50, 1);
  EXPECT_THROW(coalition_values(train, train, {"weather"}, BaseLearnerConfig{}, 0), InputError);
  EXPECT_THROW(coalition_values(train, train, {kConditionPlayer}, BaseLearnerConfig{}, 0), InputError);
  EXPECT_THROW(coalition_values(train, train, {kProxyPlayer}, BaseLearnerConfig{}, 9), InputError);
  EXPECT_THROW(coalition_values({}, train, {kProxyPlayer}, BaseLearnerConfig{}, 0), InputError);
}

TEST(Shapley, NullPlayerAndSymmetry) {
  // c never changes v; a and b are interchangeable.
  const auto phi = shapley_values(game3({0, 2, 2, 7, 0, 2, 2, 7}));
  EXPECT_NEAR(phi.at("c"), 0.0, 1e-12);
  EXPECT_NEAR(phi.at("a"), phi.at("b"), 1e-12);
}

TEST(AttributionReport, SharesSumToOne) {
  const auto g = game3({0, 1, 2, 4, 0, 1, 2, 5});
  const auto j = attribution_report(g);
  double total = 0.0;
  for (const auto& entry : j.at("players")) total += entry.at("share").get<double>();
  EXPECT_NEAR(total, 1.0, 1e-12);
}

}  // namespace
}  // namespace evalmodel
