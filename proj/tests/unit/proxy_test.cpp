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

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "evalmodel/errors.hpp"
#include "evalmodel/proxy.hpp"
#include "evalmodel/random.hpp"
#include "evalmodel/scene.hpp"

namespace evalmodel {
namespace {

// Classification rows with random scores correlated with the labels.
struct ScoredScene {
  SceneDataset data;
  std::vector<double> scores;
  std::vector<std::size_t> pool;
};

ScoredScene classification_scene(std::size_t n, std::uint64_t seed) {
  ScoredScene s;
  RandomStream rng(seed);
  s.data.task_kind = TaskKind::kBinaryClassification;
  s.data.features = Matrix(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const bool y = rng.bernoulli(0.4);
    s.data.targets.push_back(y ? 1.0 : 0.0);
    s.scores.push_back(std::clamp(0.5 + (y ? 0.15 : -0.15) + rng.normal(0.0, 0.3), 0.0, 1.0));
    s.pool.push_back(i);
  }
  return s;
}

TEST(Holdout, FullFractionEqualsPool) {
  const auto s = classification_scene(500, 1);
  EXPECT_EQ(holdout_proxy(s.data, s.pool, s.scores, 1.0, 3),
            evaluate_rows(s.data, s.pool, s.scores));
  EXPECT_EQ(holdout_proxy(s.data, s.pool, s.scores, 0.5, 3),
            holdout_proxy(s.data, s.pool, s.scores, 0.5, 3));
  EXPECT_THROW(holdout_proxy(s.data, s.pool, s.scores, 0.0, 3), ConfigError);
  EXPECT_THROW(holdout_proxy(s.data, s.pool, s.scores, 1.5, 3), ConfigError);
}

TEST(Holdout, SmallFractionConcentrates) {
  const auto s = classification_scene(10000, 2);
  const double pool_acc = evaluate_rows(s.data, s.pool, s.scores).get("acc");
  int close = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const double acc = holdout_proxy(s.data, s.pool, s.scores, 0.1, seed).get("acc");
    close += std::abs(acc - pool_acc) < 0.1 ? 1 : 0;
  }
  EXPECT_GE(close, 190);
}

TEST(Holdout, SingleClassSubsampleIsDegenerate) {
  auto s = classification_scene(100, 3);
  std::fill(s.data.targets.begin(), s.data.targets.end(), 0.0);
  s.data.targets[0] = 1.0;
  EXPECT_THROW(holdout_proxy(s.data, std::vector<std::size_t>{1, 2, 3}, s.scores, 1.0, 0),
               DegenerateInputError);
}

TEST(KFold, EqualFoldsAccMatchesPool) {
  const auto s = classification_scene(1000, 4);
  const double pool_acc = evaluate_rows(s.data, s.pool, s.scores).get("acc");
  for (std::size_t k : {2, 5, 10}) {
    const auto r = kfold_proxy(s.data, s.pool, s.scores, k, 11);
    EXPECT_NEAR(r.metrics.get("acc"), pool_acc, 1e-12) << k;
    EXPECT_EQ(r.skipped_folds, 0u);
  }
}

TEST(KFold, SameSeedSameFolds) {
  const auto s = classification_scene(300, 5);
  std::vector<std::vector<std::size_t>> a, b;
  kfold_proxy(s.data, s.pool, s.scores, 5, 9,
              [&](std::span<const std::size_t> f) { a.emplace_back(f.begin(), f.end()); });
  kfold_proxy(s.data, s.pool, s.scores, 5, 9,
              [&](std::span<const std::size_t> f) { b.emplace_back(f.begin(), f.end()); });
  EXPECT_EQ(a, b);
  std::set<std::size_t> seen;
  for (const auto& f : a) seen.insert(f.begin(), f.end());
  EXPECT_EQ(seen.size(), 300u);
}

TEST(KFold, LeaveOneOutRegression) {
  SceneDataset data;
  data.task_kind = TaskKind::kRegression;
  data.features = Matrix(30, 1);
  std::vector<double> scores;
  std::vector<std::size_t> pool;
  RandomStream rng(6);
  double mean_abs = 0.0;
  for (std::size_t i = 0; i < 30; ++i) {
    data.targets.push_back(rng.normal(2.0, 1.0));
    scores.push_back(data.targets.back() + rng.normal());
    mean_abs += std::abs(scores.back() - data.targets.back()) / 30.0;
    pool.push_back(i);
  }
  const auto r = kfold_proxy(data, pool, scores, 30, 0);
  EXPECT_NEAR(r.metrics.get("rmse"), mean_abs, 1e-12);
  EXPECT_NEAR(r.metrics.get("mae"), mean_abs, 1e-12);
  EXPECT_TRUE(std::isnan(r.metrics.get("r2")));
  EXPECT_EQ(r.skipped_folds, 30u);
}

TEST(KFold, Errors) {
  const auto s = classification_scene(20, 7);
  EXPECT_THROW(kfold_proxy(s.data, s.pool, s.scores, 1, 0), ConfigError);
  EXPECT_THROW(kfold_proxy(s.data, s.pool, s.scores, 21, 0), ConfigError);
}

TEST(Bootstrap, ConstantErrorMatchesPool) {
  SceneDataset data;
  data.task_kind = TaskKind::kRegression;
  data.features = Matrix(50, 1);
  std::vector<double> scores;
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < 50; ++i) {
    data.targets.push_back(i % 2 == 0 ? 1.0 : 2.0);
    scores.push_back(data.targets.back() + 0.5);
    pool.push_back(i);
  }
  const auto b = bootstrap_proxy(data, pool, scores, 4);
  const auto p = evaluate_rows(data, pool, scores);
  EXPECT_DOUBLE_EQ(b.get("rmse"), p.get("rmse"));
  EXPECT_DOUBLE_EQ(b.get("mae"), p.get("mae"));
}

TEST(Bootstrap, SameSeedSameResample) {
  const auto s = classification_scene(200, 8);
  std::vector<std::size_t> a, b;
  bootstrap_proxy(s.data, s.pool, s.scores, 5,
                  [&](std::span<const std::size_t> r) { a.assign(r.begin(), r.end()); });
  bootstrap_proxy(s.data, s.pool, s.scores, 5,
                  [&](std::span<const std::size_t> r) { b.assign(r.begin(), r.end()); });
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.size(), 200u);
}

TEST(Bootstrap, ConsistentWithPool) {
  const auto s = classification_scene(5000, 9);
  const double pool_acc = evaluate_rows(s.data, s.pool, s.scores).get("acc");
  double sum = 0.0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    sum += bootstrap_proxy(s.data, s.pool, s.scores, seed).get("acc");
  }
  EXPECT_NEAR(sum / 1000.0, pool_acc, 0.02);
}

TEST(Bootstrap, DegenerateAfterRetries) {
  auto s = classification_scene(50, 10);
  std::fill(s.data.targets.begin(), s.data.targets.end(), 1.0);
  EXPECT_THROW(bootstrap_proxy(s.data, s.pool, s.scores, 0), DegenerateInputError);
}

TEST(ProxyMetrics, NeverTouchSystemRows) {
  auto data = std::make_shared<const SceneDataset>(make_synthetic_scene(TaskKind::kBinaryClassification, 500, 4, 1));
  const auto sys = build_system(data, 2);
  const std::set<std::size_t> system_rows(sys.system_rows.begin(), sys.system_rows.end());
  std::vector<double> scores(data->rows());
  RandomStream rng(3);
  for (auto& v : scores) v = rng.uniform();
  std::size_t touched = 0;
  const auto out = proxy_metrics(sys, scores, ProxyConfig{}, [&](std::span<const std::size_t> rows) {
    for (auto r : rows) {
      EXPECT_FALSE(system_rows.contains(r));
      ++touched;
    }
  });
  EXPECT_EQ(out.size(), 7u);
  EXPECT_GT(touched, 0u);
  EXPECT_EQ(estimator_names(ProxyConfig{}),
            (std::vector<std::string>{"holdout-100", "holdout-50", "holdout-20", "holdout-10",
                                      "cv-5", "cv-10", "bootstrap"}));
  EXPECT_EQ(proxy_column_names(ProxyConfig{}, MetricKind::kClassification).size(), 42u);
}

TEST(ProxyConfigTest, JsonRoundTripAndValidation) {
  ProxyConfig cfg;
  cfg.holdout_fractions = {1.0, 0.3};
  cfg.cv_folds = {3};
  cfg.bootstrap = false;
  const auto back = proxy_config_from_json(to_json(cfg));
  EXPECT_EQ(back.holdout_fractions, cfg.holdout_fractions);
  EXPECT_EQ(back.cv_folds, cfg.cv_folds);
  EXPECT_EQ(back.bootstrap, false);
  cfg.cv_folds = {1};
  EXPECT_THROW(cfg.validate(), ConfigError);
}

}  // namespace
}  // namespace evalmodel
