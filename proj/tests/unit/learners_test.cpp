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

#include "evalmodel/errors.hpp"
#include "evalmodel/learners.hpp"
#include "evalmodel/random.hpp"

namespace evalmodel {
namespace {

// Ridge normal equations solved by Gaussian elimination with partial
// pivoting; the intercept (last unknown) is not penalized.
std::vector<double> ridge_oracle(const Matrix& x, const std::vector<double>& y, double ridge) {
  const std::size_t p = x.cols() + 1;
  std::vector<std::vector<long double>> a(p, std::vector<long double>(p + 1, 0.0L));
  auto cell = [&](std::size_t i, std::size_t c) -> long double {
    return c < x.cols() ? x(i, c) : 1.0L;
  };
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t r = 0; r < p; ++r) {
      for (std::size_t c = 0; c < p; ++c) a[r][c] += cell(i, r) * cell(i, c);
      a[r][p] += cell(i, r) * y[i];
    }
  }
  for (std::size_t r = 0; r + 1 < p; ++r) a[r][r] += ridge;
  for (std::size_t col = 0; col < p; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < p; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    }
    std::swap(a[col], a[piv]);
    for (std::size_t r = col + 1; r < p; ++r) {
      const long double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= p; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::vector<double> w(p);
  for (std::size_t r = p; r-- > 0;) {
    long double s = a[r][p];
    for (std::size_t c = r + 1; c < p; ++c) s -= a[r][c] * w[c];
    w[r] = static_cast<double>(s / a[r][r]);
  }
  return w;
}

struct Problem {
  Matrix x;
  std::vector<double> y;
};

Problem random_problem(std::size_t n, std::size_t p, std::uint64_t seed, double noise) {
  RandomStream rng(seed);
  Problem pr{Matrix(n, p), {}};
  std::vector<double> beta(p);
  for (auto& b : beta) b = rng.normal();
  for (std::size_t i = 0; i < n; ++i) {
    double t = 0.7;
    for (std::size_t c = 0; c < p; ++c) {
      pr.x(i, c) = rng.normal(0.0, 1.0 + c);
      t += beta[c] * pr.x(i, c);
    }
    pr.y.push_back(t + rng.normal(0.0, noise));
  }
  return pr;
}

TEST(Linear, MatchesNormalEquationOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto pr = random_problem(40 + seed, 1 + seed % 6, seed, 0.3);
    BaseLearnerConfig cfg;
    cfg.ridge_strength = seed % 2 == 0 ? 0.5 : 1e-6;
    const auto model = fit_base(pr.x, pr.y, cfg);
    const auto got = linear_coefficients(*model);
    const auto want = ridge_oracle(pr.x, pr.y, cfg.ridge_strength);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-8) << seed;
  }
}

TEST(Linear, ExactFitWithoutRidge) {
  const auto pr = random_problem(30, 4, 7, 0.0);
  BaseLearnerConfig cfg;
  cfg.ridge_strength = 0.0;
  const auto model = fit_base(pr.x, pr.y, cfg);
  double sq = 0.0;
  for (std::size_t i = 0; i < pr.x.rows(); ++i) {
    const double e = model->predict(pr.x.row(i)) - pr.y[i];
    sq += e * e;
  }
  EXPECT_LT(std::sqrt(sq / 30.0), 1e-8);
}

TEST(Linear, SingularWithoutRidgeThrows) {
  auto pr = random_problem(20, 3, 8, 0.1);
  for (std::size_t i = 0; i < 20; ++i) pr.x(i, 2) = 2.0 * pr.x(i, 0);
  BaseLearnerConfig cfg;
  cfg.ridge_strength = 0.0;
  EXPECT_THROW(fit_base(pr.x, pr.y, cfg), NumericError);
  cfg.ridge_strength = 1e-3;
  EXPECT_NO_THROW(fit_base(pr.x, pr.y, cfg));
}

TEST(Learners, RejectBadInput) {
  auto pr = random_problem(20, 3, 9, 0.1);
  BaseLearnerConfig cfg;
  const auto model = fit_base(pr.x, pr.y, cfg);
  EXPECT_EQ(model->input_width(), 3u);
  EXPECT_THROW(model->predict(std::vector<double>{1.0, 2.0}), InputError);
  pr.x(3, 1) = std::nan("");
  EXPECT_THROW(fit_base(pr.x, pr.y, cfg), InputError);
  std::vector<double> short_y(pr.y.begin(), pr.y.begin() + 5);
  EXPECT_THROW(fit_base(pr.x, short_y, cfg), InputError);
}

TEST(Gbt, ConstantTargetsPredictConstant) {
  auto pr = random_problem(60, 3, 10, 0.1);
  std::fill(pr.y.begin(), pr.y.end(), 0.625);
  BaseLearnerConfig cfg;
  cfg.kind = LearnerKind::kGradientBoostedTrees;
  cfg.trees = 20;
  const auto model = fit_base(pr.x, pr.y, cfg);
  for (std::size_t i = 0; i < 60; ++i) EXPECT_DOUBLE_EQ(model->predict(pr.x.row(i)), 0.625);
}

TEST(Gbt, FitsNonlinearSignal) {
  RandomStream rng(11);
  Matrix x(400, 2);
  std::vector<double> y;
  for (std::size_t i = 0; i < 400; ++i) {
    x(i, 0) = rng.uniform() * 4.0 - 2.0;
    x(i, 1) = rng.uniform();
    y.push_back(x(i, 0) > 0.0 ? 1.0 : -1.0);
  }
  BaseLearnerConfig cfg;
  cfg.kind = LearnerKind::kGradientBoostedTrees;
  const auto model = fit_base(x, y, cfg);
  double sq = 0.0;
  for (std::size_t i = 0; i < 400; ++i) {
    const double e = model->predict(x.row(i)) - y[i];
    sq += e * e;
  }
  EXPECT_LT(std::sqrt(sq / 400.0), 0.1);
}

TEST(Mlp, ReducesErrorBelowMeanPredictor) {
  const auto pr = random_problem(300, 3, 12, 0.1);
  BaseLearnerConfig cfg;
  cfg.kind = LearnerKind::kMlp;
  cfg.epochs = 100;
  cfg.learning_rate = 1e-2;
  const auto model = fit_base(pr.x, pr.y, cfg);
  double mean = 0.0;
  for (double v : pr.y) mean += v / 300.0;
  double sq = 0.0, base = 0.0;
  for (std::size_t i = 0; i < 300; ++i) {
    sq += std::pow(model->predict(pr.x.row(i)) - pr.y[i], 2);
    base += std::pow(mean - pr.y[i], 2);
  }
  EXPECT_LT(sq, 0.2 * base);
}

TEST(Learners, JsonRoundTripPredictsIdentically) {
  const auto pr = random_problem(80, 3, 13, 0.2);
  for (auto kind : {LearnerKind::kLinear, LearnerKind::kMlp, LearnerKind::kGradientBoostedTrees}) {
    BaseLearnerConfig cfg;
    cfg.kind = kind;
    cfg.epochs = 20;
    cfg.trees = 15;
    cfg.seed = 4;
    const auto model = fit_base(pr.x, pr.y, cfg);
    const auto back = regressor_from_json(nlohmann::json::parse(model->to_json().dump()));
    EXPECT_EQ(back->kind(), kind);
    for (std::size_t i = 0; i < 80; ++i) {
      EXPECT_DOUBLE_EQ(back->predict(pr.x.row(i)), model->predict(pr.x.row(i))) << to_string(kind);
    }
    const auto again = fit_base(pr.x, pr.y, cfg);
    EXPECT_EQ(again->to_json(), model->to_json()) << to_string(kind);
  }
}

TEST(LearnerConfig, JsonAndValidation) {
  BaseLearnerConfig cfg;
  cfg.kind = LearnerKind::kGradientBoostedTrees;
  cfg.trees = 7;
  cfg.linear_init = true;
  const auto back = learner_config_from_json(to_json(cfg));
  EXPECT_EQ(back.kind, cfg.kind);
  EXPECT_EQ(back.trees, 7u);
  EXPECT_TRUE(back.linear_init);
  EXPECT_EQ(back.display_name(), "GBT");
  EXPECT_EQ(learner_kind_from_string("linear"), LearnerKind::kLinear);
  EXPECT_THROW(learner_kind_from_string("catboost"), ConfigError);
  cfg.ridge_strength = -1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

}  // namespace
}  // namespace evalmodel
