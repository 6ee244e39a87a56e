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

// Experiment harness: seeded replication of scene and trade experiments,
// report emission and the bound tables.

#ifndef EVALMODEL_HARNESS_HPP_
#define EVALMODEL_HARNESS_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evalmodel/agent_space.hpp"
#include "evalmodel/assumption_tests.hpp"
#include "evalmodel/eval_model.hpp"
#include "evalmodel/learners.hpp"
#include "evalmodel/market.hpp"
#include "evalmodel/proxy.hpp"
#include "evalmodel/scene.hpp"

namespace evalmodel {

// Synthetic parameters, or a CSV file with its column schema.
struct SceneSpec {
  std::string name = "synthetic";
  SyntheticSceneConfig synthetic;
  // Non-empty selects CSV ingestion.
  std::string csv_path;
  CsvSchema schema;
};

struct TradeSpec {
  MarketConfig market;
  std::size_t n_agents = 200;
  // Agents in the training half; the rest are test agents.
  double train_agent_frac = 0.8;
  DayRange train_days = {71, 240};
  DayRange test_days = {241, 299};
  std::size_t slots_per_pair = 1;
  double float_scale = 1.0;
  // Coalition values are fitted with this learner.
  BaseLearnerConfig attribution_learner;
};

struct ExperimentConfig {
  SceneSpec scene;
  TradeSpec trade;
  std::size_t n_agents = 2000;
  std::size_t replicates = 30;
  std::vector<BaseLearnerConfig> learners;
  ProxyConfig proxy;
  // Agent-space template. input_dim and task_kind come from the scene.
  SpaceConfig space;
  // Metrics to predict; empty selects rmse, r2 (regression) or roc_auc, acc.
  std::vector<std::string> metrics;
  double train_frac = 0.8;
  std::vector<double> sigmas = {0.5, 0.05, 0.01, 0.001};
  // Ridge strengths tried by k-fold CV for linear learners; empty disables
  // the search.
  std::vector<double> ridge_grid;
  std::size_t grid_folds = 3;
  SubsetTestOptions tests;
  bool attribution = true;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  std::size_t jobs = 1;

  // Throws ConfigError on an invalid field or a missing CSV path.
  void validate() const;
};

inline constexpr const char* kExperimentSchema = "evalmodel.experiment/1";

// Defaults for run-scene: Linear, MLP and GBT learners.
ExperimentConfig default_scene_config();
// Defaults for run-backtest: 5 replicates, Linear and GBT learners.
ExperimentConfig default_backtest_config();

nlohmann::json to_json(const ExperimentConfig& cfg);
// Missing keys keep the values of `base`.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j,
                                             const ExperimentConfig& base);

// Runs fn(0..n-1) on up to `jobs` threads. Results must be written to
// per-index slots so the output does not depend on scheduling. The first
// exception thrown by fn is rethrown after all workers stop.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

struct MeanInterval {
  double mean = 0.0;
  // 95% Student-t half-width; nan for fewer than 2 values.
  double half_width = 0.0;
  std::size_t n = 0;
};

MeanInterval mean_ci95(const std::vector<double>& values);

struct MethodRow {
  std::string metric;
  std::string method;
  // One entry per successful replicate.
  std::vector<double> rmse;
  MeanInterval summary;
};

struct ExperimentReport {
  std::vector<MethodRow> rows;
  nlohmann::json manifest;
  std::vector<std::string> files;

  // Throws InputError when no such row exists.
  const MethodRow& row(const std::string& metric, const std::string& method) const;
};

// "Het(<learner>)", "HetEM(<learner>)" for the trade table.
std::string het_name(const BaseLearnerConfig& learner);
std::string het_em_name(const BaseLearnerConfig& learner);

// Metric label used in assumption report keys: RMSE, R2, ROC-AUC, ...
std::string metric_label(const std::string& metric);

// Per-sample normalized loss min(1, |pred - truth| / scale). The scale is the
// width of the metric's natural range when finite, else the spread of the
// training targets (1 when they are constant).
double loss_scale(const std::string& metric, const std::vector<EvaluationSample>& train);

// Picks the ridge strength with the lowest k-fold CV RMSE. Returns
// cfg.ridge_strength unchanged for non-linear learners or an empty grid.
double select_ridge(const std::vector<EvaluationSample>& train, const BaseLearnerConfig& cfg,
                    const std::vector<double>& grid, std::size_t folds, std::uint64_t seed,
                    const MetaFitOptions& options = {});

// Per replicate: agents -> system -> proxies -> meta_fit -> test RMSE of
// every baseline and learner -> bounds -> assumption checks. Writes
// <name>_rmse.csv, <name>_replicates.csv, <name>_bounds.csv,
// <name>_assumptions.json and <name>_manifest.json to cfg.output_dir
// (nothing when it is empty). A failed replicate is logged and skipped.
ExperimentReport run_scene(const ExperimentConfig& cfg);

// Per replicate: market -> agents -> conditional dataset -> Last10Days
// baseline and HetEM learners, plus Shapley attribution of the feature
// blocks. Writes <name>_table.csv, <name>_replicates.csv,
// <name>_attribution.json and <name>_manifest.json.
ExperimentReport run_backtest(const ExperimentConfig& cfg);

struct BoundTables {
  std::string generalization_csv;
  std::string causal_csv;
};

inline const std::vector<double>& default_table_sigmas() {
  static const std::vector<double> s = {0.5, 0.05, 0.01, 0.001};
  return s;
}
const std::vector<std::uint64_t>& default_table_ns();

// Three significant figures, plain decimal notation: 0.387, 0.0151, 1.18.
std::string format_sig3(double value);

// Rows n, columns confidence 1 - sigma; cells "E+<eps>" and "2E+<2 eps>".
BoundTables emit_bound_table(const std::vector<double>& sigmas = default_table_sigmas(),
                             const std::vector<std::uint64_t>& ns = default_table_ns());

// One error measurement per row: a signed residual and an optional
// normalized loss in [0, 1].
struct ErrorFile {
  std::vector<double> residuals;
  std::vector<double> losses;
};

// CSV with a "residual" column and optional "loss" column. Throws
// IngestionError on a malformed file.
ErrorFile read_error_file(const std::string& path);

// IID, ID, Bias and GroupBias checks keyed "Het(<learner>)-<Test>-<Metric>",
// plus generalization bounds when losses are present.
nlohmann::json assess(const ErrorFile& errors, const std::string& learner,
                      const std::string& metric, const SubsetTestOptions& options,
                      const std::vector<double>& sigmas);

// Shapley attribution of (condition,) subject and proxy blocks on a samples
// file's train/test split.
nlohmann::json shapley(const EvalDataset& dataset, const BaseLearnerConfig& learner,
                       std::size_t baseline_proxy_index);

}  // namespace evalmodel

#endif  // EVALMODEL_HARNESS_HPP_
