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

#include "evalmodel/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "evalmodel/attribution.hpp"
#include "evalmodel/bounds.hpp"
#include "evalmodel/csv.hpp"
#include "evalmodel/errors.hpp"
#include "evalmodel/special_functions.hpp"

namespace evalmodel {
namespace {

// Seed keys for the per-replicate streams.
enum SeedKey : std::uint64_t {
  kSystemKey = 1,
  kAgentKey = 2,
  kProxyKey = 3,
  kSplitKey = 4,
  kMarketKey = 5,
  kFloatKey = 6,
  kSlotKey = 7,
  kGridKey = 8,
  kLearnerKey = 100,
  kTestKey = 200,
};

std::mutex log_mutex;

void log_line(const std::string& text) {
  std::lock_guard<std::mutex> lock(log_mutex);
  std::cerr << text << '\n';
}

double rmse_of(const std::vector<double>& preds, const std::vector<EvaluationSample>& samples) {
  double acc = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double e = preds[i] - samples[i].true_metric;
    acc += e * e;
  }
  return std::sqrt(acc / static_cast<double>(samples.size()));
}

std::vector<double> proxy_column(const std::vector<EvaluationSample>& samples, std::size_t index) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    if (index >= s.proxies.size()) throw InputError("proxy index out of range");
    out.push_back(s.proxies[index]);
  }
  return out;
}

std::vector<double> predict_all(const EvaluationModel& em,
                                const std::vector<EvaluationSample>& samples) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(meta_predict(em, s));
  return out;
}

std::vector<std::string> resolved_metrics(const ExperimentConfig& cfg, MetricKind kind) {
  if (!cfg.metrics.empty()) {
    for (const auto& m : cfg.metrics) MetricVector::index_of(kind, m);
    return cfg.metrics;
  }
  if (kind == MetricKind::kRegression) return {"rmse", "r2"};
  return {"roc_auc", "acc"};
}

std::shared_ptr<const SceneDataset> load_scene(const SceneSpec& spec) {
  if (!spec.csv_path.empty()) {
    auto data = load_csv(spec.csv_path, spec.schema);
    data.name = spec.name;
    return std::make_shared<const SceneDataset>(std::move(data));
  }
  auto data = make_synthetic_scene(spec.synthetic);
  data.name = spec.name;
  return std::make_shared<const SceneDataset>(std::move(data));
}

std::ofstream open_report(const std::string& dir, const std::string& file, const char* schema,
                          std::vector<std::string>& files) {
  const auto path = (std::filesystem::path(dir) / file).string();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestionError("cannot write '" + path + "'");
  if (schema != nullptr) out << "# schema=" << schema << '\n';
  files.push_back(path);
  return out;
}

void write_json(const std::string& dir, const std::string& file, const nlohmann::json& j,
                std::vector<std::string>& files) {
  auto out = open_report(dir, file, nullptr, files);
  out << j.dump(2) << '\n';
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::vector<MethodRow> summarize(std::vector<MethodRow> rows) {
  for (auto& r : rows) r.summary = mean_ci95(r.rmse);
  return rows;
}

void write_rmse_tables(const ExperimentConfig& cfg, const std::string& name,
                       const std::vector<MethodRow>& rows, const char* table_file,
                       ExperimentReport& report) {
  {
    auto out = open_report(cfg.output_dir, name + table_file, "evalmodel.rmse_table/1",
                           report.files);
    write_csv_row(out, {"metric", "method", "mean_rmse", "ci95_half_width", "replicates"});
    for (const auto& r : rows) {
      write_csv_row(out, {r.metric, r.method, fmt(r.summary.mean), fmt(r.summary.half_width),
                          std::to_string(r.summary.n)});
    }
  }
  auto out = open_report(cfg.output_dir, name + "_replicates.csv", "evalmodel.replicates/1",
                         report.files);
  write_csv_row(out, {"metric", "method", "replicate", "rmse"});
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.rmse.size(); ++i) {
      write_csv_row(out, {r.metric, r.method, std::to_string(i), fmt(r.rmse[i])});
    }
  }
}

BaseLearnerConfig seeded(const BaseLearnerConfig& base, std::uint64_t rep_seed, std::size_t index) {
  BaseLearnerConfig c = base;
  c.seed = derive_seed(rep_seed, kLearnerKey + index);
  return c;
}

std::vector<std::size_t> parse_size_list(const nlohmann::json& j) {
  return j.get<std::vector<std::size_t>>();
}

SpaceConfig space_template_from_json(const nlohmann::json& j, SpaceConfig cfg) {
  cfg.max_hidden = j.value("max_hidden", cfg.max_hidden);
  cfg.max_depth = j.value("max_depth", cfg.max_depth);
  cfg.type_probability = j.value("type_probability", cfg.type_probability);
  if (j.contains("param_law")) {
    cfg.param_mean = j["param_law"].value("mean", cfg.param_mean);
    cfg.param_std = j["param_law"].value("std", cfg.param_std);
  }
  return cfg;
}

nlohmann::json to_json(const CsvSchema& s) {
  return {{"target", s.target},
          {"features", s.features},
          {"drop", s.drop},
          {"ordinal", s.ordinal},
          {"task_kind", to_string(s.task_kind)},
          {"max_one_hot_levels", s.max_one_hot_levels}};
}

nlohmann::json to_json(const SubsetTestOptions& o) {
  return {{"n_subsets", o.n_subsets},
          {"subset_frac", o.subset_frac},
          {"alpha", o.alpha},
          {"seed", o.seed}};
}

struct TestOutcome {
  std::string key;
  TestReport report;
  // Set when the check could not run, e.g. too few measurements.
  std::string skipped;
};

// The four checks on one set of residuals, keyed in report order.
std::vector<TestOutcome> run_checks(const std::string& learner, const std::string& metric,
                                    const std::vector<double>& residuals,
                                    const SubsetTestOptions& options) {
  const std::string prefix = "Het(" + learner + ")-";
  const std::string suffix = "-" + metric_label(metric);
  const std::vector<std::pair<std::string, std::function<TestReport()>>> checks = {
      {"IID", [&] { return iid_check(residuals, options); }},
      {"ID", [&] { return id_check(residuals, options); }},
      {"Bias", [&] { return bias_check(residuals, options.alpha); }},
      {"GroupBias", [&] { return group_bias_check(residuals, options); }}};
  std::vector<TestOutcome> out;
  for (const auto& [name, run] : checks) {
    TestOutcome t;
    t.key = prefix + name + suffix;
    try {
      t.report = run();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      t.skipped = e.what();
    }
    out.push_back(std::move(t));
  }
  return out;
}

double test_pass_ratio(const TestReport& r) {
  return r.pass_ratio.value_or(r.rejected ? 0.0 : 1.0);
}

// The worker count does not affect any number, so it stays out of manifests.
nlohmann::json manifest_config(const ExperimentConfig& cfg) {
  auto j = to_json(cfg);
  j.erase("jobs");
  return j;
}

std::vector<std::string> file_names(const std::vector<std::string>& paths) {
  std::vector<std::string> out;
  for (const auto& p : paths) out.push_back(std::filesystem::path(p).filename().string());
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (replicates < 1) throw ConfigError("replicates must be >= 1");
  if (n_agents < 2) throw ConfigError("n_agents must be >= 2");
  if (!(train_frac > 0.0 && train_frac < 1.0)) throw ConfigError("train_frac must lie in (0, 1)");
  if (learners.empty()) throw ConfigError("at least one learner is required");
  for (const auto& l : learners) l.validate();
  proxy.validate();
  for (double s : sigmas) {
    if (!(s > 0.0 && s <= 1.0)) throw ConfigError("sigma must lie in (0, 1]");
  }
  for (double r : ridge_grid) {
    if (!(r >= 0.0) || !std::isfinite(r)) throw ConfigError("ridge grid values must be >= 0");
  }
  if (!ridge_grid.empty() && grid_folds < 2) throw ConfigError("grid_folds must be >= 2");
  if (!(tests.subset_frac > 0.0 && tests.subset_frac <= 1.0) || tests.n_subsets < 2) {
    throw ConfigError("invalid assumption-test options");
  }
  if (!scene.csv_path.empty()) {
    if (!std::filesystem::exists(scene.csv_path)) {
      throw ConfigError("scene csv '" + scene.csv_path + "' does not exist");
    }
    if (scene.schema.target.empty()) throw ConfigError("csv scene needs a target column");
  }
  trade.market.validate();
  trade.attribution_learner.validate();
  if (trade.n_agents < 2) throw ConfigError("trade n_agents must be >= 2");
  if (!(trade.train_agent_frac > 0.0 && trade.train_agent_frac < 1.0)) {
    throw ConfigError("train_agent_frac must lie in (0, 1)");
  }
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
}

ExperimentConfig default_scene_config() {
  ExperimentConfig cfg;
  BaseLearnerConfig linear;
  BaseLearnerConfig mlp;
  mlp.kind = LearnerKind::kMlp;
  BaseLearnerConfig gbt;
  gbt.kind = LearnerKind::kGradientBoostedTrees;
  cfg.learners = {linear, mlp, gbt};
  cfg.ridge_grid = {1e-6, 1e-2, 1.0, 10.0, 100.0};
  return cfg;
}

ExperimentConfig default_backtest_config() {
  ExperimentConfig cfg;
  cfg.replicates = 5;
  BaseLearnerConfig linear;
  linear.ridge_strength = 1.0;
  BaseLearnerConfig gbt;
  gbt.kind = LearnerKind::kGradientBoostedTrees;
  cfg.learners = {linear, gbt};
  cfg.ridge_grid = {1e-2, 1.0, 10.0, 100.0};
  cfg.scene.name = "trade";
  cfg.trade.attribution_learner = linear;
  return cfg;
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  nlohmann::json learners = nlohmann::json::array();
  for (const auto& l : cfg.learners) learners.push_back(to_json(l));
  nlohmann::json scene = {{"name", cfg.scene.name}};
  if (cfg.scene.csv_path.empty()) {
    scene["synthetic"] = to_json(cfg.scene.synthetic);
  } else {
    scene["csv_path"] = cfg.scene.csv_path;
    scene["schema"] = to_json(cfg.scene.schema);
  }
  const auto& t = cfg.trade;
  return {{"schema", kExperimentSchema},
          {"scene", scene},
          {"trade",
           {{"market", to_json(t.market)},
            {"n_agents", t.n_agents},
            {"train_agent_frac", t.train_agent_frac},
            {"train_days", {t.train_days.first, t.train_days.last}},
            {"test_days", {t.test_days.first, t.test_days.last}},
            {"slots_per_pair", t.slots_per_pair},
            {"float_scale", t.float_scale},
            {"attribution_learner", to_json(t.attribution_learner)}}},
          {"n_agents", cfg.n_agents},
          {"replicates", cfg.replicates},
          {"learners", learners},
          {"proxy", to_json(cfg.proxy)},
          {"space",
           {{"max_hidden", cfg.space.max_hidden},
            {"max_depth", cfg.space.max_depth},
            {"type_probability", cfg.space.type_probability},
            {"param_law", {{"mean", cfg.space.param_mean}, {"std", cfg.space.param_std}}}}},
          {"metrics", cfg.metrics},
          {"train_frac", cfg.train_frac},
          {"sigmas", cfg.sigmas},
          {"ridge_grid", cfg.ridge_grid},
          {"grid_folds", cfg.grid_folds},
          {"tests", to_json(cfg.tests)},
          {"attribution", cfg.attribution},
          {"seed", cfg.seed},
          {"output_dir", cfg.output_dir},
          {"jobs", cfg.jobs}};
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j,
                                             const ExperimentConfig& base) {
  if (j.contains("schema") && j["schema"] != kExperimentSchema) {
    throw ConfigError("experiment config: unsupported schema");
  }
  ExperimentConfig cfg = base;
  try {
    if (j.contains("scene")) {
      const auto& s = j["scene"];
      cfg.scene.name = s.value("name", cfg.scene.name);
      if (s.contains("synthetic")) {
        cfg.scene.synthetic = synthetic_scene_config_from_json(s["synthetic"]);
        cfg.scene.csv_path.clear();
      }
      if (s.contains("csv_path")) {
        cfg.scene.csv_path = s["csv_path"].get<std::string>();
        cfg.scene.schema = csv_schema_from_json(s.at("schema"));
      }
    }
    if (j.contains("trade")) {
      const auto& t = j["trade"];
      if (t.contains("market")) cfg.trade.market = market_config_from_json(t["market"]);
      cfg.trade.n_agents = t.value("n_agents", cfg.trade.n_agents);
      cfg.trade.train_agent_frac = t.value("train_agent_frac", cfg.trade.train_agent_frac);
      if (t.contains("train_days")) {
        const auto d = parse_size_list(t["train_days"]);
        if (d.size() != 2) throw ConfigError("train_days must be [first, last]");
        cfg.trade.train_days = {d[0], d[1]};
      }
      if (t.contains("test_days")) {
        const auto d = parse_size_list(t["test_days"]);
        if (d.size() != 2) throw ConfigError("test_days must be [first, last]");
        cfg.trade.test_days = {d[0], d[1]};
      }
      cfg.trade.slots_per_pair = t.value("slots_per_pair", cfg.trade.slots_per_pair);
      cfg.trade.float_scale = t.value("float_scale", cfg.trade.float_scale);
      if (t.contains("attribution_learner")) {
        cfg.trade.attribution_learner = learner_config_from_json(t["attribution_learner"]);
      }
    }
    cfg.n_agents = j.value("n_agents", cfg.n_agents);
    cfg.replicates = j.value("replicates", cfg.replicates);
    if (j.contains("learners")) {
      cfg.learners.clear();
      for (const auto& l : j["learners"]) cfg.learners.push_back(learner_config_from_json(l));
    }
    if (j.contains("proxy")) cfg.proxy = proxy_config_from_json(j["proxy"]);
    if (j.contains("space")) cfg.space = space_template_from_json(j["space"], cfg.space);
    cfg.metrics = j.value("metrics", cfg.metrics);
    cfg.train_frac = j.value("train_frac", cfg.train_frac);
    cfg.sigmas = j.value("sigmas", cfg.sigmas);
    cfg.ridge_grid = j.value("ridge_grid", cfg.ridge_grid);
    cfg.grid_folds = j.value("grid_folds", cfg.grid_folds);
    if (j.contains("tests")) {
      const auto& t = j["tests"];
      cfg.tests.n_subsets = t.value("n_subsets", cfg.tests.n_subsets);
      cfg.tests.subset_frac = t.value("subset_frac", cfg.tests.subset_frac);
      cfg.tests.alpha = t.value("alpha", cfg.tests.alpha);
      cfg.tests.seed = t.value("seed", cfg.tests.seed);
    }
    cfg.attribution = j.value("attribution", cfg.attribution);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    cfg.jobs = j.value("jobs", cfg.jobs);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  return cfg;
}

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(std::max<std::size_t>(jobs, 1), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

MeanInterval mean_ci95(const std::vector<double>& values) {
  MeanInterval out;
  out.n = values.size();
  if (values.empty()) {
    out.mean = std::nan("");
    out.half_width = std::nan("");
    return out;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(out.n);
  if (out.n < 2) {
    out.half_width = std::nan("");
    return out;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  const double sd = std::sqrt(ss / static_cast<double>(out.n - 1));
  const double t = student_t_critical(0.05, static_cast<double>(out.n - 1));
  out.half_width = t * sd / std::sqrt(static_cast<double>(out.n));
  return out;
}

const MethodRow& ExperimentReport::row(const std::string& metric, const std::string& method) const {
  for (const auto& r : rows) {
    if (r.metric == metric && r.method == method) return r;
  }
  throw InputError("no report row for " + metric + "/" + method);
}

std::string het_name(const BaseLearnerConfig& learner) {
  return "Het(" + learner.display_name() + ")";
}

std::string het_em_name(const BaseLearnerConfig& learner) {
  return "HetEM(" + learner.display_name() + ")";
}

std::string metric_label(const std::string& metric) {
  static const std::map<std::string, std::string> labels = {
      {"rmse", "RMSE"},   {"r2", "R2"},     {"mae", "MAE"},         {"mape", "MAPE"},
      {"mse", "MSE"},     {"roc_auc", "ROC-AUC"}, {"acc", "ACC"},   {"recall", "Recall"},
      {"precision", "Precision"}, {"f1", "F1"}, {"pr_auc", "PR-AUC"}, {"roi", "RoI"}};
  const auto it = labels.find(metric);
  return it == labels.end() ? metric : it->second;
}

double loss_scale(const std::string& metric, const std::vector<EvaluationSample>& train) {
  const auto clamp = MetricClamp::for_metric(metric);
  if (std::isfinite(clamp.lo) && std::isfinite(clamp.hi)) return clamp.hi - clamp.lo;
  if (train.empty()) return 1.0;
  double lo = train.front().true_metric;
  double hi = lo;
  for (const auto& s : train) {
    lo = std::min(lo, s.true_metric);
    hi = std::max(hi, s.true_metric);
  }
  return hi > lo ? hi - lo : 1.0;
}

double select_ridge(const std::vector<EvaluationSample>& train, const BaseLearnerConfig& cfg,
                    const std::vector<double>& grid, std::size_t folds, std::uint64_t seed,
                    const MetaFitOptions& options) {
  if (cfg.kind != LearnerKind::kLinear || grid.empty()) return cfg.ridge_strength;
  if (folds < 2 || train.size() < folds) throw ConfigError("too few samples for the ridge grid");
  RandomStream stream(seed);
  const auto order = stream.permutation(train.size());
  std::vector<std::size_t> fold_of(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) fold_of[order[i]] = i % folds;

  double best = cfg.ridge_strength;
  double best_sse = std::numeric_limits<double>::infinity();
  for (double ridge : grid) {
    BaseLearnerConfig c = cfg;
    c.ridge_strength = ridge;
    double sse = 0.0;
    try {
      for (std::size_t f = 0; f < folds; ++f) {
        std::vector<EvaluationSample> fit, held;
        for (std::size_t i = 0; i < train.size(); ++i) {
          (fold_of[i] == f ? held : fit).push_back(train[i]);
        }
        const auto em = meta_fit(fit, c, options);
        for (const auto& s : held) {
          const double e = meta_predict(em, s) - s.true_metric;
          sse += e * e;
        }
      }
    } catch (const NumericError&) {
      continue;
    }
    if (sse < best_sse) {
      best_sse = sse;
      best = ridge;
    }
  }
  return best;
}

ExperimentReport run_scene(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto data = load_scene(cfg.scene);
  SpaceConfig space = cfg.space;
  space.input_dim = data->input_dim();
  space.output_dim = 1;
  space.task_kind = data->task_kind;
  space.validate();
  const MetricKind kind = data->metric_kind();
  const auto metrics = resolved_metrics(cfg, kind);
  const auto estimators = estimator_names(cfg.proxy);
  const std::size_t n_kind_metrics = MetricVector::names(kind).size();

  struct BoundRow {
    std::string metric, method;
    BoundReport report;
  };
  struct Replicate {
    bool ok = false;
    std::string error;
    nlohmann::json seeds;
    // [metric][method] in row order.
    std::vector<std::vector<double>> rmse;
    std::vector<BoundRow> bounds;
    std::vector<TestOutcome> tests;
    nlohmann::json ridge = nlohmann::json::object();
    std::size_t dropped = 0;
  };
  const std::size_t n_methods = estimators.size() + cfg.learners.size();
  std::vector<Replicate> reps(cfg.replicates);

  parallel_for(cfg.replicates, cfg.jobs, [&](std::size_t r) {
    Replicate& rep = reps[r];
    const std::uint64_t rep_seed = derive_seed(cfg.seed, r);
    rep.seeds = {{"replicate", r},
                 {"seed", rep_seed},
                 {"system", derive_seed(rep_seed, kSystemKey)},
                 {"agents", derive_seed(rep_seed, kAgentKey)},
                 {"proxy", derive_seed(rep_seed, kProxyKey)},
                 {"split", derive_seed(rep_seed, kSplitKey)}};
    try {
      const auto system = build_system(data, derive_seed(rep_seed, kSystemKey));
      SpaceConfig rep_space = space;
      rep_space.seed = derive_seed(rep_seed, kAgentKey);
      RandomStream agent_stream(rep_space.seed);
      std::vector<AgentSpec> agents;
      agents.reserve(cfg.n_agents);
      for (std::size_t i = 0; i < cfg.n_agents; ++i) {
        agents.push_back(sample_agent(rep_space, agent_stream));
      }
      ProxyConfig proxy = cfg.proxy;
      proxy.seed = derive_seed(rep_seed, kProxyKey);
      const auto records = compute_scene_records(system, agents, rep_space, proxy);
      rep.dropped = records.dropped;

      for (const auto& metric : metrics) {
        const std::size_t mi = MetricVector::index_of(kind, metric);
        auto [train, test] = split_samples(samples_for_metric(records.records, metric),
                                           cfg.train_frac, derive_seed(rep_seed, kSplitKey));
        if (train.empty() || test.empty()) throw DegenerateInputError("empty train or test split");
        std::vector<double> row;
        for (std::size_t e = 0; e < estimators.size(); ++e) {
          row.push_back(rmse_of(proxy_column(test, e * n_kind_metrics + mi), test));
        }
        const double scale = loss_scale(metric, train);
        for (std::size_t li = 0; li < cfg.learners.size(); ++li) {
          BaseLearnerConfig lc = seeded(cfg.learners[li], rep_seed, li);
          MetaFitOptions options;
          options.clamp = MetricClamp::for_metric(metric);
          if (lc.kind == LearnerKind::kLinear && !cfg.ridge_grid.empty()) {
            lc.ridge_strength = select_ridge(train, lc, cfg.ridge_grid, cfg.grid_folds,
                                             derive_seed(rep_seed, kGridKey), options);
            rep.ridge[metric + "/" + lc.display_name()] = lc.ridge_strength;
          }
          const auto em = meta_fit(train, lc, options);
          const auto preds = predict_all(em, test);
          row.push_back(rmse_of(preds, test));

          std::vector<double> losses, residuals;
          for (std::size_t i = 0; i < test.size(); ++i) {
            const double res = preds[i] - test[i].true_metric;
            residuals.push_back(res);
            losses.push_back(std::min(1.0, std::abs(res) / scale));
          }
          MeasurementProvenance prov;
          prov.iide_claimed = true;
          prov.iris_claimed = true;
          prov.normalized_by = scale;
          const ErrorMeasurements errors(losses, prov, residuals);
          for (double sigma : cfg.sigmas) {
            rep.bounds.push_back({metric, het_name(lc), generalization_bound(errors, sigma)});
          }
          SubsetTestOptions topt = cfg.tests;
          topt.seed = derive_seed(rep_seed, kTestKey + li);
          for (auto& t : run_checks(lc.display_name(), metric, residuals, topt)) {
            rep.tests.push_back(std::move(t));
          }
        }
        rep.rmse.push_back(std::move(row));
      }
      rep.ok = true;
    } catch (const Error& e) {
      rep.error = e.what();
      log_line("replicate " + std::to_string(r) + " failed: " + rep.error);
    }
  });

  std::vector<MethodRow> rows;
  for (std::size_t m = 0; m < metrics.size(); ++m) {
    for (std::size_t k = 0; k < n_methods; ++k) {
      MethodRow row;
      row.metric = metrics[m];
      row.method = k < estimators.size() ? estimators[k]
                                         : het_name(cfg.learners[k - estimators.size()]);
      for (const auto& rep : reps) {
        if (rep.ok) row.rmse.push_back(rep.rmse[m][k]);
      }
      rows.push_back(std::move(row));
    }
  }

  ExperimentReport report;
  report.rows = summarize(std::move(rows));

  nlohmann::json replicates = nlohmann::json::array();
  std::map<std::string, std::vector<const TestOutcome*>> by_key;
  std::vector<std::string> key_order;
  for (const auto& rep : reps) {
    nlohmann::json entry = rep.seeds;
    entry["status"] = rep.ok ? "ok" : "failed";
    if (!rep.ok) entry["error"] = rep.error;
    entry["dropped_agents"] = rep.dropped;
    entry["selected_ridge"] = rep.ridge;
    replicates.push_back(entry);
    for (const auto& t : rep.tests) {
      if (!by_key.contains(t.key)) key_order.push_back(t.key);
      by_key[t.key].push_back(&t);
    }
  }
  report.manifest = {{"schema", "evalmodel.scene_manifest/1"},
                     {"scene", cfg.scene.name},
                     {"config", manifest_config(cfg)},
                     {"replicates", replicates}};

  if (cfg.output_dir.empty()) return report;
  std::filesystem::create_directories(cfg.output_dir);
  const std::string& name = cfg.scene.name;
  write_rmse_tables(cfg, name, report.rows, "_rmse.csv", report);

  {
    auto out = open_report(cfg.output_dir, name + "_bounds.csv", "evalmodel.bounds/1", report.files);
    write_csv_row(out, {"replicate", "metric", "method", "sigma", "n", "e_emp", "epsilon", "bound",
                        "normalized_by"});
    for (std::size_t r = 0; r < reps.size(); ++r) {
      for (const auto& b : reps[r].bounds) {
        write_csv_row(out, {std::to_string(r), b.metric, b.method, fmt(b.report.sigma),
                            std::to_string(b.report.n), fmt(b.report.e_emp),
                            fmt(b.report.epsilon), fmt(b.report.bound),
                            "metric_range_or_train_spread"});
      }
    }
  }

  nlohmann::json tests = nlohmann::json::object();
  for (const auto& key : key_order) {
    const auto& list = by_key[key];
    double passed = 0.0, p_sum = 0.0, sub_sum = 0.0, ran = 0.0;
    nlohmann::json per = nlohmann::json::array();
    for (const auto* t : list) {
      if (!t->skipped.empty()) {
        per.push_back({{"skipped", t->skipped}});
        continue;
      }
      ran += 1.0;
      passed += t->report.rejected ? 0.0 : 1.0;
      p_sum += t->report.p_value;
      sub_sum += test_pass_ratio(t->report);
      per.push_back(to_json(t->report));
    }
    const auto ratio = [&](double v) {
      return ran > 0.0 ? nlohmann::json(v / ran) : nlohmann::json(nullptr);
    };
    tests[key] = {{"replicate_pass_ratio", ratio(passed)},
                  {"mean_p_value", ratio(p_sum)},
                  {"mean_subtest_pass_ratio", ratio(sub_sum)},
                  {"replicates", per}};
  }
  write_json(cfg.output_dir, name + "_assumptions.json",
             {{"schema", "evalmodel.assumptions/1"}, {"tests", tests}}, report.files);
  report.manifest["files"] = file_names(report.files);
  write_json(cfg.output_dir, name + "_manifest.json", report.manifest, report.files);
  return report;
}

ExperimentReport run_backtest(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto& t = cfg.trade;
  SpaceConfig space = cfg.space;
  space.input_dim = kMarketFeatureCount;
  space.output_dim = 3;
  space.task_kind = TaskKind::kTernaryDecision;
  space.validate();
  const std::vector<std::string> players = {kConditionPlayer, kSubjectPlayer, kProxyPlayer};

  struct Replicate {
    bool ok = false;
    std::string error;
    nlohmann::json seeds;
    std::vector<double> rmse;
    nlohmann::json attribution;
    std::map<std::string, double> shapley;
    nlohmann::json ridge = nlohmann::json::object();
  };
  std::vector<Replicate> reps(cfg.replicates);

  parallel_for(cfg.replicates, cfg.jobs, [&](std::size_t r) {
    Replicate& rep = reps[r];
    const std::uint64_t rep_seed = derive_seed(cfg.seed, r);
    rep.seeds = {{"replicate", r},
                 {"seed", rep_seed},
                 {"market", derive_seed(rep_seed, kMarketKey)},
                 {"agents", derive_seed(rep_seed, kAgentKey)},
                 {"float", derive_seed(rep_seed, kFloatKey)},
                 {"slots", derive_seed(rep_seed, kSlotKey)}};
    try {
      MarketConfig mc = t.market;
      mc.seed = derive_seed(rep_seed, kMarketKey);
      const auto market = generate_market(mc);
      SpaceConfig rep_space = space;
      rep_space.seed = derive_seed(rep_seed, kAgentKey);
      RandomStream agent_stream(rep_space.seed);
      const auto n_train = static_cast<std::size_t>(
          std::llround(t.train_agent_frac * static_cast<double>(t.n_agents)));
      if (n_train == 0 || n_train >= t.n_agents) throw ConfigError("empty train or test agent set");
      std::vector<AgentSpec> train_agents, test_agents;
      for (std::size_t i = 0; i < t.n_agents; ++i) {
        (i < n_train ? train_agents : test_agents).push_back(sample_agent(rep_space, agent_stream));
      }
      const auto fm = make_float_model(subject_width(rep_space), derive_seed(rep_seed, kFloatKey),
                                       t.float_scale);
      TradeDatasetConfig tc;
      tc.train_days = t.train_days;
      tc.test_days = t.test_days;
      tc.slots_per_pair = t.slots_per_pair;
      tc.seed = derive_seed(rep_seed, kSlotKey);
      const auto ds = build_conditional_dataset(train_agents, test_agents, rep_space, market, fm, tc);

      rep.rmse.push_back(rmse_of(proxy_column(ds.test, 0), ds.test));
      for (std::size_t li = 0; li < cfg.learners.size(); ++li) {
        BaseLearnerConfig lc = seeded(cfg.learners[li], rep_seed, li);
        if (lc.kind == LearnerKind::kLinear && !cfg.ridge_grid.empty()) {
          lc.ridge_strength = select_ridge(ds.train, lc, cfg.ridge_grid, cfg.grid_folds,
                                           derive_seed(rep_seed, kGridKey));
          rep.ridge[lc.display_name()] = lc.ridge_strength;
        }
        const auto em = meta_fit(ds.train, lc);
        rep.rmse.push_back(prediction_rmse(em, ds.test));
      }
      if (cfg.attribution) {
        const auto lc = seeded(t.attribution_learner, rep_seed, cfg.learners.size());
        const auto game = coalition_values(ds.train, ds.test, players, lc, 0);
        rep.shapley = shapley_values(game);
        rep.attribution = attribution_report(game);
      }
      rep.ok = true;
    } catch (const Error& e) {
      rep.error = e.what();
      log_line("replicate " + std::to_string(r) + " failed: " + rep.error);
    }
  });

  std::vector<MethodRow> rows;
  std::vector<std::string> methods = {"Baseline(Last10Days)"};
  for (const auto& l : cfg.learners) methods.push_back(het_em_name(l));
  for (std::size_t k = 0; k < methods.size(); ++k) {
    MethodRow row;
    row.metric = "roi";
    row.method = methods[k];
    for (const auto& rep : reps) {
      if (rep.ok) row.rmse.push_back(rep.rmse[k]);
    }
    rows.push_back(std::move(row));
  }
  ExperimentReport report;
  report.rows = summarize(std::move(rows));

  nlohmann::json replicates = nlohmann::json::array();
  nlohmann::json per_rep_attr = nlohmann::json::array();
  std::map<std::string, std::vector<double>> phi;
  for (const auto& rep : reps) {
    nlohmann::json entry = rep.seeds;
    entry["status"] = rep.ok ? "ok" : "failed";
    if (!rep.ok) entry["error"] = rep.error;
    entry["selected_ridge"] = rep.ridge;
    replicates.push_back(entry);
    if (rep.ok && cfg.attribution) {
      per_rep_attr.push_back(rep.attribution);
      for (const auto& [p, v] : rep.shapley) phi[p].push_back(v);
    }
  }
  report.manifest = {{"schema", "evalmodel.trade_manifest/1"},
                     {"scene", cfg.scene.name},
                     {"config", manifest_config(cfg)},
                     {"replicates", replicates}};

  if (cfg.output_dir.empty()) return report;
  std::filesystem::create_directories(cfg.output_dir);
  const std::string& name = cfg.scene.name;
  write_rmse_tables(cfg, name, report.rows, "_table.csv", report);
  if (cfg.attribution) {
    nlohmann::json mean_phi = nlohmann::json::object();
    for (const auto& [p, v] : phi) {
      const auto ci = mean_ci95(v);
      mean_phi[p] = {{"mean", ci.mean},
                     {"ci95_half_width", std::isnan(ci.half_width) ? nlohmann::json(nullptr)
                                                                   : nlohmann::json(ci.half_width)}};
    }
    write_json(cfg.output_dir, name + "_attribution.json",
               {{"schema", "evalmodel.trade_attribution/1"},
                {"learner", to_json(t.attribution_learner)},
                {"mean_shapley", mean_phi},
                {"replicates", per_rep_attr}},
               report.files);
  }
  report.manifest["files"] = file_names(report.files);
  write_json(cfg.output_dir, name + "_manifest.json", report.manifest, report.files);
  return report;
}

const std::vector<std::uint64_t>& default_table_ns() {
  static const std::vector<std::uint64_t> ns = {10,      20,       30,        100,
                                                1000,    10000,    100000,    1000000,
                                                10000000, 100000000, 1000000000};
  return ns;
}

std::string format_sig3(double value) {
  if (!std::isfinite(value)) return fmt(value);
  if (value == 0.0) return "0.00";
  const double mag = std::abs(value);
  int exponent = static_cast<int>(std::floor(std::log10(mag)));
  char buf[64];
  for (int attempt = 0; attempt < 2; ++attempt) {
    const int decimals = std::max(0, 2 - exponent);
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    // Rounding can carry into the next decade (0.09996 -> 0.1000).
    if (std::abs(std::strtod(buf, nullptr)) < std::pow(10.0, exponent + 1)) break;
    ++exponent;
  }
  return buf;
}

BoundTables emit_bound_table(const std::vector<double>& sigmas,
                             const std::vector<std::uint64_t>& ns) {
  std::ostringstream gen, causal;
  for (auto* out : {&gen, &causal}) {
    std::vector<std::string> header = {"Samples/Confidence"};
    for (double s : sigmas) header.push_back(fmt(1.0 - s));
    write_csv_row(*out, header);
  }
  for (auto n : ns) {
    std::vector<std::string> g = {std::to_string(n)};
    std::vector<std::string> c = {std::to_string(n)};
    for (double s : sigmas) {
      const double eps = epsilon(static_cast<std::size_t>(n), s);
      g.push_back("E+" + format_sig3(eps));
      c.push_back("2E+" + format_sig3(2.0 * eps));
    }
    write_csv_row(gen, g);
    write_csv_row(causal, c);
  }
  return {gen.str(), causal.str()};
}

ErrorFile read_error_file(const std::string& path) {
  std::vector<std::vector<std::string>> table;
  try {
    table = read_csv_file(path);
  } catch (const IngestionError&) {
    throw;
  } catch (const Error& e) {
    throw IngestionError(e.what());
  }
  if (table.empty()) throw IngestionError("'" + path + "' has no header");
  const auto& header = table.front();
  const auto find = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
  };
  const std::size_t res_col = find("residual");
  const std::size_t loss_col = find("loss");
  if (res_col == header.size()) throw IngestionError("'" + path + "' lacks a residual column");
  const bool has_loss = loss_col < header.size();
  ErrorFile out;
  for (std::size_t r = 1; r < table.size(); ++r) {
    const auto& row = table[r];
    if (row.size() != header.size()) {
      throw IngestionError("row " + std::to_string(r) + " of '" + path + "' has " +
                           std::to_string(row.size()) + " fields");
    }
    const auto parse = [&](const std::string& text) {
      char* end = nullptr;
      const double v = std::strtod(text.c_str(), &end);
      if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v)) {
        throw IngestionError("bad number '" + text + "' in row " + std::to_string(r) + " of '" +
                             path + "'");
      }
      return v;
    };
    out.residuals.push_back(parse(row[res_col]));
    if (has_loss) {
      const double l = parse(row[loss_col]);
      if (l < 0.0 || l > 1.0) {
        throw IngestionError("loss outside [0, 1] in row " + std::to_string(r) + " of '" + path + "'");
      }
      out.losses.push_back(l);
    }
  }
  if (out.residuals.empty()) throw IngestionError("'" + path + "' has no rows");
  return out;
}

nlohmann::json assess(const ErrorFile& errors, const std::string& learner,
                      const std::string& metric, const SubsetTestOptions& options,
                      const std::vector<double>& sigmas) {
  nlohmann::json tests = nlohmann::json::object();
  for (const auto& t : run_checks(learner, metric, errors.residuals, options)) {
    if (!t.skipped.empty()) {
      tests[t.key] = {{"skipped", t.skipped}};
      continue;
    }
    auto j = to_json(t.report);
    j["pass_ratio"] = test_pass_ratio(t.report);
    tests[t.key] = j;
  }
  nlohmann::json out = {{"schema", "evalmodel.assess/1"},
                        {"n", errors.residuals.size()},
                        {"options", to_json(options)},
                        {"tests", tests}};
  if (!errors.losses.empty()) {
    MeasurementProvenance prov;
    const ErrorMeasurements em(errors.losses, prov, errors.residuals);
    nlohmann::json bounds = nlohmann::json::array();
    for (double s : sigmas) bounds.push_back(to_json(generalization_bound(em, s)));
    out["bounds"] = bounds;
  }
  return out;
}

nlohmann::json shapley(const EvalDataset& dataset, const BaseLearnerConfig& learner,
                       std::size_t baseline_proxy_index) {
  std::vector<std::string> players;
  if (!dataset.condition_names.empty()) players.push_back(kConditionPlayer);
  players.push_back(kSubjectPlayer);
  players.push_back(kProxyPlayer);
  const auto clamp = MetricClamp::for_metric(dataset.metric);
  const auto game = coalition_values(dataset.train, dataset.test, players, learner,
                                     baseline_proxy_index, clamp);
  auto report = attribution_report(game);
  report["metric"] = dataset.metric;
  report["learner"] = to_json(learner);
  report["baseline_proxy"] = baseline_proxy_index < dataset.proxy_names.size()
                                 ? nlohmann::json(dataset.proxy_names[baseline_proxy_index])
                                 : nlohmann::json(nullptr);
  return report;
}

}  // namespace evalmodel
