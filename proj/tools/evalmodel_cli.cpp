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

// Command-line entry point: run-scene, run-backtest, emit-bound-table,
// assess and shapley.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "evalmodel/errors.hpp"
#include "evalmodel/evaluation_sample.hpp"
#include "evalmodel/harness.hpp"

namespace {

using evalmodel::ConfigError;
using evalmodel::ExperimentConfig;

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> replicates;
  std::optional<std::size_t> jobs;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "Experiment config (JSON)");
  cmd->add_option("--seed", flags.seed, "Root seed");
  cmd->add_option("--out", flags.out, "Output directory");
  cmd->add_option("--replicates", flags.replicates, "Number of replicates");
  cmd->add_option("--jobs", flags.jobs, "Worker threads");
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("'" + path + "': " + e.what());
  }
}

ExperimentConfig load_config(const CommonFlags& flags, const ExperimentConfig& base) {
  ExperimentConfig cfg = base;
  if (!flags.config.empty()) cfg = evalmodel::experiment_config_from_json(read_json(flags.config), base);
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.out) cfg.output_dir = *flags.out;
  if (flags.replicates) cfg.replicates = *flags.replicates;
  if (flags.jobs) cfg.jobs = *flags.jobs;
  cfg.validate();
  return cfg;
}

// Returns false when no replicate succeeded.
bool print_rows(const evalmodel::ExperimentReport& report) {
  for (const auto& r : report.rows) {
    std::cout << r.metric << '\t' << r.method << '\t' << r.summary.mean << " +/- "
              << r.summary.half_width << " (n=" << r.summary.n << ")\n";
  }
  for (const auto& f : report.files) std::cout << "wrote " << f << '\n';
  for (const auto& r : report.rows) {
    if (r.summary.n > 0) return true;
  }
  std::cerr << "error: every replicate failed\n";
  return false;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw evalmodel::IngestionError("cannot write '" + path + "'");
  out << text;
}

void emit_json(const std::optional<std::string>& path, const nlohmann::json& j) {
  if (path) {
    write_text(*path, j.dump(2) + "\n");
    std::cout << "wrote " << *path << '\n';
  } else {
    std::cout << j.dump(2) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evaluation-model experiments"};
  app.require_subcommand(1);

  CommonFlags scene_flags, trade_flags;
  auto* run_scene = app.add_subcommand("run-scene", "Scene experiment with baselines and learners");
  add_common(run_scene, scene_flags);
  auto* run_backtest = app.add_subcommand("run-backtest", "Conditional trade experiment");
  add_common(run_backtest, trade_flags);

  std::string table_out = ".";
  auto* bound_table = app.add_subcommand("emit-bound-table", "Write the two bound tables");
  bound_table->add_option("--out", table_out, "Output directory");

  std::string errors_path, learner_name = "Linear", metric_name = "rmse";
  std::optional<std::string> assess_out;
  evalmodel::SubsetTestOptions test_options;
  auto* assess = app.add_subcommand("assess", "Assumption checks on a residual file");
  assess->add_option("errors", errors_path, "CSV with residual and optional loss columns")
      ->required();
  assess->add_option("--learner", learner_name, "Learner label used in report keys");
  assess->add_option("--metric", metric_name, "Metric used in report keys");
  assess->add_option("--seed", test_options.seed, "Subset sampling seed");
  assess->add_option("--subsets", test_options.n_subsets, "Subsets per check");
  assess->add_option("--alpha", test_options.alpha, "Significance level");
  assess->add_option("--out", assess_out, "Report path (default stdout)");

  std::string samples_path, learner_config;
  std::string learner_kind = "linear";
  std::size_t baseline_proxy = 0;
  std::optional<std::uint64_t> shapley_seed;
  std::optional<std::string> shapley_out;
  auto* shapley = app.add_subcommand("shapley", "Shapley attribution of feature blocks");
  shapley->add_option("samples", samples_path, "Samples CSV written by the harness")->required();
  shapley->add_option("--learner", learner_kind, "linear, mlp or gbt");
  shapley->add_option("--config", learner_config, "Learner config (JSON)");
  shapley->add_option("--baseline-proxy", baseline_proxy, "Proxy column of the empty coalition");
  shapley->add_option("--seed", shapley_seed, "Learner seed");
  shapley->add_option("--out", shapley_out, "Report path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run_scene) {
      const auto cfg = load_config(scene_flags, evalmodel::default_scene_config());
      if (!print_rows(evalmodel::run_scene(cfg))) return kExitRuntime;
    } else if (*run_backtest) {
      const auto cfg = load_config(trade_flags, evalmodel::default_backtest_config());
      if (!print_rows(evalmodel::run_backtest(cfg))) return kExitRuntime;
    } else if (*bound_table) {
      const auto tables = evalmodel::emit_bound_table();
      std::filesystem::create_directories(table_out);
      const auto gen = (std::filesystem::path(table_out) / "bounds_generalization.csv").string();
      const auto causal = (std::filesystem::path(table_out) / "bounds_causal.csv").string();
      write_text(gen, "# schema=evalmodel.bound_table/1\n" + tables.generalization_csv);
      write_text(causal, "# schema=evalmodel.bound_table/1\n" + tables.causal_csv);
      std::cout << "wrote " << gen << "\nwrote " << causal << '\n';
    } else if (*assess) {
      const auto errors = evalmodel::read_error_file(errors_path);
      emit_json(assess_out, evalmodel::assess(errors, learner_name, metric_name, test_options,
                                              evalmodel::default_table_sigmas()));
    } else if (*shapley) {
      evalmodel::BaseLearnerConfig learner;
      if (!learner_config.empty()) {
        learner = evalmodel::learner_config_from_json(read_json(learner_config));
      } else {
        learner.kind = evalmodel::learner_kind_from_string(learner_kind);
      }
      if (shapley_seed) learner.seed = *shapley_seed;
      learner.validate();
      const auto dataset = evalmodel::read_eval_dataset(samples_path);
      emit_json(shapley_out, evalmodel::shapley(dataset, learner, baseline_proxy));
    }
  } catch (const evalmodel::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
