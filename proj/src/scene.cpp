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

#include "evalmodel/scene.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <set>

#include "evalmodel/csv.hpp"
#include "evalmodel/errors.hpp"
#include "evalmodel/random.hpp"

namespace evalmodel {
namespace {

bool is_missing(const std::string& cell) {
  if (cell.empty()) return true;
  std::string lower;
  for (char c : cell) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return lower == "na" || lower == "nan" || lower == "null" || lower == "none";
}

std::optional<double> parse_number(const std::string& cell) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end == begin || errno == ERANGE) return std::nullopt;
  while (*end == ' ' || *end == '\t') ++end;
  if (*end != '\0' || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string where(std::size_t line, const std::string& column) {
  return " (line " + std::to_string(line) + ", column '" + column + "')";
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

void SceneDataset::validate() const {
  if (features.rows() != targets.size()) throw InputError("feature and target row counts differ");
  for (double v : features.data()) {
    if (!std::isfinite(v)) throw InputError("dataset contains a non-finite feature");
  }
  for (double v : targets) {
    if (!std::isfinite(v)) throw InputError("dataset contains a non-finite target");
    if (task_kind != TaskKind::kRegression && v != 0.0 && v != 1.0) {
      throw InputError("classification targets must be 0 or 1");
    }
  }
}

CsvSchema csv_schema_from_json(const nlohmann::json& j) {
  CsvSchema s;
  try {
    s.target = j.at("target").get<std::string>();
    s.features = j.value("features", s.features);
    s.drop = j.value("drop", s.drop);
    if (j.contains("ordinal")) {
      s.ordinal = j["ordinal"].get<std::map<std::string, std::vector<std::string>>>();
    }
    s.task_kind = task_kind_from_string(j.value("task_kind", std::string("regression")));
    s.max_one_hot_levels = j.value("max_one_hot_levels", s.max_one_hot_levels);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("csv schema: ") + e.what());
  }
  return s;
}

SceneDataset load_csv(const std::string& path, const CsvSchema& schema) {
  const auto table = read_csv_file(path);
  if (table.empty()) throw IngestionError("'" + path + "' has no header");
  const auto& header = table.front();
  auto column_of = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw IngestionError("missing column '" + name + "' in '" + path + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t target_col = column_of(schema.target);
  std::vector<std::string> feature_cols = schema.features;
  if (feature_cols.empty()) {
    for (const auto& name : header) {
      if (name == schema.target) continue;
      if (std::find(schema.drop.begin(), schema.drop.end(), name) != schema.drop.end()) continue;
      feature_cols.push_back(name);
    }
  }
  std::vector<std::size_t> feature_idx;
  for (const auto& name : feature_cols) feature_idx.push_back(column_of(name));

  // Keep complete rows only; remember their 1-based line numbers.
  std::vector<std::size_t> kept;
  for (std::size_t r = 1; r < table.size(); ++r) {
    if (table[r].size() != header.size()) {
      throw IngestionError("line " + std::to_string(r + 1) + " has " +
                           std::to_string(table[r].size()) + " fields, header has " +
                           std::to_string(header.size()));
    }
    bool complete = !is_missing(table[r][target_col]);
    for (auto c : feature_idx) complete = complete && !is_missing(table[r][c]);
    if (complete) kept.push_back(r);
  }

  SceneDataset ds;
  ds.name = path;
  ds.task_kind = schema.task_kind;
  std::vector<std::vector<double>> columns;

  for (std::size_t f = 0; f < feature_idx.size(); ++f) {
    const std::size_t c = feature_idx[f];
    const std::string& name = feature_cols[f];
    const auto ordinal = schema.ordinal.find(name);
    if (ordinal != schema.ordinal.end()) {
      std::vector<double> col;
      for (auto r : kept) {
        const auto& levels = ordinal->second;
        const auto it = std::find(levels.begin(), levels.end(), table[r][c]);
        if (it == levels.end()) {
          throw IngestionError("unknown ordinal level '" + table[r][c] + "'" + where(r + 1, name));
        }
        col.push_back(static_cast<double>(it - levels.begin()));
      }
      ds.feature_names.push_back(name);
      columns.push_back(std::move(col));
      continue;
    }
    const bool numeric = kept.empty() || parse_number(table[kept.front()][c]).has_value();
    if (numeric) {
      std::vector<double> col;
      for (auto r : kept) {
        const auto v = parse_number(table[r][c]);
        if (!v) throw IngestionError("unparseable numeric cell '" + table[r][c] + "'" + where(r + 1, name));
        col.push_back(*v);
      }
      ds.feature_names.push_back(name);
      columns.push_back(std::move(col));
      continue;
    }
    std::set<std::string> levels;
    for (auto r : kept) levels.insert(table[r][c]);
    if (levels.size() > schema.max_one_hot_levels) {
      throw IngestionError("text column '" + name + "' has " + std::to_string(levels.size()) +
                           " levels; declare it ordinal or drop it");
    }
    for (const auto& level : levels) {
      std::vector<double> col;
      for (auto r : kept) col.push_back(table[r][c] == level ? 1.0 : 0.0);
      ds.feature_names.push_back(name + "=" + level);
      columns.push_back(std::move(col));
    }
  }

  const bool text_target = !kept.empty() && !parse_number(table[kept.front()][target_col]);
  if (text_target) {
    if (schema.task_kind == TaskKind::kRegression) {
      throw IngestionError("regression target '" + schema.target + "' is not numeric");
    }
    std::set<std::string> levels;
    for (auto r : kept) levels.insert(table[r][target_col]);
    if (levels.size() != 2) throw IngestionError("classification target needs exactly 2 levels");
    const std::string positive = *levels.rbegin();
    for (auto r : kept) ds.targets.push_back(table[r][target_col] == positive ? 1.0 : 0.0);
  } else {
    for (auto r : kept) {
      const auto v = parse_number(table[r][target_col]);
      if (!v) {
        throw IngestionError("unparseable target '" + table[r][target_col] + "'" +
                             where(r + 1, schema.target));
      }
      if (schema.task_kind != TaskKind::kRegression && *v != 0.0 && *v != 1.0) {
        throw IngestionError("classification target must be 0/1" + where(r + 1, schema.target));
      }
      ds.targets.push_back(*v);
    }
  }

  ds.features = Matrix(kept.size(), columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    for (std::size_t i = 0; i < kept.size(); ++i) ds.features(i, j) = columns[j][i];
  }
  ds.validate();
  return ds;
}

nlohmann::json to_json(const SyntheticSceneConfig& cfg) {
  return {{"kind", to_string(cfg.kind)},
          {"rows", cfg.rows},
          {"input_dim", cfg.input_dim},
          {"seed", cfg.seed},
          {"noise_std", cfg.noise_std}};
}

SyntheticSceneConfig synthetic_scene_config_from_json(const nlohmann::json& j) {
  SyntheticSceneConfig cfg;
  try {
    cfg.kind = task_kind_from_string(j.value("kind", std::string("regression")));
    cfg.rows = j.value("rows", cfg.rows);
    cfg.input_dim = j.value("input_dim", cfg.input_dim);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.noise_std = j.value("noise_std", cfg.noise_std);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("scene config: ") + e.what());
  }
  return cfg;
}

SceneDataset make_synthetic_scene(const SyntheticSceneConfig& cfg) {
  if (cfg.rows < 50) throw ConfigError("synthetic scenes need at least 50 rows");
  if (cfg.input_dim < 2) throw ConfigError("synthetic scenes need input_dim >= 2");
  if (cfg.kind == TaskKind::kTernaryDecision) {
    throw ConfigError("synthetic scenes are regression or classification");
  }
  RandomStream structure(derive_seed(cfg.seed, 1));
  RandomStream draws(derive_seed(cfg.seed, 2));
  const std::size_t covariates = cfg.input_dim - 1;
  const std::size_t treatment = cfg.input_dim - 1;

  // Sparse random outcome function.
  const std::size_t active = std::min<std::size_t>(4, covariates);
  const auto linear_idx = structure.sample_without_replacement(covariates, active);
  std::vector<double> linear_coef(active);
  for (auto& a : linear_coef) a = structure.normal();
  const auto p = structure.uniform_int(0, covariates - 1);
  const auto q = structure.uniform_int(0, covariates - 1);
  const auto r = structure.uniform_int(0, covariates - 1);
  const auto s = structure.uniform_int(0, covariates - 1);
  const double interaction = structure.normal(0.0, 0.7);
  const double wave = structure.normal(0.0, 0.7);
  const double effect_base = 0.5 + 0.5 * structure.uniform();
  const double effect_slope = structure.normal(0.0, 0.5);

  SceneDataset ds;
  ds.name = std::string("synthetic_") + to_string(cfg.kind);
  ds.task_kind = cfg.kind;
  for (std::size_t j = 0; j < covariates; ++j) ds.feature_names.push_back("x" + std::to_string(j));
  ds.feature_names.push_back("treatment");
  ds.features = Matrix(cfg.rows, cfg.input_dim);
  ds.targets.resize(cfg.rows);
  for (std::size_t i = 0; i < cfg.rows; ++i) {
    auto x = ds.features.row(i);
    for (std::size_t j = 0; j < covariates; ++j) x[j] = draws.normal();
    x[treatment] = draws.bernoulli(0.5) ? 1.0 : 0.0;
    double g = 0.0;
    for (std::size_t k = 0; k < active; ++k) g += linear_coef[k] * x[linear_idx[k]];
    g += interaction * x[p] * x[q] + wave * std::sin(2.0 * x[r]);
    g += x[treatment] * (effect_base + effect_slope * x[s]);
    if (cfg.kind == TaskKind::kRegression) {
      ds.targets[i] = g + draws.normal(0.0, cfg.noise_std);
    } else {
      ds.targets[i] = draws.bernoulli(logistic(1.5 * (g - 0.5 * effect_base))) ? 1.0 : 0.0;
    }
  }
  return ds;
}

SceneDataset make_synthetic_scene(TaskKind kind, std::size_t rows, std::size_t input_dim,
                                  std::uint64_t seed) {
  SyntheticSceneConfig cfg;
  cfg.kind = kind;
  cfg.rows = rows;
  cfg.input_dim = input_dim;
  cfg.seed = seed;
  return make_synthetic_scene(cfg);
}

SceneSystem build_system(std::shared_ptr<const SceneDataset> data, std::uint64_t seed) {
  if (!data) throw ConfigError("build_system: no dataset");
  const std::size_t n = data->rows();
  if (n < 10) throw ConfigError("build_system needs at least 10 rows");
  RandomStream stream(seed);
  auto order = stream.permutation(n);
  const auto n_system =
      static_cast<std::size_t>(std::llround(kSystemFraction * static_cast<double>(n)));
  SceneSystem sys;
  sys.data = std::move(data);
  sys.noise_seed = seed;
  sys.system_rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_system));
  sys.proxy_pool.assign(order.begin() + static_cast<std::ptrdiff_t>(n_system), order.end());
  std::sort(sys.system_rows.begin(), sys.system_rows.end());
  std::sort(sys.proxy_pool.begin(), sys.proxy_pool.end());
  return sys;
}

std::vector<double> score_rows(const SceneDataset& data, const AgentSpec& agent) {
  if (agent.input_dim != data.input_dim()) {
    throw InputError("agent input_dim " + std::to_string(agent.input_dim) +
                     " does not match scene width " + std::to_string(data.input_dim()));
  }
  std::vector<double> scores(data.rows());
  for (std::size_t i = 0; i < data.rows(); ++i) scores[i] = forward(agent, data.features.row(i))[0];
  return scores;
}

MetricVector evaluate_rows(const SceneDataset& data, std::span<const std::size_t> rows,
                           std::span<const double> scores_by_row) {
  if (scores_by_row.size() != data.rows()) throw InputError("one score per dataset row expected");
  std::vector<double> scores;
  scores.reserve(rows.size());
  for (auto r : rows) scores.push_back(scores_by_row[r]);
  if (data.task_kind == TaskKind::kRegression) {
    std::vector<double> targets;
    targets.reserve(rows.size());
    for (auto r : rows) targets.push_back(data.targets[r]);
    return regression_summary(scores, targets);
  }
  std::vector<int> labels;
  labels.reserve(rows.size());
  for (auto r : rows) labels.push_back(data.targets[r] != 0.0 ? 1 : 0);
  return classification_summary(scores, labels);
}

MetricVector true_metric(const SceneSystem& system, const AgentSpec& agent) {
  return true_metric(system, score_rows(*system.data, agent));
}

MetricVector true_metric(const SceneSystem& system, std::span<const double> scores_by_row) {
  return evaluate_rows(*system.data, system.system_rows, scores_by_row);
}

}  // namespace evalmodel
