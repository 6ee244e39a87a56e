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

#include "evalmodel/proxy.hpp"

#include <cmath>
#include <limits>

#include "evalmodel/errors.hpp"
#include "evalmodel/random.hpp"

namespace evalmodel {
namespace {

constexpr int kBootstrapAttempts = 10;

std::vector<std::size_t> pick(std::span<const std::size_t> pool,
                              const std::vector<std::size_t>& positions) {
  std::vector<std::size_t> rows;
  rows.reserve(positions.size());
  for (auto p : positions) rows.push_back(pool[p]);
  return rows;
}

std::string percent_label(double fraction) {
  return std::to_string(static_cast<long long>(std::llround(fraction * 100.0)));
}

// Every metric that is defined on `rows` on its own, nan for the others.
// Used for folds whose full summary is undefined (e.g. a single row has no
// r2, a single-class fold no roc_auc).
std::vector<double> partial_metrics(const SceneDataset& data, std::span<const std::size_t> rows,
                                    std::span<const double> scores_by_row) {
  constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
  const auto guarded = [&](auto&& fn) {
    try {
      return fn();
    } catch (const DegenerateInputError&) {
      return kNan;
    }
  };
  std::vector<double> scores, targets;
  for (auto r : rows) {
    scores.push_back(scores_by_row[r]);
    targets.push_back(data.targets[r]);
  }
  const double n = static_cast<double>(rows.size());
  if (data.task_kind == TaskKind::kRegression) {
    double se = 0.0, ae = 0.0, ape = 0.0, mean = 0.0;
    std::size_t ape_count = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const double e = scores[i] - targets[i];
      se += e * e;
      ae += std::abs(e);
      if (std::abs(targets[i]) >= 1e-12) {
        ape += std::abs(e / targets[i]);
        ++ape_count;
      }
      mean += targets[i];
    }
    mean /= n;
    double ss_tot = 0.0;
    for (double t : targets) ss_tot += (t - mean) * (t - mean);
    return {std::sqrt(se / n), ss_tot > 0.0 ? 1.0 - se / ss_tot : kNan, ae / n,
            ape_count > 0 ? ape / static_cast<double>(ape_count) : kNan, se / n};
  }
  std::vector<int> labels;
  for (double t : targets) labels.push_back(t != 0.0 ? 1 : 0);
  const auto c = confusion_at(scores, labels, 0.5);
  const double acc = static_cast<double>(c.tp + c.tn) / n;
  const double precision =
      c.tp + c.fp == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  const double recall =
      c.tp + c.fn == 0 ? kNan : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  const double f1 = std::isnan(recall) ? kNan
                    : precision + recall == 0.0 ? 0.0
                                                : 2.0 * precision * recall / (precision + recall);
  return {guarded([&] { return roc_auc(scores, labels); }), acc, recall, precision, f1,
          guarded([&] { return pr_auc(scores, labels); })};
}

}  // namespace

void ProxyConfig::validate() const {
  for (double f : holdout_fractions) {
    if (!(f > 0.0 && f <= 1.0)) throw ConfigError("holdout fractions must lie in (0, 1]");
  }
  for (auto k : cv_folds) {
    if (k < 2) throw ConfigError("cv folds must be at least 2");
  }
  if (holdout_fractions.empty() && cv_folds.empty() && !bootstrap) {
    throw ConfigError("proxy config selects no estimator");
  }
}

nlohmann::json to_json(const ProxyConfig& cfg) {
  return {{"holdout_fractions", cfg.holdout_fractions},
          {"cv_folds", cfg.cv_folds},
          {"bootstrap", cfg.bootstrap},
          {"seed", cfg.seed}};
}

ProxyConfig proxy_config_from_json(const nlohmann::json& j) {
  ProxyConfig cfg;
  try {
    cfg.holdout_fractions = j.value("holdout_fractions", cfg.holdout_fractions);
    cfg.cv_folds = j.value("cv_folds", cfg.cv_folds);
    cfg.bootstrap = j.value("bootstrap", cfg.bootstrap);
    cfg.seed = j.value("seed", cfg.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("proxy config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

MetricVector holdout_proxy(const SceneDataset& data, std::span<const std::size_t> pool,
                           std::span<const double> scores_by_row, double fraction,
                           std::uint64_t seed, const RowAudit& audit) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("holdout fraction must lie in (0, 1]");
  if (pool.empty()) throw DegenerateInputError("empty proxy pool");
  std::vector<std::size_t> rows;
  if (fraction == 1.0) {
    rows.assign(pool.begin(), pool.end());
  } else {
    const auto m = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(pool.size()))));
    RandomStream stream(seed);
    rows = pick(pool, stream.sample_without_replacement(pool.size(), m));
  }
  if (audit) audit(rows);
  return evaluate_rows(data, rows, scores_by_row);
}

KFoldResult kfold_proxy(const SceneDataset& data, std::span<const std::size_t> pool,
                        std::span<const double> scores_by_row, std::size_t k,
                        std::uint64_t seed, const RowAudit& audit) {
  if (k < 2) throw ConfigError("k-fold needs k >= 2");
  if (pool.size() < k) throw ConfigError("k-fold needs at least k pool rows");
  RandomStream stream(seed);
  const auto order = pick(pool, stream.permutation(pool.size()));
  const MetricKind kind = data.metric_kind();
  const std::size_t n_metrics = MetricVector::names(kind).size();
  KFoldResult result;
  std::vector<double> sums(n_metrics, 0.0);
  std::vector<std::size_t> used(n_metrics, 0);
  for (std::size_t f = 0; f < k; ++f) {
    // Near-equal contiguous folds of the shuffled pool.
    const std::size_t begin = f * order.size() / k;
    const std::size_t end = (f + 1) * order.size() / k;
    std::span<const std::size_t> fold(order.data() + begin, end - begin);
    if (audit) audit(fold);
    std::vector<double> values;
    try {
      values = evaluate_rows(data, fold, scores_by_row).values();
    } catch (const DegenerateInputError&) {
      values = partial_metrics(data, fold, scores_by_row);
      ++result.skipped_folds;
    }
    for (std::size_t i = 0; i < n_metrics; ++i) {
      if (std::isnan(values[i])) continue;
      sums[i] += values[i];
      ++used[i];
    }
  }
  bool any = false;
  for (std::size_t i = 0; i < n_metrics; ++i) {
    if (used[i] == 0) {
      sums[i] = std::numeric_limits<double>::quiet_NaN();
    } else {
      sums[i] /= static_cast<double>(used[i]);
      any = true;
    }
  }
  if (!any) throw DegenerateInputError("every k-fold fold is degenerate for the metric");
  result.metrics = MetricVector(kind, std::move(sums));
  return result;
}

MetricVector bootstrap_proxy(const SceneDataset& data, std::span<const std::size_t> pool,
                             std::span<const double> scores_by_row, std::uint64_t seed,
                             const RowAudit& audit) {
  if (pool.empty()) throw DegenerateInputError("empty proxy pool");
  RandomStream stream(seed);
  for (int attempt = 0; attempt < kBootstrapAttempts; ++attempt) {
    const auto rows = pick(pool, stream.sample_with_replacement(pool.size(), pool.size()));
    if (audit) audit(rows);
    try {
      return evaluate_rows(data, rows, scores_by_row);
    } catch (const DegenerateInputError&) {
    }
  }
  throw DegenerateInputError("bootstrap resample degenerate after 10 attempts");
}

MetricVector holdout_proxy(const SceneSystem& system, const AgentSpec& agent, double fraction,
                           std::uint64_t seed) {
  return holdout_proxy(*system.data, system.proxy_pool, score_rows(*system.data, agent),
                       fraction, seed);
}

KFoldResult kfold_proxy(const SceneSystem& system, const AgentSpec& agent, std::size_t k,
                        std::uint64_t seed) {
  return kfold_proxy(*system.data, system.proxy_pool, score_rows(*system.data, agent), k, seed);
}

MetricVector bootstrap_proxy(const SceneSystem& system, const AgentSpec& agent,
                             std::uint64_t seed) {
  return bootstrap_proxy(*system.data, system.proxy_pool, score_rows(*system.data, agent), seed);
}

std::vector<std::string> estimator_names(const ProxyConfig& cfg) {
  std::vector<std::string> names;
  for (double f : cfg.holdout_fractions) names.push_back("holdout-" + percent_label(f));
  for (auto k : cfg.cv_folds) names.push_back("cv-" + std::to_string(k));
  if (cfg.bootstrap) names.emplace_back("bootstrap");
  return names;
}

std::vector<std::string> proxy_column_names(const ProxyConfig& cfg, MetricKind kind) {
  std::vector<std::string> cols;
  for (const auto& est : estimator_names(cfg)) {
    for (const auto& metric : MetricVector::names(kind)) cols.push_back(est + "." + metric);
  }
  return cols;
}

std::vector<MetricVector> proxy_metrics(const SceneSystem& system,
                                        std::span<const double> scores_by_row,
                                        const ProxyConfig& cfg, const RowAudit& audit) {
  const SceneDataset& data = *system.data;
  std::vector<MetricVector> out;
  std::uint64_t key = 0;
  for (double f : cfg.holdout_fractions) {
    out.push_back(holdout_proxy(data, system.proxy_pool, scores_by_row, f,
                                derive_seed(cfg.seed, key++), audit));
  }
  for (auto k : cfg.cv_folds) {
    out.push_back(kfold_proxy(data, system.proxy_pool, scores_by_row, k,
                              derive_seed(cfg.seed, key++), audit)
                      .metrics);
  }
  if (cfg.bootstrap) {
    out.push_back(
        bootstrap_proxy(data, system.proxy_pool, scores_by_row, derive_seed(cfg.seed, key++), audit));
  }
  return out;
}

std::vector<double> flatten(const std::vector<MetricVector>& metrics) {
  std::vector<double> flat;
  for (const auto& m : metrics) flat.insert(flat.end(), m.values().begin(), m.values().end());
  return flat;
}

}  // namespace evalmodel
