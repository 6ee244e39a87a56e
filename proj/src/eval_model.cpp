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

#include "evalmodel/eval_model.hpp"

#include <algorithm>
#include <cmath>

#include "evalmodel/errors.hpp"
#include "evalmodel/metrics.hpp"
#include "evalmodel/random.hpp"

namespace evalmodel {
namespace {

using nlohmann::json;

double json_bound(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

json bound_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

Matrix design(const FeatureLayout& layout, const std::vector<const EvaluationSample*>& samples,
              std::vector<double>& targets) {
  Matrix rows(samples.size(), layout.width());
  targets.resize(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto f = layout.features(*samples[i]);
    std::copy(f.begin(), f.end(), rows.row(i).begin());
    targets[i] = samples[i]->true_metric;
  }
  return rows;
}

double train_rmse(const Regressor& model, const Matrix& rows, const std::vector<double>& targets,
                  const MetricClamp& clamp) {
  double ss = 0.0;
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    const double e = clamp.apply(model.predict(rows.row(i))) - targets[i];
    ss += e * e;
  }
  return std::sqrt(ss / static_cast<double>(rows.rows()));
}

}  // namespace

std::size_t FeatureLayout::width() const {
  return (blocks.condition ? condition_dims : 0) + (blocks.subject ? subject_dims : 0) +
         (blocks.proxy ? proxy_dims : 0);
}

std::vector<double> FeatureLayout::features(const EvaluationSample& sample) const {
  if (sample.condition.size() != condition_dims || sample.subject.values.size() != subject_dims ||
      sample.proxies.size() != proxy_dims) {
    throw InputError("sample layout (" + std::to_string(sample.condition.size()) + ", " +
                     std::to_string(sample.subject.values.size()) + ", " +
                     std::to_string(sample.proxies.size()) + ") does not match model layout (" +
                     std::to_string(condition_dims) + ", " + std::to_string(subject_dims) + ", " +
                     std::to_string(proxy_dims) + ")");
  }
  std::vector<double> out;
  out.reserve(width());
  if (blocks.condition) out.insert(out.end(), sample.condition.begin(), sample.condition.end());
  if (blocks.subject) {
    out.insert(out.end(), sample.subject.values.begin(), sample.subject.values.end());
  }
  if (blocks.proxy) out.insert(out.end(), sample.proxies.begin(), sample.proxies.end());
  return out;
}

MetricClamp MetricClamp::for_metric(const std::string& metric) {
  for (MetricKind kind : {MetricKind::kClassification, MetricKind::kRegression}) {
    const auto& names = MetricVector::names(kind);
    if (std::find(names.begin(), names.end(), metric) != names.end()) {
      const auto [lo, hi] = MetricVector::range(metric);
      return {lo, hi};
    }
  }
  return {};
}

const Regressor& EvaluationModel::route(int type_id) const {
  const auto it = per_type_models.find(type_id);
  if (it != per_type_models.end()) return *it->second;
  if (fallback) return *fallback;
  throw RoutingError("no evaluation model for subject type " + std::to_string(type_id) +
                     " and no fallback");
}

EvaluationModel meta_fit(const std::vector<EvaluationSample>& train, const BaseLearnerConfig& cfg,
                         const MetaFitOptions& options) {
  if (train.empty()) throw ConfigError("meta_fit needs a nonempty training set");
  cfg.validate();
  EvaluationModel em;
  em.learner = cfg;
  em.clamp = options.clamp;
  em.layout = FeatureLayout{train.front().condition.size(), train.front().subject.values.size(),
                            train.front().proxies.size(), options.blocks};
  if (em.layout.width() == 0) throw ConfigError("meta_fit: every feature block is excluded");

  std::map<int, std::vector<const EvaluationSample*>> groups;
  std::vector<const EvaluationSample*> all;
  all.reserve(train.size());
  for (const auto& s : train) {
    groups[s.subject.type_id].push_back(&s);
    all.push_back(&s);
  }

  // Without the subject block the type is invisible to the model, so one
  // pooled model serves everything.
  const bool route_by_type = options.blocks.subject;
  bool need_fallback = options.fit_fallback || !route_by_type;
  if (route_by_type) {
    for (const auto& [type, members] : groups) {
      if (members.size() < options.min_group_rows) need_fallback = true;
    }
  }

  std::vector<double> targets;
  if (need_fallback) {
    const Matrix rows = design(em.layout, all, targets);
    auto model = fit_base(rows, targets, cfg);
    em.fallback_train_rmse = train_rmse(*model, rows, targets, em.clamp);
    em.fallback = std::move(model);
  }
  for (const auto& [type, members] : groups) {
    TypeReport report;
    report.rows = members.size();
    if (!route_by_type || members.size() < options.min_group_rows) {
      report.uses_fallback = true;
      const Matrix rows = design(em.layout, members, targets);
      report.train_rmse = train_rmse(*em.fallback, rows, targets, em.clamp);
    } else {
      const Matrix rows = design(em.layout, members, targets);
      auto model = fit_base(rows, targets, cfg);
      report.train_rmse = train_rmse(*model, rows, targets, em.clamp);
      em.per_type_models[type] = std::move(model);
    }
    em.training_report[type] = report;
  }
  return em;
}

double meta_predict(const EvaluationModel& em, const EvaluationSample& sample) {
  const Regressor& model = em.route(sample.subject.type_id);
  return em.clamp.apply(model.predict(em.layout.features(sample)));
}

double estimate_effect(const EvaluationModel& em, const std::vector<double>& condition,
                       const SubjectVector& subject_a, const SubjectVector& subject_b,
                       const std::vector<double>& proxies_a,
                       const std::vector<double>& proxies_b) {
  const EvaluationSample a{condition, subject_a, proxies_a, 0.0};
  const EvaluationSample b{condition, subject_b, proxies_b, 0.0};
  return meta_predict(em, a) - meta_predict(em, b);
}

double prediction_rmse(const EvaluationModel& em, const std::vector<EvaluationSample>& samples) {
  if (samples.empty()) throw InputError("prediction_rmse on an empty sample set");
  double ss = 0.0;
  for (const auto& s : samples) {
    const double e = meta_predict(em, s) - s.true_metric;
    ss += e * e;
  }
  return std::sqrt(ss / static_cast<double>(samples.size()));
}

std::vector<std::pair<std::size_t, std::size_t>> sample_pairs(std::size_t n, std::size_t pairs,
                                                              std::uint64_t seed) {
  if (n < 2) throw InputError("sample_pairs needs at least 2 items");
  RandomStream stream(seed);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(pairs);
  while (out.size() < pairs) {
    const auto i = static_cast<std::size_t>(stream.uniform_int(0, n - 1));
    const auto j = static_cast<std::size_t>(stream.uniform_int(0, n - 1));
    if (i != j) out.emplace_back(i, j);
  }
  return out;
}

double effect_rmse(std::span<const double> predictions, std::span<const double> truth,
                   const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  if (predictions.size() != truth.size()) throw InputError("effect_rmse: size mismatch");
  if (pairs.empty()) throw InputError("effect_rmse needs at least one pair");
  double ss = 0.0;
  for (const auto& [i, j] : pairs) {
    if (i >= truth.size() || j >= truth.size()) throw InputError("effect_rmse: pair out of range");
    const double e = (predictions[i] - predictions[j]) - (truth[i] - truth[j]);
    ss += e * e;
  }
  return std::sqrt(ss / static_cast<double>(pairs.size()));
}

nlohmann::json to_json(const EvaluationModel& em) {
  json types = json::object();
  for (const auto& [type, model] : em.per_type_models) types[std::to_string(type)] = model->to_json();
  json report = json::object();
  for (const auto& [type, r] : em.training_report) {
    report[std::to_string(type)] = {
        {"rows", r.rows}, {"train_rmse", r.train_rmse}, {"uses_fallback", r.uses_fallback}};
  }
  const auto& b = em.layout.blocks;
  return {{"schema", kEvalModelSchema},
          {"learner", to_json(em.learner)},
          {"layout",
           {{"condition_dims", em.layout.condition_dims},
            {"subject_dims", em.layout.subject_dims},
            {"proxy_dims", em.layout.proxy_dims},
            {"blocks", {{"condition", b.condition}, {"subject", b.subject}, {"proxy", b.proxy}}}}},
          {"clamp", {bound_json(em.clamp.lo), bound_json(em.clamp.hi)}},
          {"per_type_models", types},
          {"fallback", em.fallback ? em.fallback->to_json() : json(nullptr)},
          {"fallback_train_rmse", em.fallback_train_rmse},
          {"training_report", report}};
}

EvaluationModel eval_model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema").get<std::string>() != kEvalModelSchema) {
      throw InputError("unsupported evaluation model schema " + j.at("schema").dump());
    }
    EvaluationModel em;
    em.learner = learner_config_from_json(j.at("learner"));
    const auto& l = j.at("layout");
    em.layout.condition_dims = l.at("condition_dims").get<std::size_t>();
    em.layout.subject_dims = l.at("subject_dims").get<std::size_t>();
    em.layout.proxy_dims = l.at("proxy_dims").get<std::size_t>();
    em.layout.blocks.condition = l.at("blocks").at("condition").get<bool>();
    em.layout.blocks.subject = l.at("blocks").at("subject").get<bool>();
    em.layout.blocks.proxy = l.at("blocks").at("proxy").get<bool>();
    const double lo = json_bound(j.at("clamp").at(0));
    const double hi = json_bound(j.at("clamp").at(1));
    if (!std::isnan(lo)) em.clamp.lo = lo;
    if (!std::isnan(hi)) em.clamp.hi = hi;
    for (const auto& [key, mj] : j.at("per_type_models").items()) {
      em.per_type_models[std::stoi(key)] = regressor_from_json(mj);
    }
    if (!j.at("fallback").is_null()) em.fallback = regressor_from_json(j.at("fallback"));
    em.fallback_train_rmse = j.at("fallback_train_rmse").get<double>();
    for (const auto& [key, rj] : j.at("training_report").items()) {
      em.training_report[std::stoi(key)] = {rj.at("rows").get<std::size_t>(),
                                            rj.at("train_rmse").get<double>(),
                                            rj.at("uses_fallback").get<bool>()};
    }
    return em;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed evaluation model document: ") + e.what());
  }
}

}  // namespace evalmodel
