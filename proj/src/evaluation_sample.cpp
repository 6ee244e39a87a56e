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

#include "evalmodel/evaluation_sample.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>

#include "evalmodel/csv.hpp"
#include "evalmodel/errors.hpp"
#include "evalmodel/random.hpp"

namespace evalmodel {
namespace {

double parse_cell(const std::string& cell, std::size_t line, const std::string& column) {
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (cell.empty() || *end != '\0') {
    throw IngestionError("unparseable cell '" + cell + "' (line " + std::to_string(line) +
                         ", column '" + column + "')");
  }
  return v;
}

}  // namespace

SceneRecords compute_scene_records(const SceneSystem& system,
                                   const std::vector<AgentSpec>& agents,
                                   const SpaceConfig& space, const ProxyConfig& proxy) {
  proxy.validate();
  SceneRecords out;
  out.records.reserve(agents.size());
  for (const auto& agent : agents) {
    const auto scores = score_rows(*system.data, agent);
    try {
      AgentRecord rec;
      rec.truth = true_metric(system, scores);
      rec.proxies = proxy_metrics(system, scores, proxy);
      for (const auto& m : rec.proxies) {
        for (double v : m.values()) {
          if (!std::isfinite(v)) throw DegenerateInputError("undefined proxy metric");
        }
      }
      rec.subject = vectorize(agent, space);
      rec.agent = agent;
      out.records.push_back(std::move(rec));
    } catch (const DegenerateInputError&) {
      ++out.dropped;
    }
  }
  return out;
}

std::vector<EvaluationSample> samples_for_metric(const std::vector<AgentRecord>& records,
                                                 std::string_view metric) {
  std::vector<EvaluationSample> samples;
  samples.reserve(records.size());
  for (const auto& rec : records) {
    EvaluationSample s;
    s.subject = rec.subject;
    s.proxies = flatten(rec.proxies);
    s.true_metric = rec.truth.get(metric);
    samples.push_back(std::move(s));
  }
  return samples;
}

std::pair<std::vector<EvaluationSample>, std::vector<EvaluationSample>> split_samples(
    std::vector<EvaluationSample> samples, double train_frac, std::uint64_t seed) {
  if (!(train_frac > 0.0 && train_frac < 1.0)) throw ConfigError("train_frac must lie in (0, 1)");
  RandomStream stream(seed);
  const auto order = stream.permutation(samples.size());
  const auto n_train = static_cast<std::size_t>(
      std::llround(train_frac * static_cast<double>(samples.size())));
  std::vector<EvaluationSample> train, test;
  train.reserve(n_train);
  test.reserve(samples.size() - n_train);
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < n_train ? train : test).push_back(std::move(samples[order[i]]));
  }
  return {std::move(train), std::move(test)};
}

EvalDataset build_eval_dataset(const SceneSystem& system, const std::vector<AgentSpec>& agents,
                               const SpaceConfig& space, const ProxyConfig& proxy,
                               std::string_view metric, double train_frac, std::uint64_t seed,
                               bool iris_sampled) {
  if (agents.empty()) throw ConfigError("build_eval_dataset: no agents");
  // Validate the metric name before measuring anything.
  MetricVector::index_of(system.data->metric_kind(), metric);
  auto records = compute_scene_records(system, agents, space, proxy);
  EvalDataset ds;
  std::tie(ds.train, ds.test) =
      split_samples(samples_for_metric(records.records, metric), train_frac, seed);
  ds.proxy_names = proxy_column_names(proxy, system.data->metric_kind());
  ds.metric = std::string(metric);
  ds.provenance = {{"iris_sampled", iris_sampled},
                   {"split_seed", seed},
                   {"system_seed", system.noise_seed},
                   {"proxy", to_json(proxy)},
                   {"space", to_json(space)},
                   {"dropped_agents", records.dropped},
                   {"train_frac", train_frac}};
  return ds;
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_eval_dataset(const std::string& path, const EvalDataset& dataset) {
  const EvaluationSample* first = !dataset.train.empty() ? &dataset.train.front()
                                  : !dataset.test.empty() ? &dataset.test.front()
                                                          : nullptr;
  const std::size_t n_cond = first ? first->condition.size() : dataset.condition_names.size();
  const std::size_t n_subj = first ? first->subject.width() : 0;
  const std::size_t n_proxy = first ? first->proxies.size() : dataset.proxy_names.size();

  std::vector<std::string> header = {"split", "type_id"};
  for (std::size_t i = 0; i < n_cond; ++i) {
    header.push_back(i < dataset.condition_names.size() ? "cond." + dataset.condition_names[i]
                                                        : "cond." + std::to_string(i));
  }
  for (std::size_t i = 0; i < n_subj; ++i) header.push_back("subj." + std::to_string(i));
  for (std::size_t i = 0; i < n_proxy; ++i) {
    header.push_back(i < dataset.proxy_names.size() ? dataset.proxy_names[i]
                                                    : "proxy." + std::to_string(i));
  }
  header.emplace_back("true_metric");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestionError("cannot write '" + path + "'");
  out << "# schema=" << kSamplesSchema << '\n';
  write_csv_row(out, header);
  auto emit = [&](const char* split, const EvaluationSample& s) {
    if (s.condition.size() != n_cond || s.subject.width() != n_subj || s.proxies.size() != n_proxy) {
      throw InputError("evaluation samples do not share one feature layout");
    }
    std::vector<std::string> row = {split, std::to_string(s.subject.type_id)};
    for (double v : s.condition) row.push_back(format_double(v));
    for (double v : s.subject.values) row.push_back(format_double(v));
    for (double v : s.proxies) row.push_back(format_double(v));
    row.push_back(format_double(s.true_metric));
    write_csv_row(out, row);
  };
  for (const auto& s : dataset.train) emit("train", s);
  for (const auto& s : dataset.test) emit("test", s);

  nlohmann::json sidecar = {{"schema", kSamplesSchema},
                            {"metric", dataset.metric},
                            {"condition_names", dataset.condition_names},
                            {"proxy_names", dataset.proxy_names},
                            {"n_train", dataset.train.size()},
                            {"n_test", dataset.test.size()},
                            {"provenance", dataset.provenance}};
  std::ofstream meta(path + ".json", std::ios::binary);
  if (!meta) throw IngestionError("cannot write '" + path + ".json'");
  meta << sidecar.dump(2) << '\n';
}

EvalDataset read_eval_dataset(const std::string& path) {
  EvalDataset ds;
  {
    std::ifstream meta(path + ".json");
    if (!meta) throw IngestionError("missing sidecar '" + path + ".json'");
    nlohmann::json j;
    try {
      meta >> j;
    } catch (const nlohmann::json::exception& e) {
      throw IngestionError(std::string("sidecar: ") + e.what());
    }
    if (j.value("schema", std::string{}) != kSamplesSchema) {
      throw IngestionError("sidecar: unsupported schema");
    }
    ds.metric = j.value("metric", std::string{});
    ds.condition_names = j.value("condition_names", std::vector<std::string>{});
    ds.proxy_names = j.value("proxy_names", std::vector<std::string>{});
    ds.provenance = j.value("provenance", nlohmann::json::object());
  }
  const auto table = read_csv_file(path);
  if (table.empty()) throw IngestionError("'" + path + "' has no header");
  const auto& header = table.front();
  std::size_t n_cond = 0, n_subj = 0;
  for (const auto& h : header) {
    if (h.rfind("cond.", 0) == 0) ++n_cond;
    if (h.rfind("subj.", 0) == 0) ++n_subj;
  }
  if (header.size() < 3 + n_cond + n_subj || header.back() != "true_metric") {
    throw IngestionError("'" + path + "' is not an evaluation-sample table");
  }
  const std::size_t n_proxy = header.size() - 3 - n_cond - n_subj;
  for (std::size_t r = 1; r < table.size(); ++r) {
    const auto& row = table[r];
    const std::size_t line = r + 2;
    if (row.size() != header.size()) {
      throw IngestionError("line " + std::to_string(line) + " has the wrong field count");
    }
    EvaluationSample s;
    std::size_t c = 1;
    s.subject.type_id = static_cast<int>(parse_cell(row[c], line, header[c]));
    ++c;
    for (std::size_t i = 0; i < n_cond; ++i, ++c) s.condition.push_back(parse_cell(row[c], line, header[c]));
    for (std::size_t i = 0; i < n_subj; ++i, ++c) s.subject.values.push_back(parse_cell(row[c], line, header[c]));
    for (std::size_t i = 0; i < n_proxy; ++i, ++c) s.proxies.push_back(parse_cell(row[c], line, header[c]));
    s.true_metric = parse_cell(row[c], line, header[c]);
    if (row[0] == "train") {
      ds.train.push_back(std::move(s));
    } else if (row[0] == "test") {
      ds.test.push_back(std::move(s));
    } else {
      throw IngestionError("unknown split '" + row[0] + "' on line " + std::to_string(line));
    }
  }
  return ds;
}

}  // namespace evalmodel
