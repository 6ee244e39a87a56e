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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails. Pass criterion keys as arguments to run
// a subset, e.g. `evalmodel_acceptance bounds shapley`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "evalmodel/assumption_tests.hpp"
#include "evalmodel/attribution.hpp"
#include "evalmodel/bounds.hpp"
#include "evalmodel/errors.hpp"
#include "evalmodel/eval_model.hpp"
#include "evalmodel/evaluation_sample.hpp"
#include "evalmodel/harness.hpp"
#include "evalmodel/metrics.hpp"
#include "evalmodel/random.hpp"
#include "evalmodel/special_functions.hpp"

namespace evalmodel {
namespace {

namespace fs = std::filesystem;
using Big = boost::multiprecision::cpp_bin_float_50;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

ExperimentConfig load_config(const std::string& file, const ExperimentConfig& base) {
  std::ifstream in(fs::path(EVALMODEL_CONFIG_DIR) / file);
  if (!in) throw ConfigError("missing config " + file);
  return experiment_config_from_json(nlohmann::json::parse(in), base);
}

fs::path scratch(const std::string& tag) {
  const auto dir = fs::temp_directory_path() / ("evalmodel_acceptance_" + tag);
  fs::remove_all(dir);
  return dir;
}

// ------------------------------------------------------------ bound tables

// Cells as printed, rows n = 10^1 (plus 20, 30) ... 10^9.
const std::vector<std::uint64_t> kTableNs = {10, 20, 30, 100, 1000, 10000, 100000, 1000000,
                                             10000000, 100000000, 1000000000};
const std::vector<double> kTableSigmas = {0.5, 0.05, 0.01, 0.001};

const std::vector<std::vector<std::string>> kPrintedGeneralization = {
    {"0.186", "0.387", "0.480", "0.588"},
    {"0.132", "0.274", "0.339", "0.416"},
    {"0.107", "0.223", "0.277", "0.339"},
    {"0.059", "0.122", "0.152", "0.186"},
    {"0.0186", "0.0387", "0.0480", "0.0588"},
    {"0.00589", "0.0122", "0.0151", "0.0186"},
    {"0.00186", "0.00387", "0.00480", "0.00588"},
    {"0.000589", "0.00122", "0.00152", "0.00186"},
    {"0.000186", "0.000387", "0.000480", "0.000588"},
    {"0.0000589", "0.000122", "0.000152", "0.000186"},
    {"0.0000186", "0.0000387", "0.0000480", "0.0000588"}};

const std::vector<std::vector<std::string>> kPrintedCausal = {
    {"0.372", "0.774", "0.960", "1.18"},
    {"0.263", "0.547", "0.678", "0.831"},
    {"0.215", "0.447", "0.554", "0.679"},
    {"0.118", "0.245", "0.303", "0.372"},
    {"0.0372", "0.0774", "0.0960", "0.118"},
    {"0.0118", "0.0245", "0.0303", "0.0372"},
    {"0.00372", "0.00774", "0.00960", "0.0118"},
    {"0.00118", "0.00245", "0.00303", "0.00372"},
    {"0.000372", "0.000774", "0.000960", "0.00118"},
    {"0.000118", "0.000245", "0.000303", "0.000372"},
    {"0.0000372", "0.0000774", "0.0000960", "0.000118"}};

// Value of one unit in the last printed decimal place.
double last_place(const std::string& printed) {
  const auto dot = printed.find('.');
  const auto decimals = dot == std::string::npos ? 0 : printed.size() - dot - 1;
  return std::pow(10.0, -static_cast<double>(decimals));
}

// Cell text after the "E+" / "2E+" prefix, by row and column.
std::vector<std::vector<std::string>> parse_table(const std::string& csv, const std::string& prefix) {
  std::vector<std::vector<std::string>> out;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    const auto end = csv.find('\n', pos);
    const std::string line = csv.substr(pos, end - pos);
    pos = end == std::string::npos ? csv.size() : end + 1;
    if (line.empty() || line[0] == '#' || line.rfind("Samples", 0) == 0) continue;
    std::vector<std::string> cells;
    std::size_t c = line.find(',');
    while (c != std::string::npos) {
      const auto next = line.find(',', c + 1);
      std::string cell = line.substr(c + 1, next == std::string::npos ? std::string::npos : next - c - 1);
      if (cell.rfind(prefix, 0) == 0) cell = cell.substr(prefix.size());
      cells.push_back(cell);
      c = next;
    }
    out.push_back(cells);
  }
  return out;
}

Outcome check_bound_tables() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto tables = emit_bound_table(kTableSigmas, kTableNs);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto gen = parse_table(tables.generalization_csv, "E+");
  const auto cau = parse_table(tables.causal_csv, "2E+");

  int cells = 0, within = 0, identical = 0;
  std::string misses;
  const auto compare = [&](const std::vector<std::vector<std::string>>& printed,
                           const std::vector<std::vector<std::string>>& emitted, double factor,
                           const char* label) {
    for (std::size_t r = 0; r < printed.size(); ++r) {
      for (std::size_t c = 0; c < printed[r].size(); ++c) {
        ++cells;
        const double exact = factor * std::sqrt(std::log(1.0 / kTableSigmas[c]) /
                                                (2.0 * static_cast<double>(kTableNs[r])));
        const double want = std::stod(printed[r][c]);
        const double unit = last_place(printed[r][c]);
        const std::string got = r < emitted.size() && c < emitted[r].size() ? emitted[r][c] : "";
        const bool ok = !got.empty() && std::abs(exact - want) < unit &&
                        std::abs(std::stod(got) - want) <= unit * (1.0 + 1e-9);
        within += ok ? 1 : 0;
        identical += got == printed[r][c] ? 1 : 0;
        if (got != printed[r][c]) {
          misses += std::string(" ") + label + "(" + std::to_string(kTableNs[r]) + "," +
                    fmt("%g", kTableSigmas[c]) + ")=" + got + " vs " + printed[r][c];
        }
      }
    }
  };
  compare(kPrintedGeneralization, gen, 1.0, "gen");
  compare(kPrintedCausal, cau, 2.0, "causal");
  Outcome o;
  o.pass = within == cells && secs < 1.0;
  o.detail = std::to_string(within) + "/" + std::to_string(cells) +
             " cells within one unit of the printed last place, " + std::to_string(identical) +
             " textually identical;" + misses + "; " + fmt("%.3f s", secs);
  return o;
}

// ------------------------------------------------------- Hoeffding coverage

Outcome check_hoeffding() {
  const auto t0 = std::chrono::steady_clock::now();
  constexpr int kTrials = 2000;
  bool pass = true;
  std::string detail;
  std::uint64_t key = 0;
  for (double p : {0.1, 0.5}) {
    for (std::size_t n : {30, 100}) {
      for (double sigma : {0.05, 0.5}) {
        RandomStream rng(derive_seed(77, key++));
        int violations = 0;
        for (int t = 0; t < kTrials; ++t) {
          std::vector<double> losses(n);
          for (auto& l : losses) l = rng.bernoulli(p) ? 1.0 : 0.0;
          const auto b = generalization_bound(ErrorMeasurements(std::move(losses)), sigma);
          violations += p > b.bound ? 1 : 0;
        }
        const double rate = static_cast<double>(violations) / kTrials;
        const double limit = sigma + 2.0 * std::sqrt(sigma * (1.0 - sigma) / kTrials);
        pass = pass && rate <= limit;
        detail += " p=" + fmt("%g", p) + ",n=" + std::to_string(n) + ",s=" + fmt("%g", sigma) +
                  ":" + fmt("%.4f", rate) + "<=" + fmt("%.4f", limit);
      }
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {pass && secs < 30.0, "violation rates" + detail + "; " + fmt("%.1f s", secs)};
}

// ------------------------------------------------------------ causal bounds

Outcome check_causal() {
  RandomStream rng(91);
  int doubled = 0, matched = 0;
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto draw = [&] {
      std::vector<double> v(1 + rng.uniform_int(0, 500));
      for (auto& x : v) x = rng.uniform();
      return v;
    };
    const auto la = draw();
    const auto lb = draw();
    const double sigma = 0.001 + 0.998 * rng.uniform();
    const ErrorMeasurements a(la), b(lb);
    doubled += causal_bound_nonpositivity(a, sigma).bound ==
                       2.0 * generalization_bound(a, sigma).bound
                   ? 1
                   : 0;
    const auto arm = [&](const std::vector<double>& l) {
      long double s = 0.0L;
      for (double x : l) s += x;
      const long double n = static_cast<long double>(l.size());
      return s / n + std::sqrt(std::log(2.0L / sigma) / (2.0L * n));
    };
    const double oracle = static_cast<double>(2.0L * std::max(arm(la), arm(lb)));
    const double err = std::abs(causal_bound_positivity(a, b, sigma).bound - oracle);
    worst = std::max(worst, err);
    matched += err <= 1e-9 ? 1 : 0;
  }
  return {doubled == 100 && matched == 100,
          "non-positivity exactly 2x generalization in " + std::to_string(doubled) +
              "/100; positivity within 1e-9 of the oracle in " + std::to_string(matched) +
              "/100 (max error " + fmt("%.2e", worst) + ")"};
}

// -------------------------------------------------------- test calibration

double big_normal_two_sided(double z) {
  return static_cast<double>(boost::math::erfc(Big(std::abs(z)) / boost::multiprecision::sqrt(Big(2))));
}
double big_student_t_two_sided(double t, double df) {
  return static_cast<double>(boost::math::ibeta(Big(df) / 2, Big(0.5), Big(df) / (Big(df) + Big(t) * Big(t))));
}
double big_chi_square_upper(double x, double df) {
  return static_cast<double>(boost::math::gamma_q(Big(df) / 2, Big(x) / 2));
}
double big_kolmogorov(double lambda) {
  Big sum = 0;
  for (int j = 1; j <= 400; ++j) {
    const Big term = boost::multiprecision::exp(Big(-2) * j * j * Big(lambda) * Big(lambda));
    sum += (j % 2 == 1 ? term : -term);
  }
  return static_cast<double>(2 * sum);
}

// Worst absolute difference against the high-precision oracle, 200 points
// per distribution.
double special_function_error() {
  double worst = 0.0;
  const auto track = [&](double got, double want) { worst = std::max(worst, std::abs(got - want)); };
  for (int i = 0; i < 200; ++i) {
    const double z = 6.0 * i / 199.0;
    track(tail_probability(TailDistribution::std_normal(), z), big_normal_two_sided(z));
    const double lambda = 0.25 + 2.75 * i / 199.0;
    track(tail_probability(TailDistribution::ks_asymptotic(), lambda), big_kolmogorov(lambda));
  }
  for (double df : {1.0, 2.0, 5.0, 10.0, 30.0}) {
    for (int i = 0; i < 40; ++i) {
      const double t = 8.0 * i / 39.0;
      track(tail_probability(TailDistribution::student_t(df), t), big_student_t_two_sided(t, df));
      const double x = 0.05 + 40.0 * i / 39.0;
      track(tail_probability(TailDistribution::chi_square(df), x), big_chi_square_upper(x, df));
    }
  }
  return worst;
}

Outcome check_calibration() {
  constexpr int kTrials = 1000;
  std::map<std::string, int> rejected;
  for (int t = 0; t < kTrials; ++t) {
    RandomStream rng(derive_seed(505, static_cast<std::uint64_t>(t)));
    SubsetTestOptions opt;
    opt.seed = derive_seed(606, static_cast<std::uint64_t>(t));

    std::vector<double> clipped(5000);
    for (auto& x : clipped) x = std::clamp(rng.normal(0.2, 0.05), 0.0, 1.0);
    rejected["IID"] += iid_check(clipped, opt).rejected ? 1 : 0;

    std::vector<double> gauss(3000);
    for (auto& x : gauss) x = rng.normal();
    const auto id = id_check(gauss, opt);
    rejected["ID"] += id.rejected ? 1 : 0;
    rejected["ID sub-test"] += id.sub_results.front().p_value < opt.alpha ? 1 : 0;

    std::vector<double> resid(1000);
    for (auto& x : resid) x = rng.normal();
    rejected["Bias"] += bias_check(resid, opt.alpha).rejected ? 1 : 0;
    const auto gb = group_bias_check(resid, opt);
    rejected["GroupBias"] += gb.rejected ? 1 : 0;
    rejected["GroupBias sub-test"] += gb.sub_results.front().p_value < opt.alpha ? 1 : 0;
  }
  bool pass = true;
  std::string detail = "size at alpha=0.05:";
  for (const auto& [name, count] : rejected) {
    const double rate = static_cast<double>(count) / kTrials;
    const bool exact_t = name == "Bias" || name == "GroupBias sub-test";
    const double lo = exact_t ? 0.03 : 0.02;
    const double hi = exact_t ? 0.07 : 0.09;
    const bool ok = rate >= lo && rate <= hi;
    pass = pass && ok;
    detail += " " + name + "=" + fmt("%.3f", rate) + (ok ? "" : "(outside band)");
  }
  const double sf = special_function_error();
  pass = pass && sf <= 1e-6;
  detail += "; special functions max |error| " + fmt("%.2e", sf);
  return {pass, detail};
}

// ------------------------------------------------------------ metric oracles

Outcome check_metrics() {
  RandomStream rng(3);
  int auc_exact = 0, pr_ok = 0, conf_ok = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.uniform_int(0, 48);
    const bool coarse = rng.bernoulli(0.5);
    std::vector<double> s;
    std::vector<int> y;
    for (std::size_t i = 0; i < n; ++i) {
      s.push_back(coarse ? static_cast<double>(rng.uniform_int(0, 4)) / 4.0 : rng.uniform());
      y.push_back(rng.bernoulli(0.4) ? 1 : 0);
    }
    y[0] = 1;
    y[1] = 0;
    double wins = 0.0, pairs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (y[i] == 1 && y[j] == 0) {
          pairs += 1.0;
          wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
        }
      }
    }
    auc_exact += roc_auc(s, y) == wins / pairs ? 1 : 0;

    std::vector<double> th = s;
    std::sort(th.begin(), th.end(), std::greater<>());
    th.erase(std::unique(th.begin(), th.end()), th.end());
    const double pos = static_cast<double>(std::count(y.begin(), y.end(), 1));
    double ap = 0.0, prev = 0.0;
    for (double t : th) {
      double tp = 0.0, pred = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (s[i] >= t) {
          pred += 1.0;
          tp += y[i];
        }
      }
      ap += (tp / pos - prev) * (tp / pred);
      prev = tp / pos;
    }
    pr_ok += std::abs(pr_auc(s, y) - ap) <= 1e-12 ? 1 : 0;

    const double thr = rng.uniform();
    const auto c = confusion_at(s, y, thr);
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool p = s[i] >= thr;
      tp += p && y[i] == 1;
      fp += p && y[i] == 0;
      tn += !p && y[i] == 0;
      fn += !p && y[i] == 1;
    }
    conf_ok += c.tp == tp && c.fp == fp && c.tn == tn && c.fn == fn ? 1 : 0;
  }
  return {auc_exact == 200 && pr_ok == 200 && conf_ok == 200,
          "ROC-AUC exact " + std::to_string(auc_exact) + "/200, PR-AUC " +
              std::to_string(pr_ok) + "/200, confusion " + std::to_string(conf_ok) + "/200"};
}

// ------------------------------------------------------------------ Shapley

Outcome check_shapley() {
  RandomStream rng(17);
  int efficient = 0;
  for (int t = 0; t < 100; ++t) {
    CoalitionGame g{{"a", "b", "c"}, {}};
    for (std::uint32_t m = 0; m < 8; ++m) g.value_of[m] = rng.normal(0.0, 5.0);
    const auto phi = shapley_values(g);
    const double sum = phi.at("a") + phi.at("b") + phi.at("c");
    efficient += std::abs(sum - (g.value(7) - g.value(0))) <= 1e-12 ? 1 : 0;
  }
  // v(0)=0 v(a)=1 v(b)=2 v(c)=0 v(ab)=4 v(ac)=1 v(bc)=2 v(abc)=5, mask bit0=a.
  const CoalitionGame g{{"a", "b", "c"},
                        {{0, 0.0}, {1, 1.0}, {2, 2.0}, {3, 4.0}, {4, 0.0}, {5, 1.0}, {6, 2.0}, {7, 5.0}}};
  const auto phi = shapley_values(g);
  const bool stated = phi.at("a") == 1.5 && phi.at("b") == 3.0 && phi.at("c") == 0.5;
  // Independent brute force over the six orderings.
  std::vector<std::vector<int>> orders = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  std::vector<double> brute(3, 0.0);
  for (const auto& o : orders) {
    std::uint32_t mask = 0;
    for (int p : o) {
      brute[p] += (g.value(mask | (1u << p)) - g.value(mask)) / 6.0;
      mask |= 1u << p;
    }
  }
  const bool brute_ok = std::abs(phi.at("a") - brute[0]) < 1e-12 &&
                        std::abs(phi.at("b") - brute[1]) < 1e-12 &&
                        std::abs(phi.at("c") - brute[2]) < 1e-12;
  return {efficient == 100 && stated,
          "efficiency " + std::to_string(efficient) + "/100; stated game phi=(1.5, 3.0, 0.5) " +
              (stated ? "reproduced" : "not reproduced") + ", computed (" +
              fmt("%.6f", phi.at("a")) + ", " + fmt("%.6f", phi.at("b")) + ", " +
              fmt("%.6f", phi.at("c")) + "), ordering brute force " +
              (brute_ok ? "agrees" : "disagrees") + " (" + fmt("%.6f", brute[0]) + ", " +
              fmt("%.6f", brute[1]) + ", " + fmt("%.6f", brute[2]) + ")"};
}

// ------------------------------------------------------------------- scenes

struct SceneRun {
  ExperimentReport report;
  fs::path dir;
  double seconds = 0.0;
};

SceneRun run_config(const std::string& file, const ExperimentConfig& base, bool backtest,
                    const std::string& tag) {
  SceneRun out;
  auto cfg = load_config(file, base);
  out.dir = scratch(tag);
  cfg.output_dir = out.dir.string();
  const auto t0 = std::chrono::steady_clock::now();
  out.report = backtest ? run_backtest(cfg) : run_scene(cfg);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::string ratio_detail(const ExperimentReport& rep, const std::string& metric,
                         const std::string& learner, const std::string& baseline) {
  const auto& l = rep.row(metric, learner);
  const auto& b = rep.row(metric, baseline);
  return learner + " " + fmt("%.5f", l.summary.mean) + " vs " + baseline + " " +
         fmt("%.5f", b.summary.mean) + " (ratio " + fmt("%.3f", l.summary.mean / b.summary.mean) +
         ", " + std::to_string(l.rmse.size()) + " replicates)";
}

double ratio(const ExperimentReport& rep, const std::string& metric, const std::string& learner,
             const std::string& baseline) {
  return rep.row(metric, learner).summary.mean / rep.row(metric, baseline).summary.mean;
}

Outcome check_scenes() {
  const auto reg = run_config("scene_regression.json", default_scene_config(), false, "regression");
  const auto cls = run_config("scene_classification.json", default_scene_config(), false, "classification");
  const double r1 = ratio(reg.report, "rmse", "Het(Linear)", "holdout-100");
  const double r2 = ratio(cls.report, "roc_auc", "Het(GBT)", "holdout-100");
  const double secs = reg.seconds + cls.seconds;
  return {r1 <= 0.5 && r2 <= 0.75 && secs < 600.0,
          "regression " + ratio_detail(reg.report, "rmse", "Het(Linear)", "holdout-100") +
              (r1 <= 0.5 ? "" : " exceeds 0.5") + "; classification " +
              ratio_detail(cls.report, "roc_auc", "Het(GBT)", "holdout-100") +
              (r2 <= 0.75 ? "" : " exceeds 0.75") + "; " + fmt("%.1f s", secs)};
}

Outcome check_trade() {
  const auto run = run_config("backtest.json", default_backtest_config(), true, "trade");
  const double r = ratio(run.report, "roi", "HetEM(GBT)", "Baseline(Last10Days)");
  return {r <= 0.7 && run.seconds < 600.0,
          ratio_detail(run.report, "roi", "HetEM(GBT)", "Baseline(Last10Days)") +
              (r <= 0.7 ? "" : " exceeds 0.7") + "; also " +
              ratio_detail(run.report, "roi", "HetEM(Linear)", "Baseline(Last10Days)") + "; " +
              fmt("%.1f s", run.seconds)};
}

// ---------------------------------------------- effect-estimation property

double rmse_against(const std::vector<double>& pred, const std::vector<double>& truth) {
  double sq = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) sq += (pred[i] - truth[i]) * (pred[i] - truth[i]);
  return std::sqrt(sq / static_cast<double>(pred.size()));
}

Outcome check_effect_property() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto base = load_config("scene_regression.json", default_scene_config());
  const std::string metric = "rmse";
  int holds = 0, premised = 0, counted = 0;
  std::string failures;
  for (std::uint64_t r = 0; r < 20; ++r) {
    const std::uint64_t seed = derive_seed(4242, r);
    SyntheticSceneConfig sc = base.scene.synthetic;
    sc.seed = derive_seed(seed, 1);
    auto data = std::make_shared<const SceneDataset>(make_synthetic_scene(sc));
    const auto system = build_system(data, derive_seed(seed, 2));
    SpaceConfig space = base.space;
    space.input_dim = data->input_dim();
    space.output_dim = 1;
    space.task_kind = data->task_kind;
    space.seed = derive_seed(seed, 3);
    RandomStream stream(space.seed);
    std::vector<AgentSpec> agents;
    for (std::size_t i = 0; i < base.n_agents; ++i) agents.push_back(sample_agent(space, stream));
    ProxyConfig proxy = base.proxy;
    proxy.seed = derive_seed(seed, 4);
    const auto records = compute_scene_records(system, agents, space, proxy);
    auto [train, test] = split_samples(samples_for_metric(records.records, metric), base.train_frac,
                                       derive_seed(seed, 5));
    std::vector<double> truth;
    for (const auto& s : test) truth.push_back(s.true_metric);

    const auto columns = proxy_column_names(proxy, data->metric_kind());
    const auto holdout = static_cast<std::size_t>(
        std::find(columns.begin(), columns.end(), "holdout-100." + metric) - columns.begin());
    std::map<std::string, std::vector<double>> preds;
    for (const auto& s : test) preds["holdout-100"].push_back(s.proxies.at(holdout));
    for (std::size_t li = 0; li < base.learners.size(); ++li) {
      BaseLearnerConfig lc = base.learners[li];
      lc.seed = derive_seed(seed, 100 + li);
      MetaFitOptions opt;
      opt.clamp = MetricClamp::for_metric(metric);
      if (lc.kind == LearnerKind::kLinear && !base.ridge_grid.empty()) {
        lc.ridge_strength = select_ridge(train, lc, base.ridge_grid, base.grid_folds, derive_seed(seed, 6), opt);
      }
      const auto em = meta_fit(train, lc, opt);
      auto& p = preds[het_name(lc)];
      for (const auto& s : test) p.push_back(meta_predict(em, s));
    }
    const auto pairs = sample_pairs(test.size(), 500, derive_seed(seed, 7));
    bool ok = true;
    bool any = false;
    for (const auto& [a, pa] : preds) {
      for (const auto& [b, pb] : preds) {
        if (a == b) continue;
        if (!(rmse_against(pa, truth) <= 0.9 * rmse_against(pb, truth))) continue;
        any = true;
        ++premised;
        if (!(effect_rmse(pa, truth, pairs) < effect_rmse(pb, truth, pairs))) {
          ok = false;
          failures += " replicate " + std::to_string(r) + ": " + a + " vs " + b;
        }
      }
    }
    counted += any ? 1 : 0;
    holds += ok ? 1 : 0;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {holds >= 18,
          "implication holds in " + std::to_string(holds) + "/20 replicates (" +
              std::to_string(premised) + " premised pairs, " + std::to_string(counted) +
              " replicates with a premise)" + failures + "; " + fmt("%.1f s", secs)};
}

// -------------------------------------------------------------- determinism

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream in(e.path(), std::ios::binary);
    out[e.path().filename()] = {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }
  return out;
}

Outcome check_determinism() {
  const auto first = run_config("scene_classification.json", default_scene_config(), false, "det");
  const auto a = snapshot(first.dir);
  auto cfg = load_config("scene_classification.json", default_scene_config());
  cfg.output_dir = first.dir.string();
  cfg.jobs = 2;
  run_scene(cfg);
  const auto b = snapshot(first.dir);
  std::size_t same = 0;
  for (const auto& [name, bytes] : a) same += b.contains(name) && b.at(name) == bytes ? 1 : 0;
  const bool tables = emit_bound_table().generalization_csv == emit_bound_table().generalization_csv;
  return {same == a.size() && a.size() == b.size() && !a.empty() && tables,
          std::to_string(same) + "/" + std::to_string(a.size()) +
              " report files byte-identical across re-runs (second run with 2 workers); bound "
              "tables " + (tables ? "identical" : "differ")};
}

struct Criterion {
  const char* key;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace evalmodel

int main(int argc, char** argv) {
  using namespace evalmodel;
  const std::vector<Criterion> criteria = {
      {"bounds", "bound tables", check_bound_tables},
      {"hoeffding", "Hoeffding coverage", check_hoeffding},
      {"causal", "causal-bound structure", check_causal},
      {"calibration", "test calibration and special functions", check_calibration},
      {"metrics", "metric oracles", check_metrics},
      {"shapley", "Shapley axioms", check_shapley},
      {"scenes", "synthetic scenes vs holdout-100", check_scenes},
      {"trade", "trade scene vs Last10Days", check_trade},
      {"effect", "effect-estimation implication", check_effect_property},
      {"determinism", "determinism", check_determinism},
  };
  std::set<std::string> only(argv + 1, argv + argc);
  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.contains(c.key)) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", c.title, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
