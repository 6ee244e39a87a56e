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

#include "evalmodel/market.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>

#include "evalmodel/csv.hpp"
#include "evalmodel/errors.hpp"
#include "evalmodel/random.hpp"

namespace evalmodel {
namespace {

constexpr double kLimitTolerance = 1e-9;

// Price at which `q` of the weight lies at or below, over (price, weight)
// pairs sorted by price.
double weighted_quantile(const std::vector<std::pair<double, double>>& sorted, double total,
                         double q) {
  double cum = 0.0;
  for (const auto& [price, w] : sorted) {
    cum += w;
    if (cum >= q * total) return price;
  }
  return sorted.back().first;
}

// Fills the cost-distribution features and amplitude from the OHLC, volume
// and amount columns. Day d only looks at days <= d.
void derive_features(Matrix& m, double initial_close, std::size_t window) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t d = 0; d < m.rows(); ++d) {
    const std::size_t lo = d + 1 >= window ? d + 1 - window : 0;
    pts.clear();
    double total = 0.0;
    double value = 0.0;
    for (std::size_t k = lo; k <= d; ++k) {
      const double typical = (m(k, kHigh) + m(k, kLow) + m(k, kClose)) / 3.0;
      const double w = m(k, kVolume);
      pts.emplace_back(typical, w);
      total += w;
      value += typical * w;
    }
    std::sort(pts.begin(), pts.end());
    const double close = m(d, kClose);
    double below = 0.0;
    for (const auto& [price, w] : pts) {
      if (price <= close) below += w;
    }
    m(d, kProfitRatio) = total > 0.0 ? below / total : 0.5;
    m(d, kAvgCost) = total > 0.0 ? value / total : close;
    if (total > 0.0) {
      m(d, kCost90Low) = weighted_quantile(pts, total, 0.05);
      m(d, kCost90High) = weighted_quantile(pts, total, 0.95);
      m(d, kCost70Low) = weighted_quantile(pts, total, 0.15);
      m(d, kCost70High) = weighted_quantile(pts, total, 0.85);
    } else {
      m(d, kCost90Low) = m(d, kCost90High) = m(d, kCost70Low) = m(d, kCost70High) = close;
    }
    m(d, kCost90Mid) = 0.5 * (m(d, kCost90Low) + m(d, kCost90High));
    m(d, kCost70Mid) = 0.5 * (m(d, kCost70Low) + m(d, kCost70High));
    const double prev = d == 0 ? initial_close : m(d - 1, kClose);
    m(d, kAmplitude) = (m(d, kHigh) - m(d, kLow)) / prev;
  }
}

using ViewFn = std::function<std::span<const double>(std::size_t stock, std::size_t day)>;

SlotResult simulate(const AgentSpec& agent, const SubjectVector& subject, std::size_t stock,
                    std::size_t start_day, const MarketData& market, const FloatModel& fm,
                    std::size_t slot_len, const ViewFn& view) {
  if (agent.task_kind != TaskKind::kTernaryDecision || agent.output_dim != 3) {
    throw InputError("trading agents must be ternary-decision agents");
  }
  if (agent.input_dim != kMarketFeatureCount) {
    throw InputError("trading agents take the 15 market features");
  }
  if (stock >= market.n_stocks) throw InputError("stock index out of range");
  if (slot_len < 2 || start_day < 1 || start_day + slot_len > market.n_days) {
    throw InputError("slot [" + std::to_string(start_day) + ", " +
                     std::to_string(start_day + slot_len) + ") does not fit a " +
                     std::to_string(market.n_days) + "-day market with one day of history");
  }
  SlotResult out;
  double cash = 0.0;
  double position = 0.0;
  const std::size_t last = start_day + slot_len - 1;
  for (std::size_t d = start_day; d < last; ++d) {
    const auto v = view(stock, d - 1);
    const double price = market.row(stock, d)[kOpen] * (1.0 + float_rate(fm, subject, v));
    Trade trade{d, static_cast<TradeAction>(decide(agent, v)), true, price};
    if (trade.action == TradeAction::kSell && position <= 0.0) trade.action = TradeAction::kHold;
    if (trade.action == TradeAction::kBuy) {
      if (market.limit_up(stock, d)) {
        trade.executed = false;
        ++out.forced_holds;
      } else {
        cash -= kLotShares * price;
        out.buy_outlay += kLotShares * price;
        position += kLotShares;
        out.capital_committed = std::max(out.capital_committed, -cash);
      }
    } else if (trade.action == TradeAction::kSell) {
      if (market.limit_down(stock, d)) {
        trade.executed = false;
        ++out.forced_holds;
      } else {
        cash += kLotShares * price;
        out.sell_proceeds += kLotShares * price;
        position -= kLotShares;
      }
    }
    out.trades.push_back(trade);
  }
  const double open = market.row(stock, last)[kOpen] *
                      (1.0 + float_rate(fm, subject, view(stock, last - 1)));
  out.end_liquidation_price = market.limit_down(stock, last) ? 0.9 * open : open;
  cash += position * out.end_liquidation_price;
  out.final_cash = cash;
  out.roi = out.capital_committed > 0.0 ? cash / out.capital_committed : 0.0;
  return out;
}

void check_range(const DayRange& r, const char* name, std::size_t slot_len, std::size_t n_days) {
  if (r.first > r.last || r.last - r.first + 1 < slot_len) {
    throw ConfigError(std::string(name) + " range cannot hold a slot");
  }
  if (r.first < slot_len + 1) {
    throw ConfigError(std::string(name) + " range starts before the proxy window history");
  }
  if (r.last >= n_days) throw ConfigError(std::string(name) + " range exceeds the market");
}

}  // namespace

const std::array<const char*, kMarketFeatureCount>& market_feature_names() {
  static const std::array<const char*, kMarketFeatureCount> names = {
      "profit_ratio", "avg_cost", "cost90_low", "cost90_high", "cost90_mid",
      "cost70_low",   "cost70_high", "cost70_mid", "close",    "open",
      "high",         "low",         "volume",     "amount",   "amplitude"};
  return names;
}

void MarketConfig::validate() const {
  if (n_stocks == 0) throw ConfigError("n_stocks must be positive");
  if (n_days < 30) throw ConfigError("n_days must be at least 30");
  if (!(volatility > 0.0)) throw ConfigError("volatility must be positive");
  if (!(vol_persistence >= 0.0 && vol_persistence < 1.0)) {
    throw ConfigError("vol_persistence must lie in [0, 1)");
  }
  if (!(vol_of_vol >= 0.0)) throw ConfigError("vol_of_vol must be >= 0");
  if (!(reversion_speed > 0.0 && reversion_speed <= 1.0)) {
    throw ConfigError("reversion_speed must lie in (0, 1]");
  }
  if (!(transient_share >= 0.0 && transient_share < 1.0)) {
    throw ConfigError("transient_share must lie in [0, 1)");
  }
  if (!(gap_fraction >= 0.0)) throw ConfigError("gap_fraction must be >= 0");
  if (!(jump_probability >= 0.0 && jump_probability <= 1.0)) {
    throw ConfigError("jump_probability must lie in [0, 1]");
  }
  if (!(jump_std >= 0.0)) throw ConfigError("jump_std must be >= 0");
  if (!(limit_band > 0.0 && limit_band < 1.0)) throw ConfigError("limit_band must lie in (0, 1)");
  if (cost_window == 0) throw ConfigError("cost_window must be positive");
}

nlohmann::json to_json(const MarketConfig& cfg) {
  return {{"schema", "evalmodel.market_config/1"},
          {"n_stocks", cfg.n_stocks},
          {"n_days", cfg.n_days},
          {"volatility", cfg.volatility},
          {"vol_persistence", cfg.vol_persistence},
          {"vol_of_vol", cfg.vol_of_vol},
          {"reversion_speed", cfg.reversion_speed},
          {"transient_share", cfg.transient_share},
          {"gap_fraction", cfg.gap_fraction},
          {"jump_probability", cfg.jump_probability},
          {"jump_std", cfg.jump_std},
          {"limit_band", cfg.limit_band},
          {"cost_window", cfg.cost_window},
          {"seed", cfg.seed}};
}

MarketConfig market_config_from_json(const nlohmann::json& j) {
  MarketConfig cfg;
  try {
    cfg.n_stocks = j.value("n_stocks", cfg.n_stocks);
    cfg.n_days = j.value("n_days", cfg.n_days);
    cfg.volatility = j.value("volatility", cfg.volatility);
    cfg.vol_persistence = j.value("vol_persistence", cfg.vol_persistence);
    cfg.vol_of_vol = j.value("vol_of_vol", cfg.vol_of_vol);
    cfg.reversion_speed = j.value("reversion_speed", cfg.reversion_speed);
    cfg.transient_share = j.value("transient_share", cfg.transient_share);
    cfg.gap_fraction = j.value("gap_fraction", cfg.gap_fraction);
    cfg.jump_probability = j.value("jump_probability", cfg.jump_probability);
    cfg.jump_std = j.value("jump_std", cfg.jump_std);
    cfg.limit_band = j.value("limit_band", cfg.limit_band);
    cfg.cost_window = j.value("cost_window", cfg.cost_window);
    cfg.seed = j.value("seed", cfg.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("market config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

double MarketData::prev_close(std::size_t stock, std::size_t day) const {
  return day == 0 ? initial_close[stock] : stocks[stock](day - 1, kClose);
}

bool MarketData::limit_up(std::size_t stock, std::size_t day) const {
  return stocks[stock](day, kOpen) >=
         prev_close(stock, day) * (1.0 + limit_band) * (1.0 - kLimitTolerance);
}

bool MarketData::limit_down(std::size_t stock, std::size_t day) const {
  return stocks[stock](day, kOpen) <=
         prev_close(stock, day) * (1.0 - limit_band) * (1.0 + kLimitTolerance);
}

void MarketData::validate() const {
  if (stocks.size() != n_stocks || initial_close.size() != n_stocks) {
    throw InputError("market stock count mismatch");
  }
  for (std::size_t s = 0; s < n_stocks; ++s) {
    if (stocks[s].rows() != n_days || stocks[s].cols() != kMarketFeatureCount) {
      throw InputError("market stock " + std::to_string(s) + " has the wrong shape");
    }
    for (std::size_t d = 0; d < n_days; ++d) {
      const auto r = row(s, d);
      for (double v : r) {
        if (!std::isfinite(v)) {
          throw InputError("non-finite market value at stock " + std::to_string(s) + ", day " +
                           std::to_string(d));
        }
      }
      const double lo = r[kLow], hi = r[kHigh];
      if (!(lo > 0.0) || lo > r[kOpen] || lo > r[kClose] || r[kOpen] > hi || r[kClose] > hi) {
        throw InputError("OHLC inconsistency at stock " + std::to_string(s) + ", day " +
                         std::to_string(d));
      }
    }
  }
}

MarketData generate_market(const MarketConfig& cfg) {
  cfg.validate();
  MarketData market;
  market.n_stocks = cfg.n_stocks;
  market.n_days = cfg.n_days;
  market.limit_band = cfg.limit_band;
  const double band = cfg.limit_band;
  const double phi = cfg.vol_persistence;
  const double var_h = cfg.vol_of_vol * cfg.vol_of_vol / (1.0 - phi * phi);
  const double keep = 1.0 - cfg.reversion_speed;
  // Var(u_t - u_{t-1}) = 2 Var(u) (1 - keep) carries transient_share of vol^2.
  const double var_total = cfg.volatility * cfg.volatility;
  const double var_u = cfg.transient_share * var_total / (2.0 * cfg.reversion_speed);
  const double sd_u = std::sqrt(var_u);
  const double innovation_u = std::sqrt(var_u * (1.0 - keep * keep));
  const double walk_vol = std::sqrt((1.0 - cfg.transient_share) * var_total);
  for (std::size_t s = 0; s < cfg.n_stocks; ++s) {
    RandomStream rng(derive_seed(cfg.seed, s));
    const double p0 = std::exp(std::log(20.0) + 0.5 * rng.normal());
    const double base_volume = std::exp(std::log(1e6) + 0.5 * rng.normal());
    double h = rng.normal(0.0, std::sqrt(var_h));
    double u = rng.normal(0.0, sd_u);
    double m = std::log(p0) - u;
    double prev = p0;
    Matrix rows(cfg.n_days, kMarketFeatureCount);
    for (std::size_t d = 0; d < cfg.n_days; ++d) {
      h = phi * h + cfg.vol_of_vol * rng.normal();
      const double sigma = walk_vol * std::exp(h - var_h);
      const double dm = sigma * rng.normal();
      u = keep * u + innovation_u * rng.normal();
      const double upper = prev * (1.0 + band);
      const double lower = prev * (1.0 - band);
      const double close = std::clamp(std::exp(m + dm + u), lower, upper);
      m = std::log(close) - u;
      double gap = cfg.gap_fraction * sigma * rng.normal();
      if (rng.bernoulli(cfg.jump_probability)) gap += cfg.jump_std * rng.normal();
      const double open = std::clamp(prev * std::exp(gap), lower, upper);
      const double high =
          std::min(upper, std::max(open, close) * std::exp(std::abs(0.5 * sigma * rng.normal())));
      const double low =
          std::max(lower, std::min(open, close) * std::exp(-std::abs(0.5 * sigma * rng.normal())));
      const double ret = std::log(close / prev);
      const double volume = base_volume * std::exp(0.3 * rng.normal() + 10.0 * std::abs(ret));
      rows(d, kOpen) = open;
      rows(d, kHigh) = std::max(high, std::max(open, close));
      rows(d, kLow) = std::min(low, std::min(open, close));
      rows(d, kClose) = close;
      rows(d, kVolume) = volume;
      rows(d, kAmount) = volume * (open + high + low + close) / 4.0;
      prev = close;
    }
    derive_features(rows, p0, cfg.cost_window);
    market.stocks.push_back(std::move(rows));
    market.initial_close.push_back(p0);
  }
  return market;
}

MarketData generate_market(std::size_t n_stocks, std::size_t n_days, std::uint64_t seed) {
  MarketConfig cfg;
  cfg.n_stocks = n_stocks;
  cfg.n_days = n_days;
  cfg.seed = seed;
  return generate_market(cfg);
}

MarketData scripted_market(const std::vector<std::vector<std::array<double, 4>>>& ohlc,
                           const std::vector<double>& initial_close, double limit_band,
                           std::size_t cost_window) {
  if (ohlc.empty() || ohlc.size() != initial_close.size()) {
    throw InputError("scripted market needs one initial close per stock");
  }
  MarketData market;
  market.n_stocks = ohlc.size();
  market.n_days = ohlc.front().size();
  market.limit_band = limit_band;
  market.initial_close = initial_close;
  for (const auto& days : ohlc) {
    if (days.size() != market.n_days) throw InputError("scripted stocks must share a length");
    Matrix rows(days.size(), kMarketFeatureCount);
    for (std::size_t d = 0; d < days.size(); ++d) {
      const auto& [o, h, l, c] = days[d];
      rows(d, kOpen) = o;
      rows(d, kHigh) = h;
      rows(d, kLow) = l;
      rows(d, kClose) = c;
      rows(d, kVolume) = 1e6;
      rows(d, kAmount) = 1e6 * (o + h + l + c) / 4.0;
    }
    derive_features(rows, market.initial_close[market.stocks.size()], cost_window);
    market.stocks.push_back(std::move(rows));
  }
  market.validate();
  return market;
}

void write_market_csv(const std::string& path, const MarketData& market) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << "# schema=" << kMarketSchema << "\n";
  std::vector<std::string> header{"stock", "day"};
  for (const char* n : market_feature_names()) header.emplace_back(n);
  header.emplace_back("prev_close");
  write_csv_row(out, header);
  for (std::size_t s = 0; s < market.n_stocks; ++s) {
    for (std::size_t d = 0; d < market.n_days; ++d) {
      std::vector<std::string> fields{std::to_string(s), std::to_string(d)};
      for (double v : market.row(s, d)) fields.push_back(format_double(v));
      fields.push_back(format_double(market.prev_close(s, d)));
      write_csv_row(out, fields);
    }
  }
}

MarketData read_market_csv(const std::string& path, double limit_band) {
  const auto table = read_csv_file(path);
  if (table.size() < 2 || table.front().size() != kMarketFeatureCount + 3) {
    throw IngestionError(path + ": not a market file");
  }
  MarketData market;
  market.limit_band = limit_band;
  std::size_t line = 1;
  try {
    for (std::size_t i = 1; i < table.size(); ++i) {
      line = i + 1;
      const auto& r = table[i];
      if (r.size() != kMarketFeatureCount + 3) throw IngestionError("wrong field count");
      const auto s = static_cast<std::size_t>(std::stoul(r[0]));
      const auto d = static_cast<std::size_t>(std::stoul(r[1]));
      if (s == market.stocks.size()) {
        market.stocks.emplace_back();
        market.initial_close.push_back(std::stod(r.back()));
      }
      if (s + 1 != market.stocks.size() || d != market.stocks.back().rows()) {
        throw IngestionError("rows must be ordered by stock, then day");
      }
      std::vector<double> values;
      for (std::size_t c = 0; c < kMarketFeatureCount; ++c) values.push_back(std::stod(r[c + 2]));
      market.stocks.back().push_row(values);
    }
  } catch (const std::logic_error& e) {
    throw IngestionError(path + ":" + std::to_string(line) + ": " + e.what());
  } catch (const IngestionError& e) {
    throw IngestionError(path + ":" + std::to_string(line) + ": " + e.what());
  }
  market.n_stocks = market.stocks.size();
  market.n_days = market.stocks.front().rows();
  market.validate();
  return market;
}

std::vector<double> agent_view(std::span<const double> row) {
  if (row.size() != kMarketFeatureCount) throw InputError("market rows have 15 features");
  std::vector<double> v(kMarketFeatureCount);
  const double close = row[kClose];
  v[kProfitRatio] = row[kProfitRatio] - 0.5;
  for (std::size_t f : {kAvgCost, kCost90Low, kCost90High, kCost90Mid, kCost70Low, kCost70High,
                        kCost70Mid, kOpen, kHigh, kLow}) {
    v[f] = 10.0 * std::log(row[f] / close);
  }
  v[kClose] = 10.0 * std::log(close / row[kOpen]);
  v[kVolume] = std::log10(row[kVolume]) - 6.0;
  v[kAmount] = std::log10(row[kAmount]) - 7.5;
  v[kAmplitude] = 10.0 * row[kAmplitude];
  return v;
}

FloatModel make_float_model(std::size_t subject_width, std::uint64_t seed, double scale) {
  const std::size_t width = subject_width + kMarketFeatureCount;
  RandomStream rng(derive_seed(seed, 0x464c4f4154));
  FloatModel fm;
  fm.weights.resize(width);
  const double sd = scale / std::sqrt(static_cast<double>(width));
  for (double& w : fm.weights) w = rng.normal(0.0, sd);
  fm.bias = rng.normal(0.0, sd);
  return fm;
}

FloatModel zero_float_model(std::size_t subject_width) {
  FloatModel fm;
  fm.weights.assign(subject_width + kMarketFeatureCount, 0.0);
  return fm;
}

double float_rate(const FloatModel& fm, const SubjectVector& subject,
                  std::span<const double> view) {
  if (subject.width() + view.size() != fm.weights.size()) {
    throw InputError("float model expects " + std::to_string(fm.weights.size()) +
                     " inputs, got " + std::to_string(subject.width() + view.size()));
  }
  double z = fm.bias;
  for (std::size_t i = 0; i < subject.width(); ++i) z += fm.weights[i] * subject.values[i];
  for (std::size_t i = 0; i < view.size(); ++i) z += fm.weights[subject.width() + i] * view[i];
  return FloatModel::kMaxRate * std::tanh(z);
}

const char* to_string(TradeAction action) {
  switch (action) {
    case TradeAction::kHold:
      return "hold";
    case TradeAction::kBuy:
      return "buy";
    case TradeAction::kSell:
      return "sell";
  }
  return "?";
}

SlotResult simulate_slot(const AgentSpec& agent, const SubjectVector& subject, std::size_t stock,
                         std::size_t start_day, const MarketData& market, const FloatModel& fm,
                         std::size_t slot_len) {
  std::vector<double> scratch;
  const ViewFn view = [&](std::size_t s, std::size_t d) {
    scratch = agent_view(market.row(s, d));
    return std::span<const double>(scratch);
  };
  return simulate(agent, subject, stock, start_day, market, fm, slot_len, view);
}

double last10_proxy(const AgentSpec& agent, const SubjectVector& subject, std::size_t stock,
                    std::size_t slot_start, const MarketData& market, const FloatModel& fm) {
  if (slot_start < 11) throw InputError("last10_proxy needs slot_start >= 11");
  return simulate_slot(agent, subject, stock, slot_start - 10, market, fm, 10).roi;
}

std::vector<std::size_t> condition_days(std::size_t slot_start, std::size_t slot_len) {
  if (slot_start < slot_len) throw InputError("slot has no full history window");
  std::vector<std::size_t> days(slot_len);
  std::iota(days.begin(), days.end(), slot_start - slot_len);
  return days;
}

EvalDataset build_conditional_dataset(const std::vector<AgentSpec>& train_agents,
                                      const std::vector<AgentSpec>& test_agents,
                                      const SpaceConfig& space, const MarketData& market,
                                      const FloatModel& fm, const TradeDatasetConfig& cfg) {
  if (train_agents.empty() || test_agents.empty()) {
    throw ConfigError("conditional dataset needs train and test agents");
  }
  if (cfg.slot_len < 2 || cfg.slots_per_pair == 0) throw ConfigError("invalid slot settings");
  check_range(cfg.train_days, "train", cfg.slot_len, market.n_days);
  check_range(cfg.test_days, "test", cfg.slot_len, market.n_days);
  if (cfg.test_days.first <= cfg.train_days.last) {
    throw ConfigError("test days must come strictly after train days");
  }
  for (const auto& a : test_agents) {
    if (std::find(train_agents.begin(), train_agents.end(), a) != train_agents.end()) {
      throw ConfigError("an agent appears in both the train and test sets");
    }
  }

  // Agent views of every stock-day, computed once.
  std::vector<std::vector<double>> views(market.n_stocks * market.n_days);
  for (std::size_t s = 0; s < market.n_stocks; ++s) {
    for (std::size_t d = 0; d < market.n_days; ++d) {
      views[s * market.n_days + d] = agent_view(market.row(s, d));
    }
  }
  const ViewFn view = [&](std::size_t s, std::size_t d) {
    return std::span<const double>(views[s * market.n_days + d]);
  };

  EvalDataset ds;
  ds.metric = "roi";
  ds.proxy_names = {"last10_roi"};
  for (std::size_t k = cfg.slot_len; k > 0; --k) {
    for (const char* f : market_feature_names()) {
      ds.condition_names.push_back("d-" + std::to_string(k) + "." + f);
    }
  }

  const auto fill = [&](const std::vector<AgentSpec>& agents, const DayRange& range,
                        std::uint64_t split, std::vector<EvaluationSample>& out) {
    const std::size_t span = range.last + 1 - cfg.slot_len - range.first + 1;
    for (std::size_t a = 0; a < agents.size(); ++a) {
      const SubjectVector subject = vectorize(agents[a], space);
      for (std::size_t s = 0; s < market.n_stocks; ++s) {
        RandomStream rng(
            derive_seed(cfg.seed, (split * agents.size() + a) * market.n_stocks + s));
        for (std::size_t k = 0; k < cfg.slots_per_pair; ++k) {
          const std::size_t start = range.first + static_cast<std::size_t>(rng.uniform_int(0, span - 1));
          EvaluationSample sample;
          sample.subject = subject;
          sample.condition.reserve(cfg.slot_len * kMarketFeatureCount);
          for (std::size_t d : condition_days(start, cfg.slot_len)) {
            const auto v = view(s, d);
            sample.condition.insert(sample.condition.end(), v.begin(), v.end());
          }
          sample.proxies = {simulate(agents[a], subject, s, start - 10, market, fm, 10, view).roi};
          sample.true_metric =
              simulate(agents[a], subject, s, start, market, fm, cfg.slot_len, view).roi;
          out.push_back(std::move(sample));
        }
      }
    }
  };
  fill(train_agents, cfg.train_days, 0, ds.train);
  fill(test_agents, cfg.test_days, 1, ds.test);

  ds.provenance = {{"schema", kSamplesSchema},
                   {"scene", "trade"},
                   {"seed", cfg.seed},
                   {"slot_len", cfg.slot_len},
                   {"slots_per_pair", cfg.slots_per_pair},
                   {"train_days", {cfg.train_days.first, cfg.train_days.last}},
                   {"test_days", {cfg.test_days.first, cfg.test_days.last}},
                   {"n_stocks", market.n_stocks},
                   {"n_days", market.n_days},
                   {"space", to_json(space)},
                   {"iris_sampled", true}};
  return ds;
}

}  // namespace evalmodel
