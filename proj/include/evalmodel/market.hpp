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

// Synthetic daily stock market, agent-in-the-loop slot simulation and the
// conditional (stock history -> next-slot RoI) evaluation dataset.

#ifndef EVALMODEL_MARKET_HPP_
#define EVALMODEL_MARKET_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evalmodel/agent_space.hpp"
#include "evalmodel/evaluation_sample.hpp"
#include "evalmodel/matrix.hpp"

namespace evalmodel {

// Column order of a stock-day row.
enum MarketFeature : std::size_t {
  kProfitRatio = 0,
  kAvgCost,
  kCost90Low,
  kCost90High,
  kCost90Mid,
  kCost70Low,
  kCost70High,
  kCost70Mid,
  kClose,
  kOpen,
  kHigh,
  kLow,
  kVolume,
  kAmount,
  kAmplitude,
};

inline constexpr std::size_t kMarketFeatureCount = 15;
const std::array<const char*, kMarketFeatureCount>& market_feature_names();

struct MarketConfig {
  std::size_t n_stocks = 200;
  std::size_t n_days = 300;
  // Target std of daily close-to-close log returns.
  double volatility = 0.02;
  // Log-volatility AR(1) coefficient and innovation std.
  double vol_persistence = 0.95;
  double vol_of_vol = 0.2;
  // Log price = random walk + transient AR(1) component
  // u_t = (1 - reversion_speed) u_{t-1} + e_t. transient_share is the part of
  // the daily return variance due to u; 0 gives a pure random walk.
  double reversion_speed = 0.5;
  double transient_share = 0.0;
  // Overnight gap std as a fraction of the day's volatility, plus rare jumps.
  double gap_fraction = 0.4;
  double jump_probability = 0.01;
  double jump_std = 0.06;
  double limit_band = 0.10;
  // Trailing window (days) of the cost-distribution features.
  std::size_t cost_window = 60;
  std::uint64_t seed = 0;

  void validate() const;
};

nlohmann::json to_json(const MarketConfig& cfg);
MarketConfig market_config_from_json(const nlohmann::json& j);

struct MarketData {
  std::size_t n_stocks = 0;
  std::size_t n_days = 0;
  double limit_band = 0.10;
  // One n_days x 15 matrix per stock.
  std::vector<Matrix> stocks;
  // Close before day 0, per stock.
  std::vector<double> initial_close;

  std::span<const double> row(std::size_t stock, std::size_t day) const {
    return stocks[stock].row(day);
  }
  double prev_close(std::size_t stock, std::size_t day) const;
  // The open sits at the upper (lower) price limit of the prior close.
  bool limit_up(std::size_t stock, std::size_t day) const;
  bool limit_down(std::size_t stock, std::size_t day) const;
  // Throws InputError on OHLC inconsistency or non-positive prices.
  void validate() const;
};

MarketData generate_market(const MarketConfig& cfg);
MarketData generate_market(std::size_t n_stocks, std::size_t n_days, std::uint64_t seed);

// Builds a market from explicit (open, high, low, close) rows per stock;
// volume is constant and the remaining features are derived as in
// generate_market. Used for scripted scenarios.
MarketData scripted_market(const std::vector<std::vector<std::array<double, 4>>>& ohlc,
                           const std::vector<double>& initial_close, double limit_band = 0.10,
                           std::size_t cost_window = 60);

inline constexpr const char* kMarketSchema = "evalmodel.market/1";

// One row per stock-day: stock, day, then the 15 features in column order.
void write_market_csv(const std::string& path, const MarketData& market);
MarketData read_market_csv(const std::string& path, double limit_band = 0.10);

// Scale-free view of one stock-day row fed to agents and the float model:
// price fields as 10 * log(x / close) (close itself as 10 * log(close / open)),
// profit ratio centred at 0, log10 volume and amount shifted, amplitude x 10.
std::vector<double> agent_view(std::span<const double> row);

// Agent-dependent open-price float: 0.001 * tanh(w . [subject, view] + b).
struct FloatModel {
  std::vector<double> weights;
  double bias = 0.0;

  static constexpr double kMaxRate = 0.001;
};

// Random projection with N(0, scale^2 / width) weights.
FloatModel make_float_model(std::size_t subject_width, std::uint64_t seed, double scale = 1.0);
FloatModel zero_float_model(std::size_t subject_width);

// Throws InputError when subject.width() + view.size() != weights.size().
double float_rate(const FloatModel& fm, const SubjectVector& subject,
                  std::span<const double> view);

enum class TradeAction { kHold = 0, kBuy = 1, kSell = 2 };
const char* to_string(TradeAction action);

struct Trade {
  std::size_t day = 0;
  TradeAction action = TradeAction::kHold;
  bool executed = true;
  // Effective open of the day.
  double price = 0.0;
};

struct SlotResult {
  double roi = 0.0;
  std::vector<Trade> trades;
  std::size_t forced_holds = 0;
  double end_liquidation_price = 0.0;
  // Cash starts at 0; buys subtract, sells and the final liquidation add.
  double final_cash = 0.0;
  double buy_outlay = 0.0;
  double sell_proceeds = 0.0;
  // Peak cumulative cash outlay over the slot.
  double capital_committed = 0.0;
};

inline constexpr double kLotShares = 100.0;

// Decisions are taken at the opens of days [start_day, start_day + slot_len - 1)
// from the previous day's view; every holding is sold at the effective open
// of the last day (at 90% of it when that open is limit-down).
// roi = final_cash / capital_committed, or 0 when nothing was bought.
// Throws InputError when the slot does not fit in the market (start_day >= 1
// and start_day + slot_len <= n_days) or the agent is not a ternary agent.
SlotResult simulate_slot(const AgentSpec& agent, const SubjectVector& subject, std::size_t stock,
                         std::size_t start_day, const MarketData& market, const FloatModel& fm,
                         std::size_t slot_len = 10);

// RoI of the 10-day slot that ends right before slot_start.
double last10_proxy(const AgentSpec& agent, const SubjectVector& subject, std::size_t stock,
                    std::size_t slot_start, const MarketData& market, const FloatModel& fm);

// Inclusive range of days a target slot may occupy.
struct DayRange {
  std::size_t first = 0;
  std::size_t last = 0;
};

struct TradeDatasetConfig {
  DayRange train_days;
  DayRange test_days;
  std::size_t slot_len = 10;
  // Slot starts sampled per (agent, stock) pair.
  std::size_t slots_per_pair = 1;
  std::uint64_t seed = 0;
};

// Days whose rows feed the condition block of a slot starting at slot_start.
std::vector<std::size_t> condition_days(std::size_t slot_start, std::size_t slot_len = 10);

// Condition = the agent views of the slot_len days before the slot, flattened
// day-major (10 x 15 = 150 values); proxies = [last10_proxy]; target = RoI
// of the slot. Train samples use train_agents and train_days only, test
// samples test_agents and test_days. Throws ConfigError when the ranges
// overlap, the test range does not follow the train range, a range cannot
// hold a slot with its history, or an agent appears in both sets.
EvalDataset build_conditional_dataset(const std::vector<AgentSpec>& train_agents,
                                      const std::vector<AgentSpec>& test_agents,
                                      const SpaceConfig& space, const MarketData& market,
                                      const FloatModel& fm, const TradeDatasetConfig& cfg);

}  // namespace evalmodel

#endif  // EVALMODEL_MARKET_HPP_
