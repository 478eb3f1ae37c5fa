#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "finflow/common/rng.hpp"
#include "finflow/market/hawkes.hpp"
#include "finflow/market/scenario.hpp"

namespace finflow::market {

inline constexpr int kStateDim = 5;

struct MarketState {
  double time = 0.0;
  double cash = 0.0;
  int inventory = 0;
  double mid_price = 0.0;
  double prev_spread = 0.0;  // ask - bid quoted on the previous step

  double wealth() const { return cash + inventory * mid_price; }
  std::array<double, kStateDim> as_array() const {
    return {time, cash, static_cast<double>(inventory), mid_price, prev_spread};
  }
};

/// Quote distances from mid. +infinity means "no quote on this side".
struct QuoteAction {
  double delta_bid = 0.0;
  double delta_ask = 0.0;
};

struct StepOutcome {
  MarketState next_state;
  double reward = 0.0;
  bool done = false;
  bool bid_filled = false;
  bool ask_filled = false;
  double intensity_buy = 0.0;   // undamped Hawkes intensities at decision time
  double intensity_sell = 0.0;
};

/// Market-making MDP over a pre-simulated jump-diffusion path with
/// Hawkes-driven, spread-damped Bernoulli fills. Cheap to copy; every
/// episode's randomness is a pure function of the reset seed.
class MarketEnv {
 public:
  explicit MarketEnv(ScenarioConfig config);

  MarketState reset(std::uint64_t seed);
  /// Throws std::logic_error after the episode is done and
  /// std::invalid_argument for NaN or negative spreads.
  StepOutcome step(const QuoteAction& action);

  bool done() const { return step_index_ >= n_steps_; }
  int step_index() const { return step_index_; }
  const MarketState& state() const { return state_; }
  const ScenarioConfig& config() const { return config_; }
  const std::vector<double>& price_path() const { return path_; }
  const HawkesState& hawkes() const { return hawkes_; }

  /// Keep explicit event-time lists alongside the recursive state (oracle mode).
  void set_record_events(bool on) { record_events_ = on; }
  const HawkesEventLog& event_log() const { return events_; }

 private:
  ScenarioConfig config_;
  int n_steps_ = 0;
  Rng fill_rng_;
  std::vector<double> path_;
  MarketState state_;
  HawkesState hawkes_;
  HawkesEventLog events_;
  bool record_events_ = false;
  int step_index_ = 0;
  bool started_ = false;
};

/// One row of an exported episode trace.
struct TraceRow {
  int step = 0;
  double t = 0.0;
  double mid_price = 0.0;
  int inventory = 0;
  double cash = 0.0;
  double delta_bid = 0.0;
  double delta_ask = 0.0;
  bool bid_fill = false;
  bool ask_fill = false;
  double reward = 0.0;
};

/// CSV with header step,t,S,q,X,delta_bid,delta_ask,bid_fill,ask_fill,reward.
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows);

}  // namespace finflow::market
