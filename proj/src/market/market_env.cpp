#include "finflow/market/market_env.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "finflow/common/keyed_config.hpp"
#include "finflow/market/price_path.hpp"

namespace finflow::market {
namespace {

double fill_probability(double intensity, double k, double delta, double dt) {
  if (std::isinf(delta)) return 0.0;
  const double damped = intensity * std::exp(-k * delta);
  return 1.0 - std::exp(-damped * dt);
}

}  // namespace

MarketEnv::MarketEnv(ScenarioConfig config) : config_(config) {
  config_.validate();
  n_steps_ = config_.steps();
}

MarketState MarketEnv::reset(std::uint64_t seed) {
  path_ = simulate_price_path(config_, derive_seed(seed, {stream::price_path}));
  fill_rng_.seed(derive_seed(seed, {stream::fills}));
  state_ = MarketState{0.0, config_.initial_cash, 0, path_[0], 0.0};
  hawkes_ = HawkesState{};
  events_ = HawkesEventLog{};
  step_index_ = 0;
  started_ = true;
  return state_;
}

StepOutcome MarketEnv::step(const QuoteAction& action) {
  if (!started_) throw std::logic_error("MarketEnv::step called before reset");
  if (done()) throw std::logic_error("MarketEnv::step called after episode end");
  if (std::isnan(action.delta_bid) || std::isnan(action.delta_ask) || action.delta_bid < 0.0 ||
      action.delta_ask < 0.0) {
    throw std::invalid_argument("MarketEnv::step: spreads must be >= 0 (got " + format_double(action.delta_bid) +
                                ", " + format_double(action.delta_ask) + ")");
  }
  const ScenarioConfig& c = config_;
  const double wealth_before = state_.wealth();

  StepOutcome out;
  out.intensity_buy = hawkes_intensity(Side::buy, hawkes_, c);
  out.intensity_sell = hawkes_intensity(Side::sell, hawkes_, c);
  const double p_bid = fill_probability(out.intensity_buy, c.spread_sensitivity, action.delta_bid, c.dt);
  const double p_ask = fill_probability(out.intensity_sell, c.spread_sensitivity, action.delta_ask, c.dt);
  const double u_bid = uniform01(fill_rng_);
  const double u_ask = uniform01(fill_rng_);

  MarketState next = state_;
  if (u_bid < p_bid && next.inventory + 1 <= c.inventory_cap) {
    next.inventory += 1;
    next.cash -= state_.mid_price - action.delta_bid;
    out.bid_filled = true;
  }
  if (u_ask < p_ask && next.inventory - 1 >= -c.inventory_cap) {
    next.inventory -= 1;
    next.cash += state_.mid_price + action.delta_ask;
    out.ask_filled = true;
  }

  ++step_index_;
  next.time = step_index_ * c.dt;
  next.mid_price = path_[static_cast<std::size_t>(step_index_)];
  next.prev_spread = action.delta_ask + action.delta_bid;

  hawkes_.decay(c.dt, c.decay);
  hawkes_.add_events(out.bid_filled, out.ask_filled, c);
  if (record_events_) {
    if (out.bid_filled) events_.buy_times.push_back(next.time);
    if (out.ask_filled) events_.sell_times.push_back(next.time);
  }

  const double q = next.inventory;
  out.reward = next.wealth() - wealth_before - c.inventory_penalty * q * q * c.volatility * c.volatility * c.dt;
  out.done = done();
  out.next_state = next;
  state_ = next;
  return out;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows) {
  out << "step,t,S,q,X,delta_bid,delta_ask,bid_fill,ask_fill,reward\n";
  for (const auto& r : rows) {
    out << r.step << ',' << format_double(r.t) << ',' << format_double(r.mid_price) << ',' << r.inventory << ','
        << format_double(r.cash) << ',' << format_double(r.delta_bid) << ',' << format_double(r.delta_ask) << ','
        << (r.bid_fill ? 1 : 0) << ',' << (r.ask_fill ? 1 : 0) << ',' << format_double(r.reward) << '\n';
  }
}

}  // namespace finflow::market
