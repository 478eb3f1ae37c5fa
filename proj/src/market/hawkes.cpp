#include "finflow/market/hawkes.hpp"

#include <cmath>

namespace finflow::market {

void HawkesState::decay(double elapsed, double beta) {
  const double f = std::exp(-beta * elapsed);
  excitation_buy *= f;
  excitation_sell *= f;
}

void HawkesState::add_events(bool buy_event, bool sell_event, const ScenarioConfig& cfg) {
  if (buy_event) {
    excitation_buy += cfg.self_excite_bb;
    excitation_sell += cfg.cross_excite_ab;
  }
  if (sell_event) {
    excitation_sell += cfg.self_excite_aa;
    excitation_buy += cfg.cross_excite_ba;
  }
}

double hawkes_intensity(Side side, const HawkesState& state, const ScenarioConfig& cfg) {
  return side == Side::buy ? cfg.base_intensity_buy + state.excitation_buy
                           : cfg.base_intensity_sell + state.excitation_sell;
}

double HawkesEventLog::intensity(Side side, double t, const ScenarioConfig& cfg) const {
  const double beta = cfg.decay;
  double own = 0.0;
  double cross = 0.0;
  const auto& own_times = side == Side::buy ? buy_times : sell_times;
  const auto& cross_times = side == Side::buy ? sell_times : buy_times;
  for (double ti : own_times) {
    if (ti <= t) own += std::exp(-beta * (t - ti));
  }
  for (double tj : cross_times) {
    if (tj <= t) cross += std::exp(-beta * (t - tj));
  }
  if (side == Side::buy) return cfg.base_intensity_buy + cfg.self_excite_bb * own + cfg.cross_excite_ba * cross;
  return cfg.base_intensity_sell + cfg.self_excite_aa * own + cfg.cross_excite_ab * cross;
}

HawkesCounts simulate_hawkes(const ScenarioConfig& cfg, long iterations, Rng& rng) {
  HawkesState state;
  HawkesCounts out;
  for (long i = 0; i < iterations; ++i) {
    const double bound = hawkes_intensity(Side::buy, state, cfg) + hawkes_intensity(Side::sell, state, cfg);
    const double wait = -std::log1p(-uniform01(rng)) / bound;
    state.decay(wait, cfg.decay);
    out.elapsed += wait;
    const double lb = hawkes_intensity(Side::buy, state, cfg);
    const double ls = hawkes_intensity(Side::sell, state, cfg);
    const double u = uniform01(rng) * bound;
    const bool buy = u < lb;
    const bool sell = !buy && u < lb + ls;
    out.buy += buy ? 1 : 0;
    out.sell += sell ? 1 : 0;
    state.add_events(buy, sell, cfg);
  }
  out.iterations = iterations;
  return out;
}

}  // namespace finflow::market
