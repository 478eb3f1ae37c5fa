#pragma once

#include <vector>

#include "finflow/common/rng.hpp"
#include "finflow/market/scenario.hpp"

namespace finflow::market {

enum class Side { buy, sell };

/// Decayed kernel sums for both sides in O(1) recursive form.
/// excitation_buy  = sum_{buy}  a_bb e^{-b(t-ti)} + sum_{sell} a_ba e^{-b(t-tj)}
/// excitation_sell = sum_{sell} a_aa e^{-b(t-ti)} + sum_{buy}  a_ab e^{-b(t-tj)}
struct HawkesState {
  double excitation_buy = 0.0;
  double excitation_sell = 0.0;

  /// Advance the clock by `elapsed` with no events.
  void decay(double elapsed, double beta);
  /// Register events at the current time.
  void add_events(bool buy_event, bool sell_event, const ScenarioConfig& cfg);
};

double hawkes_intensity(Side side, const HawkesState& state, const ScenarioConfig& cfg);

/// Event-time lists evaluated by direct kernel summation. Oracle for the
/// recursive form; O(history) per query.
struct HawkesEventLog {
  std::vector<double> buy_times;
  std::vector<double> sell_times;

  double intensity(Side side, double t, const ScenarioConfig& cfg) const;
};

struct HawkesCounts {
  long buy = 0;
  long sell = 0;
  double elapsed = 0.0;
  long iterations = 0;
};

/// Continuous-time simulation of the bivariate process by Ogata thinning on
/// top of HawkesState: candidate times come from the current total
/// intensity (an upper bound until the next event), each accepted as buy,
/// sell or rejected. Runs `iterations` candidates from an empty history.
HawkesCounts simulate_hawkes(const ScenarioConfig& cfg, long iterations, Rng& rng);

}  // namespace finflow::market
