#pragma once

#include <string>

#include "finflow/common/keyed_config.hpp"

namespace finflow::market {

/// Parameters of one simulated market. Keyed-text field names match the
/// member names exactly; `self_excite` / `cross_excite` are accepted as
/// shorthands that set both sides.
struct ScenarioConfig {
  double horizon = 1.0;
  double dt = 0.01;
  double drift = 0.0;
  double volatility = 0.1;
  double hurst = 0.5;
  double jump_intensity = 0.0;
  double jump_mean = 0.0;
  double jump_std = 0.02;
  double base_intensity_buy = 20.0;
  double base_intensity_sell = 20.0;
  double self_excite_bb = 0.7;
  double self_excite_aa = 0.7;
  double cross_excite_ab = 0.3;
  double cross_excite_ba = 0.3;
  double decay = 0.1;
  double spread_sensitivity = 1.5;
  double initial_price = 100.0;
  double initial_cash = 1000.0;
  int inventory_cap = 10;
  double inventory_penalty = 0.1;

  /// Number of steps N = horizon / dt.
  int steps() const;

  /// Throws std::invalid_argument naming the first violated constraint.
  void validate() const;

  /// Applies every recognized key of `cfg`; unknown keys are left alone.
  void apply(const KeyedConfig& cfg);
  KeyedConfig to_keyed() const;

  bool operator==(const ScenarioConfig&) const = default;
};

}  // namespace finflow::market
