#include "finflow/market/scenario.hpp"

#include <cmath>
#include <stdexcept>

namespace finflow::market {

int ScenarioConfig::steps() const { return static_cast<int>(std::llround(horizon / dt)); }

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("invalid scenario: " + what); };
  if (!(dt > 0.0)) fail("dt must be > 0");
  if (!(horizon > 0.0)) fail("horizon must be > 0");
  const double ratio = horizon / dt;
  if (std::llround(ratio) < 1 || std::abs(ratio - std::llround(ratio)) > 1e-9 * std::max(1.0, ratio)) {
    fail("horizon / dt must be a positive integer");
  }
  if (!(volatility >= 0.0)) fail("volatility must be >= 0");
  if (hurst != 0.5) fail("only hurst = 0.5 is supported");
  if (!(jump_intensity >= 0.0)) fail("jump_intensity must be >= 0");
  if (!(jump_std >= 0.0)) fail("jump_std must be >= 0");
  if (!(base_intensity_buy > 0.0)) fail("base_intensity_buy must be > 0");
  if (!(base_intensity_sell > 0.0)) fail("base_intensity_sell must be > 0");
  if (!(self_excite_bb >= 0.0 && self_excite_aa >= 0.0 && cross_excite_ab >= 0.0 && cross_excite_ba >= 0.0)) {
    fail("excitation coefficients must be >= 0");
  }
  if (!(decay > 0.0)) fail("decay must be > 0");
  if (!(spread_sensitivity >= 0.0)) fail("spread_sensitivity must be >= 0");
  if (!(initial_price > 0.0)) fail("initial_price must be > 0");
  if (inventory_cap < 0) fail("inventory_cap must be >= 0");
  if (!(inventory_penalty >= 0.0)) fail("inventory_penalty must be >= 0");
}

void ScenarioConfig::apply(const KeyedConfig& cfg) {
  horizon = cfg.get_double("horizon", horizon);
  dt = cfg.get_double("dt", dt);
  drift = cfg.get_double("drift", drift);
  volatility = cfg.get_double("volatility", volatility);
  hurst = cfg.get_double("hurst", hurst);
  jump_intensity = cfg.get_double("jump_intensity", jump_intensity);
  jump_mean = cfg.get_double("jump_mean", jump_mean);
  jump_std = cfg.get_double("jump_std", jump_std);
  base_intensity_buy = cfg.get_double("base_intensity_buy", base_intensity_buy);
  base_intensity_sell = cfg.get_double("base_intensity_sell", base_intensity_sell);
  if (cfg.contains("self_excite")) self_excite_bb = self_excite_aa = cfg.get_double("self_excite", 0.0);
  if (cfg.contains("cross_excite")) cross_excite_ab = cross_excite_ba = cfg.get_double("cross_excite", 0.0);
  self_excite_bb = cfg.get_double("self_excite_bb", self_excite_bb);
  self_excite_aa = cfg.get_double("self_excite_aa", self_excite_aa);
  cross_excite_ab = cfg.get_double("cross_excite_ab", cross_excite_ab);
  cross_excite_ba = cfg.get_double("cross_excite_ba", cross_excite_ba);
  decay = cfg.get_double("decay", decay);
  spread_sensitivity = cfg.get_double("spread_sensitivity", spread_sensitivity);
  initial_price = cfg.get_double("initial_price", initial_price);
  initial_cash = cfg.get_double("initial_cash", initial_cash);
  inventory_cap = static_cast<int>(cfg.get_int("inventory_cap", inventory_cap));
  inventory_penalty = cfg.get_double("inventory_penalty", inventory_penalty);
}

KeyedConfig ScenarioConfig::to_keyed() const {
  KeyedConfig c;
  c.set("horizon", format_double(horizon));
  c.set("dt", format_double(dt));
  c.set("drift", format_double(drift));
  c.set("volatility", format_double(volatility));
  c.set("hurst", format_double(hurst));
  c.set("jump_intensity", format_double(jump_intensity));
  c.set("jump_mean", format_double(jump_mean));
  c.set("jump_std", format_double(jump_std));
  c.set("base_intensity_buy", format_double(base_intensity_buy));
  c.set("base_intensity_sell", format_double(base_intensity_sell));
  c.set("self_excite_bb", format_double(self_excite_bb));
  c.set("self_excite_aa", format_double(self_excite_aa));
  c.set("cross_excite_ab", format_double(cross_excite_ab));
  c.set("cross_excite_ba", format_double(cross_excite_ba));
  c.set("decay", format_double(decay));
  c.set("spread_sensitivity", format_double(spread_sensitivity));
  c.set("initial_price", format_double(initial_price));
  c.set("initial_cash", format_double(initial_cash));
  c.set("inventory_cap", std::to_string(inventory_cap));
  c.set("inventory_penalty", format_double(inventory_penalty));
  return c;
}

}  // namespace finflow::market
