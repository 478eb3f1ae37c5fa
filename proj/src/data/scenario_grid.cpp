#include "finflow/data/scenario_grid.hpp"

namespace finflow::data {

market::ScenarioConfig grid_base() {
  market::ScenarioConfig c;
  c.self_excite_bb = c.self_excite_aa = 0.7;
  c.cross_excite_ab = c.cross_excite_ba = 0.3;
  c.decay = 0.1;
  return c;
}

std::vector<market::ScenarioConfig> build_scenario_grid(const GridAxes& axes, const market::ScenarioConfig& base) {
  std::vector<market::ScenarioConfig> grid;
  for (double mu : axes.drift)
    for (double sigma : axes.volatility)
      for (double jumps : axes.jump_intensity)
        for (double dt : axes.dt)
          for (double liq : axes.liquidity)
            for (double h : axes.hurst) {
              market::ScenarioConfig c = base;
              c.drift = mu;
              c.volatility = sigma;
              c.jump_intensity = jumps;
              c.dt = dt;
              c.base_intensity_buy = c.base_intensity_sell = liq;
              c.hurst = h;
              grid.push_back(c);
            }
  return grid;
}

}  // namespace finflow::data
