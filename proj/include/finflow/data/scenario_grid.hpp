#pragma once

#include <vector>

#include "finflow/market/scenario.hpp"

namespace finflow::data {

/// Axis values of the training grid. Ordering is drift-major:
/// drift, volatility, jump_intensity, dt, liquidity, hurst (innermost last).
struct GridAxes {
  std::vector<double> drift{0.01, 0.05, 0.2};
  std::vector<double> volatility{0.05, 0.1, 0.3};
  std::vector<double> jump_intensity{0.0, 0.02};
  std::vector<double> dt{0.01, 0.02};
  std::vector<double> liquidity{10.0, 20.0, 40.0};
  std::vector<double> hurst{0.5};
};

/// Shared non-axis parameters: self-excitation 0.7, cross-excitation 0.3,
/// decay 0.1, everything else at ScenarioConfig defaults.
market::ScenarioConfig grid_base();

/// Cartesian product of the axes applied to `base` (108 configs by default).
std::vector<market::ScenarioConfig> build_scenario_grid(const GridAxes& axes = {},
                                                        const market::ScenarioConfig& base = grid_base());

}  // namespace finflow::data
