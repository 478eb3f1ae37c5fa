#include "finflow/market/price_path.hpp"

#include <cmath>

namespace finflow::market {

std::vector<double> simulate_price_path(const ScenarioConfig& cfg, Rng& rng, int* jump_count) {
  const int n = cfg.steps();
  std::vector<double> path(static_cast<std::size_t>(n) + 1);
  path[0] = cfg.initial_price;
  const double jump_prob = cfg.jump_intensity * cfg.dt;
  const double drift_term = (cfg.drift - 0.5 * cfg.volatility * cfg.volatility) * cfg.dt;
  const double diffusion = cfg.volatility * std::sqrt(cfg.dt);
  int jumps = 0;
  for (int i = 1; i <= n; ++i) {
    // Two draws per step regardless of branch keeps streams aligned across configs.
    const double u = uniform01(rng);
    const double z = standard_normal(rng);
    double log_step;
    if (u < jump_prob) {
      log_step = cfg.jump_mean + cfg.jump_std * z;
      ++jumps;
    } else {
      log_step = drift_term + diffusion * z;
    }
    path[i] = path[i - 1] * std::exp(log_step);
  }
  if (jump_count) *jump_count = jumps;
  return path;
}

std::vector<double> simulate_price_path(const ScenarioConfig& cfg, Rng& rng) {
  return simulate_price_path(cfg, rng, nullptr);
}

std::vector<double> simulate_price_path(const ScenarioConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  return simulate_price_path(cfg, rng, nullptr);
}

}  // namespace finflow::market
