#pragma once

#include <cstdint>
#include <vector>

#include "finflow/common/rng.hpp"
#include "finflow/market/scenario.hpp"

namespace finflow::market {

/// Jump-diffusion mid-price path S_0..S_N. Each step is either a jump
/// (probability jump_intensity * dt, S *= e^J with J ~ N(jump_mean, jump_std^2))
/// or a log-normal diffusion increment.
std::vector<double> simulate_price_path(const ScenarioConfig& cfg, Rng& rng);
std::vector<double> simulate_price_path(const ScenarioConfig& cfg, std::uint64_t seed);

/// Same as above, also reporting how many steps jumped.
std::vector<double> simulate_price_path(const ScenarioConfig& cfg, Rng& rng, int* jump_count);

}  // namespace finflow::market
