#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "finflow/data/demo_dataset.hpp"
#include "finflow/market/market_env.hpp"
#include "finflow/rl/noise_policy.hpp"
#include "finflow/rl/ppo.hpp"

namespace finflow::rl {

/// How a flat policy sample becomes market actions: the condition fed to
/// the policy for a window, and the decoder from (w, condition) to the rows
/// that get executed (one (bid, ask) row per environment step).
struct ChunkActor {
  data::Horizons horizons;
  std::function<Eigen::VectorXd(std::span<const market::MarketState>)> condition;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> decode;
};

/// Reward bookkeeping inside a chunk.
enum class ChunkReward { sum, discounted };

/// Persistent set of environments that auto-reset at episode end, so
/// consecutive collections continue where the previous one stopped.
class RolloutEnvs {
 public:
  RolloutEnvs(const market::ScenarioConfig& scenario, int count, std::uint64_t seed);

  int size() const { return static_cast<int>(slots_.size()); }

  /// Runs `chunks_per_env` decisions in every environment (in parallel)
  /// with a read-only snapshot of the policy and critic. Transitions of
  /// each environment are stored contiguously as one segment.
  RolloutBuffer collect(const NoisePolicy& policy, const ValueNet& value, const ChunkActor& actor,
                        int chunks_per_env, std::uint64_t iteration, double discount,
                        ChunkReward reward_mode = ChunkReward::sum);

 private:
  struct Slot {
    market::MarketEnv env;
    std::vector<market::MarketState> window;
    std::uint64_t episodes = 0;
    double episode_reward = 0.0;
  };
  void start_episode(Slot& slot, std::size_t index);

  market::ScenarioConfig scenario_;
  std::uint64_t seed_;
  std::vector<Slot> slots_;
};

}  // namespace finflow::rl
