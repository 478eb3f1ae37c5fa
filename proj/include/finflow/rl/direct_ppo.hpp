#pragma once

#include <functional>
#include <memory>
#include <string>

#include "finflow/data/demo_dataset.hpp"
#include "finflow/experts/strategy.hpp"
#include "finflow/rl/finetune.hpp"

namespace finflow::rl {

/// Fixed observation scaling derived from the scenario (no dataset needed):
/// [t / T, (cash - X0) / S0, q / q_max, (S - S0) / S0 * 10, prev_spread].
Eigen::VectorXd direct_condition(const market::ScenarioConfig& scenario, const market::MarketState& s);

/// Actor for direct action control: one-step chunks, delta = max(0, w).
ChunkActor direct_actor(const market::ScenarioConfig& scenario);

struct DirectPPOConfig {
  market::ScenarioConfig scenario;
  int envs = 8;
  int steps_per_env = 200;
  int updates = 60;
  PPOHyper hyper = default_hyper();
  int hidden = 64;
  double init_spread = 0.5;  // initial mean quote distance on both sides
  double init_log_std = -1.0;
  std::uint64_t seed = 0;

  static PPOHyper default_hyper();
};

struct DirectPPOPolicy {
  market::ScenarioConfig scenario;
  NoisePolicy policy;
  ValueNet value;

  market::QuoteAction act(const market::MarketState& s) const;

  nn::Checkpoint to_checkpoint() const;
  static DirectPPOPolicy from_checkpoint(const nn::Checkpoint& ck);
};

DirectPPOPolicy init_direct_ppo(const DirectPPOConfig& cfg);
DirectPPOPolicy train_direct_ppo(const DirectPPOConfig& cfg,
                                 const std::function<void(const FinetuneLogRow&)>& log = {});

/// Deterministic quoting with the trained mean.
class DirectPPOStrategy final : public experts::QuotingStrategy {
 public:
  explicit DirectPPOStrategy(std::shared_ptr<const DirectPPOPolicy> policy) : policy_(std::move(policy)) {}
  std::string name() const override { return "PPO"; }
  experts::ExpertKind kind() const override { return experts::ExpertKind::ppo; }
  std::unique_ptr<experts::QuotingStrategy> clone() const override {
    return std::make_unique<DirectPPOStrategy>(*this);
  }
  market::QuoteAction quote(const market::MarketState& s) override { return policy_->act(s); }

 private:
  std::shared_ptr<const DirectPPOPolicy> policy_;
};

/// Tournament candidate factory: trains a direct PPO teacher on the scenario.
data::StrategyFactory direct_ppo_factory(DirectPPOConfig base);

}  // namespace finflow::rl
