#pragma once

#include <functional>
#include <memory>
#include <ostream>
#include <string>

#include "finflow/meanflow/meanflow_policy.hpp"
#include "finflow/rl/noise_policy.hpp"
#include "finflow/rl/ppo.hpp"
#include "finflow/rl/rollout.hpp"

namespace finflow::rl {

/// Actor for noise-space control: condition from the expert's NormStats,
/// decode = execution slice of the frozen expert's one-step chunk.
ChunkActor flow_actor(std::shared_ptr<const meanflow::MeanFlowPolicy> expert);

/// Noise policy + critic on top of a frozen MeanFlow expert.
struct FineTunedPolicy {
  std::shared_ptr<const meanflow::MeanFlowPolicy> expert;
  NoisePolicy policy;
  ValueNet value;
  std::string expert_hash;  // parameter hash of the expert it was trained against

  /// Deterministic: w = mean(s), chunk from the expert, execution slice.
  Eigen::MatrixXd infer_chunk(std::span<const market::MarketState> window) const;

  std::size_t trainable_parameters() const;

  void save(const std::string& path) const;
  nn::Checkpoint to_checkpoint() const;
  /// Throws std::runtime_error if `expert` does not hash to the recorded value.
  static FineTunedPolicy from_checkpoint(const nn::Checkpoint& ck,
                                         std::shared_ptr<const meanflow::MeanFlowPolicy> expert);
  static FineTunedPolicy load(const std::string& path, std::shared_ptr<const meanflow::MeanFlowPolicy> expert);
};

struct FinetuneConfig {
  market::ScenarioConfig scenario;
  int envs = 16;
  int chunks_per_env = 100;
  int updates = 200;
  PPOHyper hyper;
  int policy_hidden = 64;
  int value_hidden = 64;
  double init_log_std = 0.0;
  ChunkReward reward_mode = ChunkReward::sum;
  std::uint64_t seed = 0;
};

struct FinetuneLogRow {
  int update = 0;
  double mean_chunk_reward = 0.0;
  double mean_episode_reward = 0.0;  // NaN when no episode finished
  PPODiagnostics diag;
};

void write_finetune_log_header(std::ostream& out);
void write_finetune_log_row(std::ostream& out, const FinetuneLogRow& row);

/// Creates a fresh noise policy and critic for the expert.
FineTunedPolicy init_finetune(std::shared_ptr<const meanflow::MeanFlowPolicy> expert, const FinetuneConfig& cfg);

/// PPO in noise space: collect, GAE, update, repeated `updates` times.
FineTunedPolicy finetune(std::shared_ptr<const meanflow::MeanFlowPolicy> expert, const FinetuneConfig& cfg,
                         const std::function<void(const FinetuneLogRow&)>& log = {});

/// Chunked strategy driven by infer_chunk.
class FineTunedStrategy final : public meanflow::ChunkedStrategy {
 public:
  explicit FineTunedStrategy(std::shared_ptr<const FineTunedPolicy> policy);
  std::string name() const override { return "FinFlowRL"; }
  experts::ExpertKind kind() const override { return experts::ExpertKind::learned; }
  std::unique_ptr<experts::QuotingStrategy> clone() const override {
    return std::make_unique<FineTunedStrategy>(*this);
  }

 protected:
  Eigen::MatrixXd plan(std::span<const market::MarketState> window) override { return policy_->infer_chunk(window); }

 private:
  std::shared_ptr<const FineTunedPolicy> policy_;
};

}  // namespace finflow::rl
