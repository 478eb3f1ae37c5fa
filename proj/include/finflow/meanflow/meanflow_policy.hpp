#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "finflow/data/demo_dataset.hpp"
#include "finflow/experts/strategy.hpp"
#include "finflow/meanflow/meanflow.hpp"
#include "finflow/numerics/checkpoint.hpp"

namespace finflow::meanflow {

/// Trained velocity field plus the normalization and horizons it was fit with.
struct MeanFlowPolicy {
  VelocityNet net;
  data::NormStats stats;
  data::Horizons horizons;

  Eigen::VectorXd condition(std::span<const market::MarketState> window) const {
    return stats.condition(window);
  }
  /// Unnormalized chunk, one row per step (bid, ask), from flat noise w.
  Eigen::MatrixXd generate_chunk(const Eigen::VectorXd& w, const Eigen::VectorXd& condition) const;
  /// Rows [obs - 1, obs - 1 + exec) of a chunk.
  Eigen::MatrixXd exec_slice(const Eigen::MatrixXd& chunk) const;

  nn::Checkpoint to_checkpoint() const;
  static MeanFlowPolicy from_checkpoint(const nn::Checkpoint& ck);
  void save(const std::string& path) const;
  static MeanFlowPolicy load(const std::string& path);
  std::string parameter_hash() const;
};

/// Chunked execution: keeps the last T_obs states (the first state repeated
/// at episode start) and replans whenever the queue of committed actions
/// runs dry.
class ChunkedStrategy : public experts::QuotingStrategy {
 public:
  explicit ChunkedStrategy(data::Horizons horizons) : horizons_(horizons) {}
  void begin_episode(const market::MarketState& initial, std::uint64_t seed) override;
  experts::QuoteAction quote(const market::MarketState& state) override;

 protected:
  /// Returns T_exec rows of (bid, ask) to commit to.
  virtual Eigen::MatrixXd plan(std::span<const market::MarketState> window) = 0;
  virtual void reset_episode(std::uint64_t seed) { (void)seed; }
  const data::Horizons& horizons() const { return horizons_; }

 private:
  data::Horizons horizons_;
  std::vector<market::MarketState> window_;
  std::deque<experts::QuoteAction> queue_;
};

/// The pre-trained policy on its own: noise drawn from N(0, I) per chunk.
class PretrainedStrategy final : public ChunkedStrategy {
 public:
  explicit PretrainedStrategy(std::shared_ptr<const MeanFlowPolicy> policy);
  std::string name() const override { return "Pretrained"; }
  experts::ExpertKind kind() const override { return experts::ExpertKind::learned; }
  std::unique_ptr<experts::QuotingStrategy> clone() const override {
    return std::make_unique<PretrainedStrategy>(*this);
  }

 protected:
  Eigen::MatrixXd plan(std::span<const market::MarketState> window) override;
  void reset_episode(std::uint64_t seed) override { rng_.seed(seed); }

 private:
  std::shared_ptr<const MeanFlowPolicy> policy_;
  Rng rng_;
};

struct PretrainConfig {
  int steps = 20000;
  TrainConfig train;
  bool cosine_decay = true;
  VelocityNetConfig net;  // action/condition dims are taken from the dataset
  int log_every = 100;
  std::uint64_t seed = 0;
};

/// Called every log_every steps with (step, mean loss since last call).
using LossLogger = std::function<void(int, double)>;

/// Fits a fresh velocity net to the dataset's normalized chunks.
MeanFlowPolicy pretrain(const data::Dataset& ds, const PretrainConfig& cfg, const LossLogger& log = {});

}  // namespace finflow::meanflow
