#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "finflow/numerics/adam.hpp"
#include "finflow/rl/noise_policy.hpp"

namespace finflow::rl {

struct PPOHyper {
  double clip = 0.2;
  double value_coeff = 0.5;
  double entropy_coeff = 0.01;
  double discount = 0.99;
  double gae_lambda = 0.95;
  int epochs = 4;
  int minibatch = 256;
  double learning_rate = 5e-5;
  void validate() const;
};

/// One decision: the condition it was taken from, the sampled flat vector,
/// and what came back.
struct Transition {
  Eigen::VectorXd condition;
  Eigen::VectorXd w;
  double log_prob = 0.0;
  double value = 0.0;
  double reward = 0.0;
  bool done = false;  // episode ended inside this transition
};

/// A contiguous run of transitions from one environment, with the value of
/// the state after the last one (ignored when that transition is terminal).
struct Segment {
  std::size_t begin = 0;
  std::size_t end = 0;
  double bootstrap_value = 0.0;
};

struct RolloutBuffer {
  std::vector<Transition> transitions;
  std::vector<Segment> segments;
  std::vector<double> advantages;
  std::vector<double> returns;
  std::vector<double> episode_rewards;  // totals of episodes finished while collecting

  void clear();
  double mean_reward() const;
};

/// Generalized advantage estimation over one sequence. `bootstrap_value`
/// is V of the state after the last step (used only if it is not terminal).
/// Returns are advantages + values.
void gae(const std::vector<double>& rewards, const std::vector<double>& values, const std::vector<bool>& dones,
         double bootstrap_value, double discount, double lambda, std::vector<double>& advantages,
         std::vector<double>& returns);

/// Runs gae over every segment of the buffer.
void compute_advantages(RolloutBuffer& buffer, double discount, double lambda);

/// Shifts and scales to mean 0, population std 1 (only centers if the std
/// is ~0).
void normalize_advantages(std::vector<double>& advantages);

struct PPODiagnostics {
  double surrogate = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  int minibatches = 0;
  int skipped = 0;
};

/// Clipped-surrogate PPO step counts for a given minibatch; exposed for
/// tests. Fills d loss / d log_prob per sample and returns the mean
/// surrogate (-min(ratio A, clip(ratio) A)).
double clipped_surrogate(const Eigen::RowVectorXd& ratio, const Eigen::RowVectorXd& advantages, double clip,
                         Eigen::RowVectorXd* d_logp, int* clipped);

/// Owns the Adam state for one (policy, value) pair.
class PPOLearner {
 public:
  PPOLearner(NoisePolicy& policy, ValueNet& value, PPOHyper hyper);

  /// E epochs of shuffled minibatches over the buffer (advantages must be
  /// computed). Advantages are normalized in place first.
  PPODiagnostics update(RolloutBuffer& buffer, Rng& rng);

  const PPOHyper& hyper() const { return hyper_; }

 private:
  NoisePolicy& policy_;
  ValueNet& value_;
  PPOHyper hyper_;
  nn::Adam adam_;
};

}  // namespace finflow::rl
