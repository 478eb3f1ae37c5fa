#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "finflow/common/rng.hpp"
#include "finflow/numerics/dense_net.hpp"
#include "finflow/numerics/param_group.hpp"

namespace finflow::rl {

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;

/// Diagonal Gaussian over a flat vector: mean from a net on the condition,
/// state-independent learnable log standard deviation.
class NoisePolicy {
 public:
  NoisePolicy() = default;
  NoisePolicy(nn::DenseNet mean_net, std::vector<double> log_std);
  /// cond_dim -> hidden -> hidden -> dim, tanh, log_std = init_log_std.
  /// The output layer starts at zero, so the initial mean is 0 everywhere.
  static NoisePolicy create(int cond_dim, int dim, int hidden, Rng& rng, double init_log_std = 0.0);

  int dim() const { return mean_net_.output_dim(); }
  int condition_dim() const { return mean_net_.input_dim(); }
  const nn::DenseNet& mean_net() const { return mean_net_; }
  nn::DenseNet& mean_net() { return mean_net_; }
  std::span<const double> log_std() const { return log_std_; }
  void set_log_std(std::span<const double> values);
  /// Clamps log_std into [kLogStdMin, kLogStdMax].
  void clamp();

  Eigen::VectorXd mean(const Eigen::VectorXd& condition) const { return mean_net_.forward(condition); }

  struct Sample {
    Eigen::VectorXd w;
    double log_prob = 0.0;
  };
  Sample sample(const Eigen::VectorXd& condition, Rng& rng) const;

  double log_prob(const Eigen::VectorXd& mean, const Eigen::VectorXd& w) const;
  /// Column-wise log densities for means/ws of shape dim x B.
  Eigen::RowVectorXd log_prob(const Eigen::MatrixXd& means, const Eigen::MatrixXd& ws) const;
  /// Closed form: sum(log_std) + dim/2 (1 + log 2 pi).
  double entropy() const;

  /// Mean net parameters followed by log_std.
  nn::ParamGroup param_group();

 private:
  nn::DenseNet mean_net_;
  std::vector<double> log_std_;
};

/// State-value critic.
class ValueNet {
 public:
  ValueNet() = default;
  explicit ValueNet(nn::DenseNet net);
  static ValueNet create(int cond_dim, int hidden, Rng& rng);

  const nn::DenseNet& net() const { return net_; }
  nn::DenseNet& net() { return net_; }
  double value(const Eigen::VectorXd& condition) const { return net_.forward(condition)(0); }

 private:
  nn::DenseNet net_;
};

}  // namespace finflow::rl
