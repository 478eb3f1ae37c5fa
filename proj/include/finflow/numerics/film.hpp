#pragma once

#include <span>

#include <Eigen/Dense>

#include "finflow/numerics/dense_net.hpp"

namespace finflow::nn {

/// Feature-wise linear modulation: h' = gamma(c) * h + beta(c), where the
/// condition net emits [gamma; beta] stacked (2 * feature_dim outputs).
class FiLMLayer {
 public:
  FiLMLayer() = default;
  explicit FiLMLayer(DenseNet condition_net);

  /// Condition net cond_dim -> hidden -> 2 * feature_dim. The gamma half of
  /// the output bias starts at 1 so a fresh layer is close to the identity.
  static FiLMLayer create(int cond_dim, int hidden, int feature_dim, Rng& rng);

  int feature_dim() const { return feature_dim_; }
  int condition_dim() const { return condition_net_.input_dim(); }
  const DenseNet& condition_net() const { return condition_net_; }
  DenseNet& condition_net() { return condition_net_; }

  struct Modulation {
    Eigen::MatrixXd gamma;  // feature_dim x batch
    Eigen::MatrixXd beta;
  };

  Modulation modulation(const Eigen::MatrixXd& conditions, Tape* tape) const;

  Eigen::MatrixXd modulate(const Eigen::MatrixXd& features, const Eigen::MatrixXd& conditions) const;
  Eigen::VectorXd modulate(const Eigen::VectorXd& features, const Eigen::VectorXd& condition) const;

  /// Backpropagates d loss / d h' given the features and modulation used in
  /// the forward pass. Accumulates condition-net parameter gradients and
  /// returns d loss / d features.
  Eigen::MatrixXd backward(const Tape& tape, const Modulation& mod, const Eigen::MatrixXd& features,
                           const Eigen::MatrixXd& output_grad, std::span<double> param_grad) const;

 private:
  DenseNet condition_net_;
  int feature_dim_ = 0;
};

}  // namespace finflow::nn
