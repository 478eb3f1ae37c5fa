#include "finflow/numerics/film.hpp"

#include <stdexcept>

namespace finflow::nn {

FiLMLayer::FiLMLayer(DenseNet condition_net) : condition_net_(std::move(condition_net)) {
  if (condition_net_.output_dim() % 2 != 0) {
    throw std::invalid_argument("FiLMLayer: condition net output must be 2 * feature_dim");
  }
  feature_dim_ = condition_net_.output_dim() / 2;
}

FiLMLayer FiLMLayer::create(int cond_dim, int hidden, int feature_dim, Rng& rng) {
  DenseNet net = DenseNet::glorot({cond_dim, hidden, 2 * feature_dim}, Activation::relu, rng);
  const std::size_t last = net.num_layers() - 1;
  net.bias(last).head(feature_dim).setOnes();
  return FiLMLayer(std::move(net));
}

FiLMLayer::Modulation FiLMLayer::modulation(const Eigen::MatrixXd& conditions, Tape* tape) const {
  Eigen::MatrixXd out = condition_net_.forward(conditions, tape);
  return {out.topRows(feature_dim_), out.bottomRows(feature_dim_)};
}

Eigen::MatrixXd FiLMLayer::modulate(const Eigen::MatrixXd& features, const Eigen::MatrixXd& conditions) const {
  if (features.rows() != feature_dim_ || features.cols() != conditions.cols()) {
    throw std::invalid_argument("FiLMLayer::modulate: feature shape mismatch");
  }
  const Modulation mod = modulation(conditions, nullptr);
  return mod.gamma.cwiseProduct(features) + mod.beta;
}

Eigen::VectorXd FiLMLayer::modulate(const Eigen::VectorXd& features, const Eigen::VectorXd& condition) const {
  return modulate(Eigen::MatrixXd(features), Eigen::MatrixXd(condition)).col(0);
}

Eigen::MatrixXd FiLMLayer::backward(const Tape& tape, const Modulation& mod, const Eigen::MatrixXd& features,
                                    const Eigen::MatrixXd& output_grad, std::span<double> param_grad) const {
  Eigen::MatrixXd cond_grad(2 * feature_dim_, output_grad.cols());
  cond_grad.topRows(feature_dim_) = output_grad.cwiseProduct(features);
  cond_grad.bottomRows(feature_dim_) = output_grad;
  condition_net_.backward(tape, cond_grad, param_grad);
  return output_grad.cwiseProduct(mod.gamma);
}

}  // namespace finflow::nn
