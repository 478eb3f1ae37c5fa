#include "finflow/numerics/dense_net.hpp"

#include <cmath>
#include <stdexcept>

namespace finflow::nn {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::identity: return "identity";
  }
  return "identity";
}

Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::relu;
  if (s == "tanh") return Activation::tanh;
  if (s == "identity") return Activation::identity;
  throw std::invalid_argument("unknown activation: " + s);
}

Eigen::MatrixXd activate(Activation a, const Eigen::MatrixXd& pre) {
  switch (a) {
    case Activation::relu: return pre.cwiseMax(0.0);
    case Activation::tanh: return pre.array().tanh().matrix();
    case Activation::identity: return pre;
  }
  return pre;
}

Eigen::MatrixXd activate_derivative(Activation a, const Eigen::MatrixXd& pre) {
  switch (a) {
    case Activation::relu: return (pre.array() > 0.0).cast<double>().matrix();
    case Activation::tanh: return (1.0 - pre.array().tanh().square()).matrix();
    case Activation::identity: return Eigen::MatrixXd::Ones(pre.rows(), pre.cols());
  }
  return Eigen::MatrixXd::Ones(pre.rows(), pre.cols());
}

DenseNet::DenseNet(std::vector<int> layer_dims, std::vector<Activation> activations)
    : dims_(std::move(layer_dims)), acts_(std::move(activations)) {
  if (dims_.size() < 2) throw std::invalid_argument("DenseNet needs at least one layer");
  if (acts_.size() + 1 != dims_.size()) {
    throw std::invalid_argument("DenseNet: one activation per layer required");
  }
  for (int d : dims_) {
    if (d <= 0) throw std::invalid_argument("DenseNet: layer dims must be positive");
  }
  if (acts_.back() != Activation::identity) {
    throw std::invalid_argument("DenseNet: output layer must be identity");
  }
  layout();
}

void DenseNet::layout() {
  weight_offset_.clear();
  bias_offset_.clear();
  std::size_t offset = 0;
  for (std::size_t i = 0; i + 1 < dims_.size(); ++i) {
    weight_offset_.push_back(offset);
    offset += static_cast<std::size_t>(dims_[i]) * dims_[i + 1];
    bias_offset_.push_back(offset);
    offset += dims_[i + 1];
  }
  params_.assign(offset, 0.0);
}

DenseNet DenseNet::glorot(std::vector<int> layer_dims, Activation hidden, Rng& rng) {
  std::vector<Activation> acts(layer_dims.size() - 1, hidden);
  acts.back() = Activation::identity;
  DenseNet net(std::move(layer_dims), std::move(acts));
  for (std::size_t i = 0; i < net.num_layers(); ++i) {
    const double limit = std::sqrt(6.0 / (net.dims_[i] + net.dims_[i + 1]));
    std::uniform_real_distribution<double> dist(-limit, limit);
    auto w = net.weight(i);
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = dist(rng);
    }
  }
  return net;
}

Eigen::Map<Eigen::MatrixXd> DenseNet::weight(std::size_t layer) {
  return {params_.data() + weight_offset_.at(layer), dims_[layer + 1], dims_[layer]};
}
Eigen::Map<const Eigen::MatrixXd> DenseNet::weight(std::size_t layer) const {
  return {params_.data() + weight_offset_.at(layer), dims_[layer + 1], dims_[layer]};
}
Eigen::Map<Eigen::VectorXd> DenseNet::bias(std::size_t layer) {
  return {params_.data() + bias_offset_.at(layer), dims_[layer + 1]};
}
Eigen::Map<const Eigen::VectorXd> DenseNet::bias(std::size_t layer) const {
  return {params_.data() + bias_offset_.at(layer), dims_[layer + 1]};
}

void DenseNet::check_input(Eigen::Index rows) const {
  if (dims_.empty()) throw std::logic_error("DenseNet: empty network");
  if (rows != dims_.front()) {
    throw std::invalid_argument("DenseNet: input has " + std::to_string(rows) + " rows, expected " +
                                std::to_string(dims_.front()));
  }
}

Eigen::VectorXd DenseNet::forward(const Eigen::VectorXd& input) const {
  check_input(input.size());
  Eigen::VectorXd h = input;
  for (std::size_t i = 0; i < acts_.size(); ++i) {
    Eigen::VectorXd pre = weight(i) * h + bias(i);
    h = activate(acts_[i], pre);
  }
  return h;
}

Eigen::MatrixXd DenseNet::forward(const Eigen::MatrixXd& inputs, Tape* tape) const {
  check_input(inputs.rows());
  if (tape) {
    tape->inputs.clear();
    tape->preactivations.clear();
  }
  Eigen::MatrixXd h = inputs;
  for (std::size_t i = 0; i < acts_.size(); ++i) {
    Eigen::MatrixXd pre = weight(i) * h;
    pre.colwise() += bias(i);
    if (tape) tape->inputs.push_back(h);
    h = activate(acts_[i], pre);
    if (tape) tape->preactivations.push_back(std::move(pre));
  }
  return h;
}

Eigen::MatrixXd DenseNet::backward(const Tape& tape, const Eigen::MatrixXd& output_grad,
                                   std::span<double> param_grad) const {
  if (!tape.valid() || tape.inputs.size() != acts_.size()) {
    throw std::logic_error("DenseNet::backward: no cached forward pass for this network");
  }
  if (param_grad.size() != params_.size()) {
    throw std::invalid_argument("DenseNet::backward: gradient buffer has wrong size");
  }
  if (output_grad.rows() != dims_.back() || output_grad.cols() != tape.inputs.front().cols()) {
    throw std::invalid_argument("DenseNet::backward: output gradient shape mismatch");
  }
  Eigen::MatrixXd g = output_grad;
  for (std::size_t li = acts_.size(); li-- > 0;) {
    if (acts_[li] != Activation::identity) {
      g = g.cwiseProduct(activate_derivative(acts_[li], tape.preactivations[li]));
    }
    Eigen::Map<Eigen::MatrixXd> gw(param_grad.data() + weight_offset_[li], dims_[li + 1], dims_[li]);
    Eigen::Map<Eigen::VectorXd> gb(param_grad.data() + bias_offset_[li], dims_[li + 1]);
    gw.noalias() += g * tape.inputs[li].transpose();
    gb += g.rowwise().sum();
    g = weight(li).transpose() * g;
  }
  return g;
}

Eigen::MatrixXd DenseNet::jvp(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& directions) const {
  check_input(inputs.rows());
  if (directions.rows() != inputs.rows() || directions.cols() != inputs.cols()) {
    throw std::invalid_argument("DenseNet::jvp: direction shape mismatch");
  }
  Eigen::MatrixXd h = inputs;
  Eigen::MatrixXd dh = directions;
  for (std::size_t i = 0; i < acts_.size(); ++i) {
    Eigen::MatrixXd pre = weight(i) * h;
    pre.colwise() += bias(i);
    Eigen::MatrixXd dpre = weight(i) * dh;
    if (acts_[i] != Activation::identity) {
      dh = dpre.cwiseProduct(activate_derivative(acts_[i], pre));
    } else {
      dh = std::move(dpre);
    }
    h = activate(acts_[i], pre);
  }
  return dh;
}

Eigen::VectorXd DenseNet::jvp(const Eigen::VectorXd& input, const Eigen::VectorXd& direction) const {
  if (direction.size() != input.size()) throw std::invalid_argument("DenseNet::jvp: direction length mismatch");
  return jvp(Eigen::MatrixXd(input), Eigen::MatrixXd(direction)).col(0);
}

std::vector<double> parameter_gradient(const DenseNet& net, const Eigen::VectorXd& input,
                                       const Eigen::VectorXd& output_grad) {
  Tape tape;
  net.forward(Eigen::MatrixXd(input), &tape);
  std::vector<double> grad(net.num_params(), 0.0);
  net.backward(tape, Eigen::MatrixXd(output_grad), grad);
  return grad;
}

}  // namespace finflow::nn
