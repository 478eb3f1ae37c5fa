#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "finflow/common/rng.hpp"

namespace finflow::nn {

enum class Activation { relu, tanh, identity };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

/// Activations cached by a batched forward pass, consumed by backward().
/// Columns are samples.
struct Tape {
  std::vector<Eigen::MatrixXd> inputs;       // input to layer i
  std::vector<Eigen::MatrixXd> preactivations;
  bool valid() const { return !inputs.empty(); }
};

/// Fully connected network. Parameters live in one flat buffer (column-major
/// weights, then bias, per layer) so optimizers and checkpoints see a single
/// contiguous vector. The net itself is never mutated by forward/backward, so
/// a const instance can be shared across threads.
class DenseNet {
 public:
  DenseNet() = default;

  /// Zero-initialized net. `activations.size()` must equal `layer_dims.size() - 1`
  /// and the last activation must be identity.
  DenseNet(std::vector<int> layer_dims, std::vector<Activation> activations);

  /// Uniform Glorot initialization in +-sqrt(6 / (fan_in + fan_out)), zero biases,
  /// `hidden` on every hidden layer and identity on the output.
  static DenseNet glorot(std::vector<int> layer_dims, Activation hidden, Rng& rng);

  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }
  std::size_t num_layers() const { return acts_.size(); }
  const std::vector<int>& layer_dims() const { return dims_; }
  const std::vector<Activation>& activations() const { return acts_; }
  std::size_t num_params() const { return params_.size(); }

  Eigen::Map<Eigen::MatrixXd> weight(std::size_t layer);
  Eigen::Map<const Eigen::MatrixXd> weight(std::size_t layer) const;
  Eigen::Map<Eigen::VectorXd> bias(std::size_t layer);
  Eigen::Map<const Eigen::VectorXd> bias(std::size_t layer) const;

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  Eigen::VectorXd forward(const Eigen::VectorXd& input) const;

  /// Batched forward; when `tape` is non-null it is overwritten with the
  /// activations backward() needs.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& inputs, Tape* tape) const;

  /// Accumulates d<output_grad, forward(x)>/dparams into `param_grad`
  /// (length num_params()) and returns the gradient w.r.t. the inputs.
  /// Throws std::logic_error when the tape is empty or from another shape.
  Eigen::MatrixXd backward(const Tape& tape, const Eigen::MatrixXd& output_grad,
                           std::span<double> param_grad) const;

  /// Forward-mode directional derivative: J(x) * direction, per column.
  Eigen::MatrixXd jvp(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& directions) const;
  Eigen::VectorXd jvp(const Eigen::VectorXd& input, const Eigen::VectorXd& direction) const;

 private:
  void layout();
  void check_input(Eigen::Index rows) const;

  std::vector<int> dims_;
  std::vector<Activation> acts_;
  std::vector<std::size_t> weight_offset_;
  std::vector<std::size_t> bias_offset_;
  std::vector<double> params_;
};

Eigen::MatrixXd activate(Activation a, const Eigen::MatrixXd& pre);
/// Elementwise derivative of the activation evaluated at the pre-activation.
Eigen::MatrixXd activate_derivative(Activation a, const Eigen::MatrixXd& pre);

/// Symmetric finite difference (f(x + h d) - f(x - h d)) / 2h.
template <typename F>
Eigen::VectorXd finite_difference_directional(const F& f, const Eigen::VectorXd& x,
                                              const Eigen::VectorXd& direction, double h = 1e-4) {
  return (f(x + h * direction) - f(x - h * direction)) / (2.0 * h);
}

/// Convenience: single-sample gradient of <output_grad, forward(input)>.
std::vector<double> parameter_gradient(const DenseNet& net, const Eigen::VectorXd& input,
                                       const Eigen::VectorXd& output_grad);

}  // namespace finflow::nn
