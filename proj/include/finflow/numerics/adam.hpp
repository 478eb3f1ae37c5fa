#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace finflow::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::uint64_t step_count = 0;
};

/// Adam with bias correction over one flat parameter vector.
class Adam {
 public:
  Adam() = default;
  Adam(std::size_t num_params, AdamConfig config);

  /// One update. Throws std::domain_error (state and params untouched) when a
  /// gradient entry is non-finite, std::invalid_argument on a size mismatch.
  void step(std::span<double> params, std::span<const double> grads);

  const AdamState& state() const { return state_; }
  const AdamConfig& config() const { return config_; }
  void set_learning_rate(double lr) { config_.learning_rate = lr; }

 private:
  AdamConfig config_;
  AdamState state_;
};

}  // namespace finflow::nn
