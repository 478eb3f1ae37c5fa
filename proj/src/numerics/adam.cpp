#include "finflow/numerics/adam.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace finflow::nn {

Adam::Adam(std::size_t num_params, AdamConfig config) : config_(config) {
  state_.first_moment.assign(num_params, 0.0);
  state_.second_moment.assign(num_params, 0.0);
}

void Adam::step(std::span<double> params, std::span<const double> grads) {
  if (params.size() != grads.size() || params.size() != state_.first_moment.size()) {
    throw std::invalid_argument("Adam::step: parameter/gradient size mismatch");
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      throw std::domain_error("Adam::step: non-finite gradient at index " + std::to_string(i));
    }
  }
  auto& m = state_.first_moment;
  auto& v = state_.second_moment;
  ++state_.step_count;
  bool all_zero = true;
  for (double g : grads) all_zero = all_zero && g == 0.0;
  if (all_zero) {
    // No signal: moments decay, parameters stay put.
    for (std::size_t i = 0; i < m.size(); ++i) {
      m[i] *= config_.beta1;
      v[i] *= config_.beta2;
    }
    return;
  }
  const double t = static_cast<double>(state_.step_count);
  const double bc1 = 1.0 - std::pow(config_.beta1, t);
  const double bc2 = 1.0 - std::pow(config_.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * grads[i];
    v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * grads[i] * grads[i];
    const double m_hat = m[i] / bc1;
    const double v_hat = v[i] / bc2;
    params[i] -= config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
  }
}

}  // namespace finflow::nn
