#include "finflow/rl/noise_policy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace finflow::rl {

namespace {
const double kLog2Pi = std::log(2.0 * std::numbers::pi);
}

NoisePolicy::NoisePolicy(nn::DenseNet mean_net, std::vector<double> log_std)
    : mean_net_(std::move(mean_net)), log_std_(std::move(log_std)) {
  if (static_cast<int>(log_std_.size()) != mean_net_.output_dim()) {
    throw std::invalid_argument("NoisePolicy: log_std length must equal the mean dimension");
  }
  clamp();
}

NoisePolicy NoisePolicy::create(int cond_dim, int dim, int hidden, Rng& rng, double init_log_std) {
  auto net = nn::DenseNet::glorot({cond_dim, hidden, hidden, dim}, nn::Activation::tanh, rng);
  net.weight(net.num_layers() - 1).setZero();
  return NoisePolicy(std::move(net), std::vector<double>(static_cast<std::size_t>(dim), init_log_std));
}

void NoisePolicy::set_log_std(std::span<const double> values) {
  if (values.size() != log_std_.size()) throw std::invalid_argument("NoisePolicy: log_std size mismatch");
  std::copy(values.begin(), values.end(), log_std_.begin());
  clamp();
}

void NoisePolicy::clamp() {
  for (auto& v : log_std_) {
    if (!std::isfinite(v)) throw std::domain_error("NoisePolicy: non-finite log_std");
    v = std::clamp(v, kLogStdMin, kLogStdMax);
  }
}

NoisePolicy::Sample NoisePolicy::sample(const Eigen::VectorXd& condition, Rng& rng) const {
  Sample s;
  const Eigen::VectorXd mu = mean(condition);
  s.w.resize(mu.size());
  for (Eigen::Index i = 0; i < mu.size(); ++i) s.w(i) = mu(i) + std::exp(log_std_[i]) * standard_normal(rng);
  s.log_prob = log_prob(mu, s.w);
  return s;
}

double NoisePolicy::log_prob(const Eigen::VectorXd& mean, const Eigen::VectorXd& w) const {
  double lp = 0.0;
  for (Eigen::Index i = 0; i < mean.size(); ++i) {
    const double z = (w(i) - mean(i)) * std::exp(-log_std_[i]);
    lp += -0.5 * z * z - log_std_[i];
  }
  return lp - 0.5 * static_cast<double>(mean.size()) * kLog2Pi;
}

Eigen::RowVectorXd NoisePolicy::log_prob(const Eigen::MatrixXd& means, const Eigen::MatrixXd& ws) const {
  Eigen::RowVectorXd out(means.cols());
  for (Eigen::Index j = 0; j < means.cols(); ++j) out(j) = log_prob(Eigen::VectorXd(means.col(j)), ws.col(j));
  return out;
}

double NoisePolicy::entropy() const {
  double h = 0.0;
  for (double v : log_std_) h += v;
  return h + 0.5 * static_cast<double>(log_std_.size()) * (1.0 + kLog2Pi);
}

nn::ParamGroup NoisePolicy::param_group() { return nn::ParamGroup({mean_net_.params(), log_std_}); }

ValueNet::ValueNet(nn::DenseNet net) : net_(std::move(net)) {
  if (net_.output_dim() != 1) throw std::invalid_argument("ValueNet: output must be scalar");
}

ValueNet ValueNet::create(int cond_dim, int hidden, Rng& rng) {
  return ValueNet(nn::DenseNet::glorot({cond_dim, hidden, hidden, 1}, nn::Activation::tanh, rng));
}

}  // namespace finflow::rl
