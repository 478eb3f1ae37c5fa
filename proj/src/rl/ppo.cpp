#include "finflow/rl/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <stdexcept>

namespace finflow::rl {

void PPOHyper::validate() const {
  if (!(clip > 0.0 && clip < 1.0)) throw std::invalid_argument("ppo: clip must lie in (0, 1)");
  if (discount < 0.0 || discount > 1.0) throw std::invalid_argument("ppo: discount must lie in [0, 1]");
  if (gae_lambda < 0.0 || gae_lambda > 1.0) throw std::invalid_argument("ppo: gae_lambda must lie in [0, 1]");
  if (epochs < 1 || minibatch < 1) throw std::invalid_argument("ppo: epochs and minibatch must be positive");
  if (!(learning_rate >= 0.0)) throw std::invalid_argument("ppo: learning_rate must be nonnegative");
}

void RolloutBuffer::clear() {
  transitions.clear();
  segments.clear();
  advantages.clear();
  returns.clear();
  episode_rewards.clear();
}

double RolloutBuffer::mean_reward() const {
  if (transitions.empty()) return 0.0;
  double s = 0.0;
  for (const auto& t : transitions) s += t.reward;
  return s / static_cast<double>(transitions.size());
}

void gae(const std::vector<double>& rewards, const std::vector<double>& values, const std::vector<bool>& dones,
         double bootstrap_value, double discount, double lambda, std::vector<double>& advantages,
         std::vector<double>& returns) {
  const std::size_t n = rewards.size();
  if (values.size() != n || dones.size() != n) throw std::invalid_argument("gae: length mismatch");
  advantages.assign(n, 0.0);
  returns.assign(n, 0.0);
  double next_adv = 0.0;
  double next_value = bootstrap_value;
  for (std::size_t k = n; k-- > 0;) {
    const double live = dones[k] ? 0.0 : 1.0;
    const double delta = rewards[k] + discount * next_value * live - values[k];
    next_adv = delta + discount * lambda * live * next_adv;
    advantages[k] = next_adv;
    returns[k] = next_adv + values[k];
    next_value = values[k];
  }
}

void compute_advantages(RolloutBuffer& buffer, double discount, double lambda) {
  const std::size_t n = buffer.transitions.size();
  buffer.advantages.assign(n, 0.0);
  buffer.returns.assign(n, 0.0);
  std::vector<double> r, v, adv, ret;
  std::vector<bool> d;
  for (const auto& seg : buffer.segments) {
    r.clear();
    v.clear();
    d.clear();
    for (std::size_t i = seg.begin; i < seg.end; ++i) {
      r.push_back(buffer.transitions[i].reward);
      v.push_back(buffer.transitions[i].value);
      d.push_back(buffer.transitions[i].done);
    }
    gae(r, v, d, seg.bootstrap_value, discount, lambda, adv, ret);
    std::copy(adv.begin(), adv.end(), buffer.advantages.begin() + static_cast<std::ptrdiff_t>(seg.begin));
    std::copy(ret.begin(), ret.end(), buffer.returns.begin() + static_cast<std::ptrdiff_t>(seg.begin));
  }
}

void normalize_advantages(std::vector<double>& advantages) {
  if (advantages.empty()) return;
  const double n = static_cast<double>(advantages.size());
  const double mean = std::accumulate(advantages.begin(), advantages.end(), 0.0) / n;
  double var = 0.0;
  for (double a : advantages) var += (a - mean) * (a - mean);
  const double sd = std::sqrt(var / n);
  for (double& a : advantages) a = sd > 1e-12 ? (a - mean) / sd : a - mean;
}

double clipped_surrogate(const Eigen::RowVectorXd& ratio, const Eigen::RowVectorXd& advantages, double clip,
                         Eigen::RowVectorXd* d_logp, int* clipped) {
  const Eigen::Index n = ratio.size();
  double total = 0.0;
  int count = 0;
  if (d_logp) d_logp->setZero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = ratio(i), a = advantages(i);
    const double rc = std::clamp(r, 1.0 - clip, 1.0 + clip);
    const double plain = r * a, limited = rc * a;
    if (std::abs(r - 1.0) > clip) ++count;
    if (plain <= limited) {
      total -= plain;
      // d(-r A)/d logp = -r A
      if (d_logp) (*d_logp)(i) = -plain / static_cast<double>(n);
    } else {
      total -= limited;  // constant in the parameters
    }
  }
  if (clipped) *clipped = count;
  return total / static_cast<double>(n);
}

PPOLearner::PPOLearner(NoisePolicy& policy, ValueNet& value, PPOHyper hyper)
    : policy_(policy), value_(value), hyper_(hyper) {
  hyper_.validate();
  const std::size_t n = policy_.param_group().size() + value_.net().num_params();
  adam_ = nn::Adam(n, nn::AdamConfig{hyper_.learning_rate});
}

PPODiagnostics PPOLearner::update(RolloutBuffer& buffer, Rng& rng) {
  PPODiagnostics diag;
  const std::size_t n = buffer.transitions.size();
  if (n == 0) return diag;
  if (buffer.advantages.size() != n || buffer.returns.size() != n) {
    throw std::logic_error("ppo_update: advantages have not been computed");
  }
  normalize_advantages(buffer.advantages);

  const int cdim = policy_.condition_dim(), dim = policy_.dim();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  int clipped_total = 0, counted = 0;
  double kl_total = 0.0;

  for (int epoch = 0; epoch < hyper_.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(hyper_.minibatch)) {
      const std::size_t stop = std::min(n, start + static_cast<std::size_t>(hyper_.minibatch));
      const Eigen::Index b = static_cast<Eigen::Index>(stop - start);
      Eigen::MatrixXd cond(cdim, b), w(dim, b);
      Eigen::RowVectorXd old_logp(b), adv(b), ret(b);
      for (Eigen::Index j = 0; j < b; ++j) {
        const auto& t = buffer.transitions[order[start + static_cast<std::size_t>(j)]];
        cond.col(j) = t.condition;
        w.col(j) = t.w;
        old_logp(j) = t.log_prob;
        adv(j) = buffer.advantages[order[start + static_cast<std::size_t>(j)]];
        ret(j) = buffer.returns[order[start + static_cast<std::size_t>(j)]];
      }
      nn::Tape ptape, vtape;
      const Eigen::MatrixXd mu = policy_.mean_net().forward(cond, &ptape);
      const Eigen::RowVectorXd logp = policy_.log_prob(mu, w);
      const Eigen::RowVectorXd ratio = (logp - old_logp).array().exp();
      if (!ratio.allFinite()) {
        ++diag.skipped;
        std::cerr << "ppo: non-finite ratio, minibatch skipped\n";
        continue;
      }
      Eigen::RowVectorXd d_logp;
      int clipped = 0;
      const double surrogate = clipped_surrogate(ratio, adv, hyper_.clip, &d_logp, &clipped);
      const Eigen::MatrixXd v = value_.net().forward(cond, &vtape);
      const Eigen::RowVectorXd verr = v.row(0) - ret;
      const double value_loss = verr.squaredNorm() / static_cast<double>(b);
      const double entropy = policy_.entropy();

      auto pgroup = policy_.param_group();
      std::vector<double> grad(pgroup.size() + value_.net().num_params(), 0.0);
      std::span<double> gspan(grad);
      const auto log_std = policy_.log_std();
      Eigen::MatrixXd dmu(dim, b);
      std::span<double> g_log_std = pgroup.slice(gspan.first(pgroup.size()), 1);
      for (Eigen::Index j = 0; j < b; ++j) {
        for (int i = 0; i < dim; ++i) {
          const double inv_var = std::exp(-2.0 * log_std[i]);
          const double diff = w(i, j) - mu(i, j);
          dmu(i, j) = d_logp(j) * diff * inv_var;
          g_log_std[i] += d_logp(j) * (diff * diff * inv_var - 1.0);
        }
      }
      for (int i = 0; i < dim; ++i) g_log_std[i] -= hyper_.entropy_coeff;
      policy_.mean_net().backward(ptape, dmu, pgroup.slice(gspan.first(pgroup.size()), 0));
      const Eigen::MatrixXd dv = (hyper_.value_coeff * 2.0 / static_cast<double>(b)) * verr;
      value_.net().backward(vtape, dv, gspan.subspan(pgroup.size()));

      nn::ParamGroup all({policy_.mean_net().params(), pgroup.parts()[1], value_.net().params()});
      try {
        nn::adam_step(adam_, all, grad);
      } catch (const std::domain_error&) {
        ++diag.skipped;
        std::cerr << "ppo: non-finite gradient, minibatch skipped\n";
        continue;
      }
      policy_.clamp();

      diag.surrogate += surrogate;
      diag.value_loss += value_loss;
      diag.entropy += entropy;
      kl_total += (old_logp - logp).sum();
      clipped_total += clipped;
      counted += static_cast<int>(b);
      ++diag.minibatches;
    }
  }
  if (diag.minibatches > 0) {
    diag.surrogate /= diag.minibatches;
    diag.value_loss /= diag.minibatches;
    diag.entropy /= diag.minibatches;
  }
  if (counted > 0) {
    diag.clip_fraction = static_cast<double>(clipped_total) / counted;
    diag.approx_kl = kl_total / counted;
  }
  return diag;
}

}  // namespace finflow::rl
