#include "finflow/rl/finetune.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "finflow/common/keyed_config.hpp"

namespace finflow::rl {

ChunkActor flow_actor(std::shared_ptr<const meanflow::MeanFlowPolicy> expert) {
  ChunkActor actor;
  actor.horizons = expert->horizons;
  actor.condition = [expert](std::span<const market::MarketState> window) { return expert->condition(window); };
  actor.decode = [expert](const Eigen::VectorXd& w, const Eigen::VectorXd& cond) {
    return expert->exec_slice(expert->generate_chunk(w, cond));
  };
  return actor;
}

Eigen::MatrixXd FineTunedPolicy::infer_chunk(std::span<const market::MarketState> window) const {
  const Eigen::VectorXd cond = expert->condition(window);
  return expert->exec_slice(expert->generate_chunk(policy.mean(cond), cond));
}

std::size_t FineTunedPolicy::trainable_parameters() const {
  return policy.mean_net().num_params() + policy.log_std().size() + value.net().num_params();
}

nn::Checkpoint FineTunedPolicy::to_checkpoint() const {
  nn::Checkpoint ck;
  ck.add_net("noise.mean", policy.mean_net());
  ck.add_vector("noise.log_std", policy.log_std());
  ck.add_net("value", value.net());
  auto& meta = ck.metadata();
  meta["kind"] = "finetune";
  meta["expert_hash"] = expert_hash;
  meta["horizons"] = {{"obs", expert->horizons.obs}, {"pred", expert->horizons.pred}, {"exec", expert->horizons.exec}};
  meta["stats"] = expert->stats.to_json();
  return ck;
}

void FineTunedPolicy::save(const std::string& path) const { to_checkpoint().save(path); }

FineTunedPolicy FineTunedPolicy::from_checkpoint(const nn::Checkpoint& ck,
                                                 std::shared_ptr<const meanflow::MeanFlowPolicy> expert) {
  const auto& meta = ck.metadata();
  if (meta.value("kind", "") != "finetune") throw std::runtime_error("checkpoint is not a fine-tuned policy");
  const std::string recorded = meta.at("expert_hash").get<std::string>();
  const std::string actual = expert->parameter_hash();
  if (recorded != actual) {
    throw std::runtime_error("expert hash mismatch: checkpoint expects " + recorded + ", got " + actual);
  }
  FineTunedPolicy p;
  p.expert = std::move(expert);
  p.policy = NoisePolicy(ck.net("noise.mean"), ck.vector("noise.log_std"));
  p.value = ValueNet(ck.net("value"));
  p.expert_hash = recorded;
  if (p.policy.dim() != p.expert->horizons.noise_dim() ||
      p.policy.condition_dim() != p.expert->horizons.condition_dim()) {
    throw std::runtime_error("fine-tune checkpoint: policy shape disagrees with the expert");
  }
  return p;
}

FineTunedPolicy FineTunedPolicy::load(const std::string& path,
                                      std::shared_ptr<const meanflow::MeanFlowPolicy> expert) {
  return from_checkpoint(nn::Checkpoint::load(path), std::move(expert));
}

void write_finetune_log_header(std::ostream& out) {
  out << "update,mean_r_total,mean_episode_reward,surrogate_loss,value_loss,entropy,clip_fraction,approx_kl,skipped\n";
}

void write_finetune_log_row(std::ostream& out, const FinetuneLogRow& row) {
  out << row.update << ',' << format_double(row.mean_chunk_reward) << ',' << format_double(row.mean_episode_reward)
      << ',' << format_double(row.diag.surrogate) << ',' << format_double(row.diag.value_loss) << ','
      << format_double(row.diag.entropy) << ',' << format_double(row.diag.clip_fraction) << ','
      << format_double(row.diag.approx_kl) << ',' << row.diag.skipped << '\n';
}

FineTunedPolicy init_finetune(std::shared_ptr<const meanflow::MeanFlowPolicy> expert, const FinetuneConfig& cfg) {
  FineTunedPolicy p;
  p.expert = expert;
  p.expert_hash = expert->parameter_hash();
  Rng init(derive_seed(cfg.seed, {stream::init}));
  p.policy = NoisePolicy::create(expert->horizons.condition_dim(), expert->horizons.noise_dim(), cfg.policy_hidden,
                                 init, cfg.init_log_std);
  p.value = ValueNet::create(expert->horizons.condition_dim(), cfg.value_hidden, init);
  return p;
}

FineTunedPolicy finetune(std::shared_ptr<const meanflow::MeanFlowPolicy> expert, const FinetuneConfig& cfg,
                         const std::function<void(const FinetuneLogRow&)>& log) {
  cfg.hyper.validate();
  FineTunedPolicy p = init_finetune(expert, cfg);
  const ChunkActor actor = flow_actor(expert);
  RolloutEnvs envs(cfg.scenario, cfg.envs, derive_seed(cfg.seed, {stream::rollout}));
  PPOLearner learner(p.policy, p.value, cfg.hyper);
  Rng rng(derive_seed(cfg.seed, {stream::training}));
  for (int u = 0; u < cfg.updates; ++u) {
    RolloutBuffer buf = envs.collect(p.policy, p.value, actor, cfg.chunks_per_env, static_cast<std::uint64_t>(u),
                                     cfg.hyper.discount, cfg.reward_mode);
    compute_advantages(buf, cfg.hyper.discount, cfg.hyper.gae_lambda);
    FinetuneLogRow row;
    row.update = u;
    row.mean_chunk_reward = buf.mean_reward();
    row.mean_episode_reward = std::numeric_limits<double>::quiet_NaN();
    if (!buf.episode_rewards.empty()) {
      double s = 0.0;
      for (double r : buf.episode_rewards) s += r;
      row.mean_episode_reward = s / static_cast<double>(buf.episode_rewards.size());
    }
    row.diag = learner.update(buf, rng);
    if (log) log(row);
  }
  return p;
}

FineTunedStrategy::FineTunedStrategy(std::shared_ptr<const FineTunedPolicy> policy)
    : ChunkedStrategy(policy->expert->horizons), policy_(std::move(policy)) {}

}  // namespace finflow::rl
