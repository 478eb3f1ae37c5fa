#include "finflow/rl/direct_ppo.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace finflow::rl {

Eigen::VectorXd direct_condition(const market::ScenarioConfig& sc, const market::MarketState& s) {
  Eigen::VectorXd c(market::kStateDim);
  c << s.time / sc.horizon, (s.cash - sc.initial_cash) / sc.initial_price,
      static_cast<double>(s.inventory) / static_cast<double>(sc.inventory_cap),
      (s.mid_price - sc.initial_price) / sc.initial_price * 10.0, s.prev_spread;
  return c;
}

namespace {

market::QuoteAction decode_quotes(const Eigen::VectorXd& w) {
  return {std::max(0.0, w(0)), std::max(0.0, w(1))};
}

}  // namespace

ChunkActor direct_actor(const market::ScenarioConfig& scenario) {
  ChunkActor actor;
  actor.horizons = {1, 1, 1};
  actor.condition = [scenario](std::span<const market::MarketState> window) {
    return direct_condition(scenario, window.back());
  };
  actor.decode = [](const Eigen::VectorXd& w, const Eigen::VectorXd&) {
    const auto q = decode_quotes(w);
    Eigen::MatrixXd rows(1, data::kActionDim);
    rows << q.delta_bid, q.delta_ask;
    return rows;
  };
  return actor;
}

PPOHyper DirectPPOConfig::default_hyper() {
  PPOHyper h;
  h.learning_rate = 1e-3;
  h.discount = 0.9;
  h.gae_lambda = 0.8;
  h.minibatch = 200;
  return h;
}

market::QuoteAction DirectPPOPolicy::act(const market::MarketState& s) const {
  return decode_quotes(policy.mean(direct_condition(scenario, s)));
}

nn::Checkpoint DirectPPOPolicy::to_checkpoint() const {
  nn::Checkpoint ck;
  ck.add_net("ppo.mean", policy.mean_net());
  ck.add_vector("ppo.log_std", policy.log_std());
  ck.add_net("ppo.value", value.net());
  ck.metadata()["kind"] = "direct_ppo";
  ck.metadata()["scenario"] = scenario.to_keyed().to_text();
  return ck;
}

DirectPPOPolicy DirectPPOPolicy::from_checkpoint(const nn::Checkpoint& ck) {
  if (ck.metadata().value("kind", "") != "direct_ppo") throw std::runtime_error("checkpoint is not a direct PPO policy");
  DirectPPOPolicy p;
  p.scenario.apply(KeyedConfig::parse(ck.metadata().at("scenario").get<std::string>()));
  p.policy = NoisePolicy(ck.net("ppo.mean"), ck.vector("ppo.log_std"));
  p.value = ValueNet(ck.net("ppo.value"));
  if (p.policy.dim() != data::kActionDim || p.policy.condition_dim() != market::kStateDim) {
    throw std::runtime_error("direct PPO checkpoint: unexpected shape");
  }
  return p;
}

DirectPPOPolicy init_direct_ppo(const DirectPPOConfig& cfg) {
  Rng init(derive_seed(cfg.seed, {stream::init}));
  DirectPPOPolicy p;
  p.scenario = cfg.scenario;
  p.policy = NoisePolicy::create(market::kStateDim, data::kActionDim, cfg.hidden, init, cfg.init_log_std);
  auto& net = p.policy.mean_net();
  net.bias(net.num_layers() - 1).setConstant(cfg.init_spread);
  p.value = ValueNet::create(market::kStateDim, cfg.hidden, init);
  return p;
}

DirectPPOPolicy train_direct_ppo(const DirectPPOConfig& cfg, const std::function<void(const FinetuneLogRow&)>& log) {
  cfg.scenario.validate();
  cfg.hyper.validate();
  DirectPPOPolicy p = init_direct_ppo(cfg);
  const ChunkActor actor = direct_actor(cfg.scenario);
  RolloutEnvs envs(cfg.scenario, cfg.envs, derive_seed(cfg.seed, {stream::rollout}));
  PPOLearner learner(p.policy, p.value, cfg.hyper);
  Rng rng(derive_seed(cfg.seed, {stream::training}));
  for (int u = 0; u < cfg.updates; ++u) {
    RolloutBuffer buf = envs.collect(p.policy, p.value, actor, cfg.steps_per_env, static_cast<std::uint64_t>(u),
                                     cfg.hyper.discount);
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

data::StrategyFactory direct_ppo_factory(DirectPPOConfig base) {
  return [base](const market::ScenarioConfig& scenario, std::uint64_t seed) {
    DirectPPOConfig cfg = base;
    cfg.scenario = scenario;
    cfg.seed = seed;
    auto policy = std::make_shared<const DirectPPOPolicy>(train_direct_ppo(cfg));
    return std::unique_ptr<experts::QuotingStrategy>(std::make_unique<DirectPPOStrategy>(policy));
  };
}

}  // namespace finflow::rl
