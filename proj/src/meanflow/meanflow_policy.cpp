#include "finflow/meanflow/meanflow_policy.hpp"

#include <stdexcept>

namespace finflow::meanflow {

Eigen::MatrixXd MeanFlowPolicy::generate_chunk(const Eigen::VectorXd& w, const Eigen::VectorXd& condition) const {
  const Eigen::VectorXd a = generate_normalized(net, w, condition);
  Eigen::MatrixXd chunk(horizons.pred, data::kActionDim);
  for (int j = 0; j < horizons.pred; ++j) {
    for (int d = 0; d < data::kActionDim; ++d) chunk(j, d) = stats.unnormalize_action(d, a(j * data::kActionDim + d));
  }
  return chunk;
}

Eigen::MatrixXd MeanFlowPolicy::exec_slice(const Eigen::MatrixXd& chunk) const {
  return chunk.middleRows(horizons.exec_offset(), horizons.exec);
}

nn::Checkpoint MeanFlowPolicy::to_checkpoint() const {
  nn::Checkpoint ck;
  ck.add_net("velocity.embed", net.embed());
  ck.add_net("velocity.film", net.film().condition_net());
  ck.add_net("velocity.trunk", net.trunk());
  if (net.has_skip()) ck.add_net("velocity.skip", net.skip());
  auto& meta = ck.metadata();
  meta["kind"] = "meanflow";
  meta["film_time"] = net.film_time();
  meta["horizons"] = {{"obs", horizons.obs}, {"pred", horizons.pred}, {"exec", horizons.exec}};
  meta["stats"] = stats.to_json();
  return ck;
}

MeanFlowPolicy MeanFlowPolicy::from_checkpoint(const nn::Checkpoint& ck) {
  const auto& meta = ck.metadata();
  if (meta.value("kind", "") != "meanflow") throw std::runtime_error("checkpoint is not a MeanFlow policy");
  MeanFlowPolicy p;
  p.net = VelocityNet(ck.net("velocity.embed"), nn::FiLMLayer(ck.net("velocity.film")), ck.net("velocity.trunk"),
                      ck.has("velocity.skip") ? ck.net("velocity.skip") : nn::DenseNet{},
                      meta.value("film_time", false));
  p.horizons.obs = meta.at("horizons").at("obs").get<int>();
  p.horizons.pred = meta.at("horizons").at("pred").get<int>();
  p.horizons.exec = meta.at("horizons").at("exec").get<int>();
  p.horizons.validate();
  p.stats = data::NormStats::from_json(meta.at("stats"));
  if (p.net.action_dim() != p.horizons.noise_dim() || p.net.condition_dim() != p.horizons.condition_dim()) {
    throw std::runtime_error("MeanFlow checkpoint: network shape disagrees with horizons");
  }
  return p;
}

void MeanFlowPolicy::save(const std::string& path) const { to_checkpoint().save(path); }

MeanFlowPolicy MeanFlowPolicy::load(const std::string& path) { return from_checkpoint(nn::Checkpoint::load(path)); }

std::string MeanFlowPolicy::parameter_hash() const { return to_checkpoint().parameter_hash(); }

void ChunkedStrategy::begin_episode(const market::MarketState& initial, std::uint64_t seed) {
  window_.assign(static_cast<std::size_t>(horizons_.obs), initial);
  queue_.clear();
  reset_episode(seed);
}

experts::QuoteAction ChunkedStrategy::quote(const market::MarketState& state) {
  if (window_.empty()) {
    window_.assign(static_cast<std::size_t>(horizons_.obs), state);
  } else {
    window_.erase(window_.begin());
    window_.push_back(state);
  }
  if (queue_.empty()) {
    const Eigen::MatrixXd rows = plan(window_);
    for (Eigen::Index i = 0; i < rows.rows(); ++i) queue_.push_back({rows(i, 0), rows(i, 1)});
    if (queue_.empty()) throw std::logic_error("ChunkedStrategy: plan returned no actions");
  }
  const auto a = queue_.front();
  queue_.pop_front();
  return a;
}

PretrainedStrategy::PretrainedStrategy(std::shared_ptr<const MeanFlowPolicy> policy)
    : ChunkedStrategy(policy->horizons), policy_(std::move(policy)) {}

Eigen::MatrixXd PretrainedStrategy::plan(std::span<const market::MarketState> window) {
  Eigen::VectorXd w(policy_->horizons.noise_dim());
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = standard_normal(rng_);
  return policy_->exec_slice(policy_->generate_chunk(w, policy_->condition(window)));
}

MeanFlowPolicy pretrain(const data::Dataset& ds, const PretrainConfig& cfg, const LossLogger& log) {
  if (ds.records.empty()) throw std::invalid_argument("pretrain: empty dataset");
  ds.horizons.validate();
  VelocityNetConfig ncfg = cfg.net;
  ncfg.action_dim = ds.horizons.noise_dim();
  ncfg.condition_dim = ds.horizons.condition_dim();
  Rng init(derive_seed(cfg.seed, {stream::init}));
  MeanFlowPolicy policy{VelocityNet::create(ncfg, init), ds.stats, ds.horizons};
  Trainer trainer(policy.net, cfg.train);
  Rng rng(derive_seed(cfg.seed, {stream::training}));
  std::uniform_int_distribution<std::size_t> pick(0, ds.records.size() - 1);
  const int bsz = cfg.train.batch_size;
  Eigen::MatrixXd conds(ncfg.condition_dim, bsz), acts(ncfg.action_dim, bsz);
  double acc = 0.0;
  int acc_n = 0;
  for (int step = 1; step <= cfg.steps; ++step) {
    if (cfg.cosine_decay) trainer.set_learning_rate(cosine_learning_rate(cfg.train.learning_rate, step - 1, cfg.steps));
    for (int j = 0; j < bsz; ++j) {
      const auto& rec = ds.records[pick(rng)];
      conds.col(j) = ds.stats.condition(std::span<const double>(rec.window));
      acts.col(j) = Eigen::Map<const Eigen::VectorXd>(rec.chunk.data(), static_cast<Eigen::Index>(rec.chunk.size()));
    }
    acc += trainer.step(conds, acts, rng);
    ++acc_n;
    if (log && cfg.log_every > 0 && (step % cfg.log_every == 0 || step == cfg.steps)) {
      log(step, acc / acc_n);
      acc = 0.0;
      acc_n = 0;
    }
  }
  policy.net = trainer.averaged();
  return policy;
}

}  // namespace finflow::meanflow
