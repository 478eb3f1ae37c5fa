#include "finflow/rl/rollout.hpp"

#include <stdexcept>

#include "finflow/common/parallel.hpp"

namespace finflow::rl {

RolloutEnvs::RolloutEnvs(const market::ScenarioConfig& scenario, int count, std::uint64_t seed)
    : scenario_(scenario), seed_(seed) {
  if (count < 1) throw std::invalid_argument("RolloutEnvs: need at least one environment");
  slots_.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    slots_.push_back(Slot{market::MarketEnv(scenario), {}, 0, 0.0});
  }
}

void RolloutEnvs::start_episode(Slot& slot, std::size_t index) {
  slot.env.reset(derive_seed(seed_, {stream::episode, index, slot.episodes}));
  ++slot.episodes;
  slot.episode_reward = 0.0;
  slot.window.clear();
}

RolloutBuffer RolloutEnvs::collect(const NoisePolicy& policy, const ValueNet& value, const ChunkActor& actor,
                                   int chunks_per_env, std::uint64_t iteration, double discount,
                                   ChunkReward reward_mode) {
  if (policy.dim() != actor.horizons.noise_dim()) {
    throw std::invalid_argument("collect: policy dimension does not match the actor's horizons");
  }
  const std::size_t n = slots_.size();
  std::vector<std::vector<Transition>> per_env(n);
  std::vector<std::vector<double>> finished(n);
  std::vector<double> bootstrap(n, 0.0);
  parallel_for(n, [&](std::size_t e) {
    Slot& slot = slots_[e];
    Rng rng(derive_seed(seed_, {stream::rollout, e, iteration}));
    auto& out = per_env[e];
    out.reserve(static_cast<std::size_t>(chunks_per_env));
    for (int c = 0; c < chunks_per_env; ++c) {
      if (slot.window.empty() || slot.env.done()) {
        start_episode(slot, e);
        slot.window.assign(static_cast<std::size_t>(actor.horizons.obs), slot.env.state());
      }
      Transition t;
      t.condition = actor.condition(slot.window);
      const auto sample = policy.sample(t.condition, rng);
      t.w = sample.w;
      t.log_prob = sample.log_prob;
      t.value = value.value(t.condition);
      const Eigen::MatrixXd rows = actor.decode(t.w, t.condition);
      double scale = 1.0;
      for (Eigen::Index k = 0; k < rows.rows() && !slot.env.done(); ++k) {
        const auto step = slot.env.step({rows(k, 0), rows(k, 1)});
        t.reward += scale * step.reward;
        if (reward_mode == ChunkReward::discounted) scale *= discount;
        slot.episode_reward += step.reward;
        slot.window.erase(slot.window.begin());
        slot.window.push_back(step.next_state);
      }
      t.done = slot.env.done();
      if (t.done) finished[e].push_back(slot.episode_reward);
      out.push_back(std::move(t));
    }
    if (!slot.env.done()) bootstrap[e] = value.value(actor.condition(slot.window));
  });
  RolloutBuffer buf;
  for (std::size_t e = 0; e < n; ++e) {
    Segment seg;
    seg.begin = buf.transitions.size();
    for (auto& t : per_env[e]) buf.transitions.push_back(std::move(t));
    seg.end = buf.transitions.size();
    seg.bootstrap_value = bootstrap[e];
    buf.segments.push_back(seg);
    buf.episode_rewards.insert(buf.episode_rewards.end(), finished[e].begin(), finished[e].end());
  }
  return buf;
}

}  // namespace finflow::rl
