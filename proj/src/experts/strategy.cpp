#include "finflow/experts/strategy.hpp"

#include <numeric>
#include <stdexcept>

namespace finflow::experts {

std::string to_string(ExpertKind k) {
  switch (k) {
    case ExpertKind::as: return "AS";
    case ExpertKind::glft: return "GLFT";
    case ExpertKind::glft_drift: return "GLFT-drift";
    case ExpertKind::ppo: return "PPO";
    case ExpertKind::random: return "Random";
    case ExpertKind::fixed: return "Fixed";
    case ExpertKind::learned: return "Learned";
  }
  return "unknown";
}

ExpertKind expert_kind_from_string(const std::string& s) {
  for (auto k : {ExpertKind::as, ExpertKind::glft, ExpertKind::glft_drift, ExpertKind::ppo, ExpertKind::random,
                 ExpertKind::fixed, ExpertKind::learned}) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown expert kind: " + s);
}

QuoteAction ASStrategy::quote(const market::MarketState& s) {
  return as_quotes(s.inventory, std::min(s.time, p_.horizon), p_);
}

std::unique_ptr<QuotingStrategy> make_expert(ExpertKind kind, const market::ScenarioConfig& cfg) {
  switch (kind) {
    case ExpertKind::as: return std::make_unique<ASStrategy>(calibrate_as(cfg));
    case ExpertKind::glft: return std::make_unique<GLFTStrategy>(calibrate_glft(cfg));
    case ExpertKind::glft_drift: return std::make_unique<GLFTDriftStrategy>(calibrate_glft(cfg));
    case ExpertKind::random: return std::make_unique<RandomStrategy>(kDefaultRandomRange);
    case ExpertKind::fixed: {
      const double c1 = glft_c1(calibrate_glft(cfg));
      return std::make_unique<FixedStrategy>(c1, c1);
    }
    default: break;
  }
  throw std::invalid_argument("make_expert: no closed-form strategy for " + to_string(kind));
}

double EpisodeRecord::total_reward() const { return std::accumulate(rewards.begin(), rewards.end(), 0.0); }

std::vector<double> EpisodeRecord::wealth_path() const {
  std::vector<double> w;
  w.reserve(states.size());
  for (const auto& s : states) w.push_back(s.wealth());
  return w;
}

double EpisodeRecord::pnl() const { return states.back().wealth() - states.front().wealth(); }

EpisodeRecord run_episode(const market::ScenarioConfig& cfg, QuotingStrategy& strategy, std::uint64_t env_seed,
                          std::uint64_t strategy_seed) {
  market::MarketEnv env(cfg);
  EpisodeRecord rec;
  const int n = cfg.steps();
  rec.states.reserve(n + 1);
  rec.actions.reserve(n);
  rec.rewards.reserve(n);
  rec.states.push_back(env.reset(env_seed));
  strategy.begin_episode(rec.states.front(), strategy_seed);
  while (!env.done()) {
    const QuoteAction a = strategy.quote(env.state());
    const auto out = env.step(a);
    rec.actions.push_back(a);
    rec.rewards.push_back(out.reward);
    rec.bid_fills.push_back(out.bid_filled);
    rec.ask_fills.push_back(out.ask_filled);
    rec.states.push_back(out.next_state);
  }
  return rec;
}

}  // namespace finflow::experts
