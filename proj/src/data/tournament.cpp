#include "finflow/data/tournament.hpp"

#include <stdexcept>

#include "finflow/eval/metrics.hpp"

namespace finflow::data {

Scoreboard evaluate_candidates(const market::ScenarioConfig& scenario,
                               const std::vector<const experts::QuotingStrategy*>& candidates, int episodes,
                               std::uint64_t seed) {
  if (candidates.empty()) throw std::logic_error("evaluate_candidates: no candidates");
  if (episodes < 1) throw std::logic_error("evaluate_candidates: episodes must be >= 1");
  Scoreboard board;
  for (const auto* candidate : candidates) {
    auto player = candidate->clone();
    std::vector<double> totals;
    totals.reserve(episodes);
    for (int e = 0; e < episodes; ++e) {
      const auto rec = experts::run_episode(scenario, *player, derive_seed(seed, {stream::episode, std::uint64_t(e)}),
                                            derive_seed(seed, {stream::strategy, std::uint64_t(e)}));
      totals.push_back(rec.total_reward());
    }
    ScoreEntry entry;
    entry.kind = candidate->kind();
    entry.name = candidate->name();
    entry.mean_score = eval::mean(totals);
    try {
      entry.sharpe = eval::sharpe(totals);
    } catch (const std::exception&) {
      entry.sharpe = 0.0;
    }
    board.push_back(entry);
  }
  return board;
}

std::size_t select_expert(const Scoreboard& board) {
  if (board.empty()) throw std::logic_error("select_expert: empty scoreboard");
  std::size_t best = 0;
  for (std::size_t i = 1; i < board.size(); ++i) {
    const auto& c = board[i];
    const auto& b = board[best];
    if (c.mean_score > b.mean_score || (c.mean_score == b.mean_score && c.sharpe > b.sharpe)) best = i;
  }
  return best;
}

}  // namespace finflow::data
