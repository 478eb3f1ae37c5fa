#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "finflow/experts/strategy.hpp"

namespace finflow::data {

struct ScoreEntry {
  experts::ExpertKind kind = experts::ExpertKind::as;
  std::string name;
  double mean_score = 0.0;  // mean total episode reward
  double sharpe = 0.0;      // mean / std of episode totals; 0 when undefined
};

using Scoreboard = std::vector<ScoreEntry>;

/// Runs every candidate on the same sequence of episode seeds. Throws
/// std::logic_error on an empty candidate list or episodes < 1.
Scoreboard evaluate_candidates(const market::ScenarioConfig& scenario,
                               const std::vector<const experts::QuotingStrategy*>& candidates, int episodes,
                               std::uint64_t seed);

/// Index of the winner: highest mean score, then highest Sharpe, then the
/// earliest candidate.
std::size_t select_expert(const Scoreboard& board);

}  // namespace finflow::data
