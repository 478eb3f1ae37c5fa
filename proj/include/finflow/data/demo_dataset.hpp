#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "finflow/data/scenario_grid.hpp"
#include "finflow/data/tournament.hpp"
#include "finflow/experts/strategy.hpp"
#include "finflow/market/market_env.hpp"

namespace finflow::data {

inline constexpr int kActionDim = 2;

/// Observation window length, generated chunk length, executed slice length.
struct Horizons {
  int obs = 2;
  int pred = 16;
  int exec = 8;

  int condition_dim() const { return obs * market::kStateDim; }
  int noise_dim() const { return pred * kActionDim; }
  /// First executed chunk row: the row aligned with the newest observation.
  int exec_offset() const { return obs - 1; }
  void validate() const;
  bool operator==(const Horizons&) const = default;
};

/// Normalization shared by the dataset and every checkpoint built from it.
/// Actions map linearly from [act_min, act_max] onto [-1, 1]; observations
/// are standardized with dataset moments (min/max kept for reference).
struct NormStats {
  std::array<double, market::kStateDim> obs_min{};
  std::array<double, market::kStateDim> obs_max{};
  std::array<double, market::kStateDim> obs_mean{};
  std::array<double, market::kStateDim> obs_std{1, 1, 1, 1, 1};
  std::array<double, kActionDim> act_min{};
  std::array<double, kActionDim> act_max{1, 1};

  double normalize_action(int dim, double value) const;
  double unnormalize_action(int dim, double value) const;

  /// Flattened, standardized window (oldest state first).
  Eigen::VectorXd condition(std::span<const double> raw_window) const;
  Eigen::VectorXd condition(std::span<const market::MarketState> window) const;

  nlohmann::json to_json() const;
  static NormStats from_json(const nlohmann::json& j);
  bool operator==(const NormStats&) const = default;
};

/// One teacher demonstration before normalization.
struct Demonstration {
  std::vector<double> window;  // obs x 5, oldest first
  std::vector<double> chunk;   // pred x 2 raw spreads (bid, ask per row)
  std::uint16_t scenario_id = 0;
  experts::ExpertKind expert = experts::ExpertKind::as;
};

struct DemoRecord {
  std::vector<double> window;  // obs x 5 raw states, oldest first
  std::vector<double> chunk;   // pred x 2 normalized into [-1, 1]
  std::uint16_t scenario_id = 0;
  experts::ExpertKind expert = experts::ExpertKind::as;
  bool operator==(const DemoRecord&) const = default;
};

struct ScenarioSummary {
  int id = 0;
  market::ScenarioConfig config;
  Scoreboard board;
  experts::ExpertKind winner = experts::ExpertKind::as;
  std::size_t records = 0;
};

struct Dataset {
  static constexpr int kVersion = 1;
  Horizons horizons;
  NormStats stats;
  std::vector<DemoRecord> records;
  std::vector<ScenarioSummary> scenarios;
};

/// Rolls `expert` through `episodes` episodes and emits one demonstration
/// per environment step. Chunk row j holds the teacher action at step
/// t - (obs - 1) + j, so the executed slice starting at row obs - 1 lines
/// up with the current step; indices outside the episode repeat the first
/// or last action.
std::vector<Demonstration> collect_demonstrations(const market::ScenarioConfig& scenario,
                                                  const experts::QuotingStrategy& expert, int scenario_id,
                                                  int episodes, std::uint64_t seed, const Horizons& horizons);

/// Builds NormStats from the demonstrations and normalizes their chunks.
Dataset finalize_dataset(std::vector<Demonstration> demos, const Horizons& horizons);

/// Factory for a learned teacher (direct-action PPO) trained on a scenario.
using StrategyFactory =
    std::function<std::unique_ptr<experts::QuotingStrategy>(const market::ScenarioConfig&, std::uint64_t seed)>;

struct GenDataConfig {
  GridAxes axes;
  market::ScenarioConfig base = grid_base();
  int episodes = 100;             // demonstration episodes per scenario
  int tournament_episodes = 100;  // episodes per candidate when picking the teacher
  std::vector<experts::ExpertKind> candidates{experts::ExpertKind::as, experts::ExpertKind::glft,
                                              experts::ExpertKind::glft_drift};
  StrategyFactory ppo_factory;  // set to add the PPO candidate
  Horizons horizons;
  std::uint64_t seed = 0;
};

/// Grid -> tournament per scenario -> demonstrations from each winner.
Dataset generate_dataset(const GenDataConfig& config);

/// Winner table: scenario_id, drift, volatility, jump_intensity, dt,
/// liquidity, winner, then one mean-score column per candidate.
void write_winner_csv(std::ostream& out, const std::vector<ScenarioSummary>& scenarios);

void save_dataset(const Dataset& ds, std::ostream& out);
void save_dataset(const Dataset& ds, const std::string& path);
/// Throws std::runtime_error on version mismatch, truncation or corruption.
Dataset load_dataset(std::istream& in);
Dataset load_dataset(const std::string& path);

}  // namespace finflow::data
