#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "finflow/experts/experts.hpp"
#include "finflow/market/market_env.hpp"

namespace finflow::experts {

enum class ExpertKind : std::uint16_t { as = 0, glft = 1, glft_drift = 2, ppo = 3, random = 4, fixed = 5, learned = 6 };

std::string to_string(ExpertKind k);
ExpertKind expert_kind_from_string(const std::string& s);

/// Anything that can quote in the market environment. Instances carry
/// per-episode state, so parallel callers clone() one per worker.
class QuotingStrategy {
 public:
  virtual ~QuotingStrategy() = default;
  virtual std::string name() const = 0;
  virtual ExpertKind kind() const = 0;
  virtual std::unique_ptr<QuotingStrategy> clone() const = 0;
  /// Called after reset with the initial state; `seed` drives any
  /// strategy-side randomness for this episode.
  virtual void begin_episode(const market::MarketState& initial, std::uint64_t seed) {
    (void)initial;
    (void)seed;
  }
  virtual QuoteAction quote(const market::MarketState& state) = 0;
};

class ASStrategy final : public QuotingStrategy {
 public:
  explicit ASStrategy(ASParams p) : p_(p) {}
  std::string name() const override { return "AS"; }
  ExpertKind kind() const override { return ExpertKind::as; }
  std::unique_ptr<QuotingStrategy> clone() const override { return std::make_unique<ASStrategy>(*this); }
  QuoteAction quote(const market::MarketState& s) override;

 private:
  ASParams p_;
};

class GLFTStrategy final : public QuotingStrategy {
 public:
  explicit GLFTStrategy(GLFTParams p) : p_(p) {}
  std::string name() const override { return "GLFT"; }
  ExpertKind kind() const override { return ExpertKind::glft; }
  std::unique_ptr<QuotingStrategy> clone() const override { return std::make_unique<GLFTStrategy>(*this); }
  QuoteAction quote(const market::MarketState& s) override { return glft_quotes(s.inventory, p_); }

 private:
  GLFTParams p_;
};

class GLFTDriftStrategy final : public QuotingStrategy {
 public:
  explicit GLFTDriftStrategy(GLFTParams p) : p_(p) {}
  std::string name() const override { return "GLFT-drift"; }
  ExpertKind kind() const override { return ExpertKind::glft_drift; }
  std::unique_ptr<QuotingStrategy> clone() const override { return std::make_unique<GLFTDriftStrategy>(*this); }
  QuoteAction quote(const market::MarketState& s) override { return glft_drift_quotes(s.inventory, p_); }

 private:
  GLFTParams p_;
};

class RandomStrategy final : public QuotingStrategy {
 public:
  explicit RandomStrategy(double range) : range_(range) {}
  std::string name() const override { return "Random"; }
  ExpertKind kind() const override { return ExpertKind::random; }
  std::unique_ptr<QuotingStrategy> clone() const override { return std::make_unique<RandomStrategy>(*this); }
  void begin_episode(const market::MarketState&, std::uint64_t seed) override { rng_.seed(seed); }
  QuoteAction quote(const market::MarketState&) override { return random_quotes(rng_, range_); }

 private:
  double range_;
  Rng rng_;
};

/// Constant symmetric quote; a test fixture and sanity baseline.
class FixedStrategy final : public QuotingStrategy {
 public:
  FixedStrategy(double bid, double ask) : action_{bid, ask} {}
  std::string name() const override { return "Fixed"; }
  ExpertKind kind() const override { return ExpertKind::fixed; }
  std::unique_ptr<QuotingStrategy> clone() const override { return std::make_unique<FixedStrategy>(*this); }
  QuoteAction quote(const market::MarketState&) override { return action_; }

 private:
  QuoteAction action_;
};

/// Range of the uniform random baseline. Spreads this wide leave most quotes
/// far from the fill-efficient region, matching the magnitude of the
/// published random-action row.
inline constexpr double kDefaultRandomRange = 20.0;

/// Closed-form teacher calibrated to `cfg` (as, glft, glft_drift, random, fixed).
std::unique_ptr<QuotingStrategy> make_expert(ExpertKind kind, const market::ScenarioConfig& cfg);

/// Everything observed while a strategy plays one episode.
struct EpisodeRecord {
  std::vector<market::MarketState> states;  // s_0 .. s_N
  std::vector<QuoteAction> actions;         // a_0 .. a_{N-1}
  std::vector<double> rewards;
  std::vector<bool> bid_fills;
  std::vector<bool> ask_fills;

  double total_reward() const;
  std::vector<double> wealth_path() const;
  double pnl() const;
};

/// Plays a full episode. Environment randomness is derived from `env_seed`,
/// strategy randomness from `strategy_seed`.
EpisodeRecord run_episode(const market::ScenarioConfig& cfg, QuotingStrategy& strategy, std::uint64_t env_seed,
                          std::uint64_t strategy_seed);

}  // namespace finflow::experts
