#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "finflow/experts/strategy.hpp"
#include "finflow/market/scenario.hpp"

namespace finflow::eval {

/// Volatility (High/Low) x order-arrival intensity (High/Low).
enum class Mode { HH, HL, LH, LL };

std::string to_string(Mode m);
/// Throws std::invalid_argument for anything but HH, HL, LH, LL.
Mode mode_from_string(const std::string& s);
std::vector<Mode> all_modes();

/// sigma in {0.25, 0.02}, base intensity in {50, 25}; mu = 0, T = 1,
/// dt = 0.01, H = 0.5, Q_max = 10, penalty 0.1, excitation 0.7 / 0.3,
/// decay 0.1, spread sensitivity 1.5.
market::ScenarioConfig mode_scenario(Mode m);

struct EpisodeResult {
  std::vector<double> wealth;  // W_0 .. W_N
  std::vector<double> returns;
  double pnl = 0.0;            // W_N - W_0
};

EpisodeResult to_episode_result(const experts::EpisodeRecord& rec);

/// A named way to obtain a strategy for a mode (closed-form experts are
/// calibrated to the mode; learned policies ignore it).
struct Contender {
  std::string name;
  std::function<std::unique_ptr<experts::QuotingStrategy>(const market::ScenarioConfig&)> make;
};

Contender expert_contender(experts::ExpertKind kind);
Contender fixed_contender(std::string name, std::shared_ptr<const experts::QuotingStrategy> prototype);

struct CellReport {
  std::string mode;
  std::string strategy;
  double mean_pnl = 0.0;
  double sharpe = 0.0;  // NaN when per-episode PnL has no dispersion
  double mdd_percent = 0.0;
  int episodes = 0;
  std::uint64_t seed = 0;
};

struct BenchmarkReport {
  std::vector<CellReport> cells;  // mode-major, contenders in input order
  const CellReport& cell(const std::string& mode, const std::string& strategy) const;
};

/// Per-episode PnL and wealth paths retained for paired tests and plotting.
struct CellEpisodes {
  std::string mode;
  std::string strategy;
  std::vector<double> pnl;
  std::vector<std::vector<double>> wealth;  // filled only when requested
};

/// Environment seed of episode e in mode index m: every contender in a mode
/// sees the same sequence.
std::uint64_t episode_seed(std::uint64_t seed, std::size_t mode_index, std::size_t episode);

/// Runs every contender on every mode. Episodes run in parallel; all
/// reductions use a fixed pairwise order, so the report is bitwise
/// reproducible.
BenchmarkReport run_benchmark(const std::vector<Contender>& contenders, const std::vector<Mode>& modes, int episodes,
                              std::uint64_t seed, std::vector<CellEpisodes>* detail = nullptr,
                              bool keep_wealth = false);

/// Cell metrics from per-episode results.
CellReport summarize(const std::string& mode, const std::string& strategy, const std::vector<EpisodeResult>& eps,
                     std::uint64_t seed);

void write_report_csv(std::ostream& out, const BenchmarkReport& report);
nlohmann::json report_json(const BenchmarkReport& report);
/// mode,strategy,episode,step,wealth
void write_wealth_csv(std::ostream& out, const std::vector<CellEpisodes>& detail);

}  // namespace finflow::eval
