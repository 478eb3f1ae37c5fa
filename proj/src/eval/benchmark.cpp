#include "finflow/eval/benchmark.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "finflow/common/keyed_config.hpp"
#include "finflow/common/parallel.hpp"
#include "finflow/common/rng.hpp"
#include "finflow/eval/metrics.hpp"

namespace finflow::eval {

std::string to_string(Mode m) {
  switch (m) {
    case Mode::HH: return "HH";
    case Mode::HL: return "HL";
    case Mode::LH: return "LH";
    case Mode::LL: return "LL";
  }
  return "?";
}

Mode mode_from_string(const std::string& s) {
  for (Mode m : all_modes())
    if (to_string(m) == s) return m;
  throw std::invalid_argument("unknown mode '" + s + "' (expected HH, HL, LH or LL)");
}

std::vector<Mode> all_modes() { return {Mode::HH, Mode::HL, Mode::LH, Mode::LL}; }

market::ScenarioConfig mode_scenario(Mode m) {
  market::ScenarioConfig c;
  c.horizon = 1.0;
  c.dt = 0.01;
  c.drift = 0.0;
  c.hurst = 0.5;
  c.jump_intensity = 0.0;
  c.self_excite_bb = c.self_excite_aa = 0.7;
  c.cross_excite_ab = c.cross_excite_ba = 0.3;
  c.decay = 0.1;
  c.spread_sensitivity = 1.5;
  c.inventory_cap = 10;
  c.inventory_penalty = 0.1;
  const bool high_vol = m == Mode::HH || m == Mode::HL;
  const bool high_flow = m == Mode::HH || m == Mode::LH;
  c.volatility = high_vol ? 0.25 : 0.02;
  c.base_intensity_buy = c.base_intensity_sell = high_flow ? 50.0 : 25.0;
  return c;
}

EpisodeResult to_episode_result(const experts::EpisodeRecord& rec) {
  EpisodeResult r;
  r.wealth = rec.wealth_path();
  r.returns = period_returns(r.wealth);
  r.pnl = r.wealth.back() - r.wealth.front();
  return r;
}

Contender expert_contender(experts::ExpertKind kind) {
  return {experts::to_string(kind),
          [kind](const market::ScenarioConfig& sc) { return experts::make_expert(kind, sc); }};
}

Contender fixed_contender(std::string name, std::shared_ptr<const experts::QuotingStrategy> prototype) {
  return {std::move(name), [prototype](const market::ScenarioConfig&) { return prototype->clone(); }};
}

const CellReport& BenchmarkReport::cell(const std::string& mode, const std::string& strategy) const {
  for (const auto& c : cells)
    if (c.mode == mode && c.strategy == strategy) return c;
  throw std::out_of_range("no benchmark cell " + mode + "/" + strategy);
}

std::uint64_t episode_seed(std::uint64_t seed, std::size_t mode_index, std::size_t episode) {
  return derive_seed(seed, {stream::evaluation, mode_index, episode});
}

CellReport summarize(const std::string& mode, const std::string& strategy, const std::vector<EpisodeResult>& eps,
                     std::uint64_t seed) {
  if (eps.empty()) throw std::invalid_argument("summarize: no episodes");
  std::vector<double> pnl, mdd;
  pnl.reserve(eps.size());
  mdd.reserve(eps.size());
  for (const auto& e : eps) {
    pnl.push_back(e.pnl);
    mdd.push_back(100.0 * max_drawdown(e.wealth));
  }
  CellReport c;
  c.mode = mode;
  c.strategy = strategy;
  c.episodes = static_cast<int>(eps.size());
  c.seed = seed;
  c.mean_pnl = mean(pnl);
  c.mdd_percent = mean(mdd);
  c.sharpe = std::numeric_limits<double>::quiet_NaN();
  if (pnl.size() >= 2) {
    try {
      c.sharpe = sharpe(pnl);
    } catch (const UndefinedSharpe&) {
    }
  }
  return c;
}

BenchmarkReport run_benchmark(const std::vector<Contender>& contenders, const std::vector<Mode>& modes, int episodes,
                              std::uint64_t seed, std::vector<CellEpisodes>* detail, bool keep_wealth) {
  if (episodes < 1) throw std::invalid_argument("run_benchmark: episodes must be >= 1");
  BenchmarkReport report;
  if (detail) detail->clear();
  for (Mode m : modes) {
    const auto mi = static_cast<std::size_t>(m);
    const market::ScenarioConfig sc = mode_scenario(m);
    for (const auto& who : contenders) {
      const std::shared_ptr<const experts::QuotingStrategy> proto = who.make(sc);
      std::vector<EpisodeResult> eps(static_cast<std::size_t>(episodes));
      parallel_for(eps.size(), [&](std::size_t e) {
        auto strat = proto->clone();
        const auto rec = experts::run_episode(sc, *strat, episode_seed(seed, mi, e),
                                              derive_seed(seed, {stream::strategy, mi, e}));
        eps[e] = to_episode_result(rec);
      });
      report.cells.push_back(summarize(to_string(m), who.name, eps, seed));
      if (detail) {
        CellEpisodes d{to_string(m), who.name, {}, {}};
        d.pnl.reserve(eps.size());
        for (auto& e : eps) {
          d.pnl.push_back(e.pnl);
          if (keep_wealth) d.wealth.push_back(std::move(e.wealth));
        }
        detail->push_back(std::move(d));
      }
    }
  }
  return report;
}

void write_report_csv(std::ostream& out, const BenchmarkReport& report) {
  out << "mode,strategy,mean_pnl,sharpe,mdd_percent,episodes,seed\n";
  for (const auto& c : report.cells) {
    out << c.mode << ',' << c.strategy << ',' << format_double(c.mean_pnl) << ','
        << (std::isnan(c.sharpe) ? std::string("nan") : format_double(c.sharpe)) << ','
        << format_double(c.mdd_percent) << ',' << c.episodes << ',' << c.seed << '\n';
  }
}

nlohmann::json report_json(const BenchmarkReport& report) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : report.cells) {
    nlohmann::json j{{"mode", c.mode},          {"strategy", c.strategy}, {"mean_pnl", c.mean_pnl},
                     {"mdd_percent", c.mdd_percent}, {"episodes", c.episodes}, {"seed", c.seed}};
    j["sharpe"] = std::isnan(c.sharpe) ? nlohmann::json(nullptr) : nlohmann::json(c.sharpe);
    cells.push_back(std::move(j));
  }
  return {{"cells", cells}};
}

void write_wealth_csv(std::ostream& out, const std::vector<CellEpisodes>& detail) {
  out << "mode,strategy,episode,step,wealth\n";
  for (const auto& d : detail)
    for (std::size_t e = 0; e < d.wealth.size(); ++e)
      for (std::size_t t = 0; t < d.wealth[e].size(); ++t)
        out << d.mode << ',' << d.strategy << ',' << e << ',' << t << ',' << format_double(d.wealth[e][t]) << '\n';
}

}  // namespace finflow::eval
