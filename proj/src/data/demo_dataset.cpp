#include "finflow/data/demo_dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "finflow/common/parallel.hpp"
#include "finflow/numerics/checkpoint.hpp"

namespace finflow::data {

void Horizons::validate() const {
  if (obs < 1 || pred < 1 || exec < 1) throw std::invalid_argument("horizons must be positive");
  if (exec_offset() + exec > pred) {
    throw std::invalid_argument("horizons: obs - 1 + exec must not exceed pred");
  }
}

double NormStats::normalize_action(int dim, double value) const {
  const double lo = act_min[dim], hi = act_max[dim];
  if (!(hi > lo)) return 0.0;
  return 2.0 * (value - lo) / (hi - lo) - 1.0;
}

double NormStats::unnormalize_action(int dim, double value) const {
  const double lo = act_min[dim], hi = act_max[dim];
  return lo + 0.5 * (value + 1.0) * (hi - lo);
}

Eigen::VectorXd NormStats::condition(std::span<const double> raw_window) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(raw_window.size()));
  for (std::size_t i = 0; i < raw_window.size(); ++i) {
    const std::size_t f = i % market::kStateDim;
    out(static_cast<Eigen::Index>(i)) = (raw_window[i] - obs_mean[f]) / obs_std[f];
  }
  return out;
}

Eigen::VectorXd NormStats::condition(std::span<const market::MarketState> window) const {
  std::vector<double> raw;
  raw.reserve(window.size() * market::kStateDim);
  for (const auto& s : window) {
    const auto a = s.as_array();
    raw.insert(raw.end(), a.begin(), a.end());
  }
  return condition(std::span<const double>(raw));
}

nlohmann::json NormStats::to_json() const {
  return {{"obs_min", obs_min}, {"obs_max", obs_max}, {"obs_mean", obs_mean},
          {"obs_std", obs_std}, {"act_min", act_min}, {"act_max", act_max}};
}

NormStats NormStats::from_json(const nlohmann::json& j) {
  NormStats s;
  s.obs_min = j.at("obs_min").get<std::array<double, market::kStateDim>>();
  s.obs_max = j.at("obs_max").get<std::array<double, market::kStateDim>>();
  s.obs_mean = j.at("obs_mean").get<std::array<double, market::kStateDim>>();
  s.obs_std = j.at("obs_std").get<std::array<double, market::kStateDim>>();
  s.act_min = j.at("act_min").get<std::array<double, kActionDim>>();
  s.act_max = j.at("act_max").get<std::array<double, kActionDim>>();
  return s;
}

std::vector<Demonstration> collect_demonstrations(const market::ScenarioConfig& scenario,
                                                  const experts::QuotingStrategy& expert, int scenario_id,
                                                  int episodes, std::uint64_t seed, const Horizons& horizons) {
  horizons.validate();
  std::vector<Demonstration> out;
  auto player = expert.clone();
  for (int e = 0; e < episodes; ++e) {
    const auto rec = experts::run_episode(scenario, *player, derive_seed(seed, {stream::episode, std::uint64_t(e)}),
                                          derive_seed(seed, {stream::strategy, std::uint64_t(e)}));
    const int n = static_cast<int>(rec.actions.size());
    for (int t = 0; t < n; ++t) {
      Demonstration d;
      d.scenario_id = static_cast<std::uint16_t>(scenario_id);
      d.expert = expert.kind();
      d.window.reserve(horizons.obs * market::kStateDim);
      for (int w = horizons.obs - 1; w >= 0; --w) {
        const auto a = rec.states[static_cast<std::size_t>(std::max(0, t - w))].as_array();
        d.window.insert(d.window.end(), a.begin(), a.end());
      }
      d.chunk.reserve(horizons.pred * kActionDim);
      for (int j = 0; j < horizons.pred; ++j) {
        const int idx = std::clamp(t - horizons.exec_offset() + j, 0, n - 1);
        d.chunk.push_back(rec.actions[idx].delta_bid);
        d.chunk.push_back(rec.actions[idx].delta_ask);
      }
      out.push_back(std::move(d));
    }
  }
  return out;
}

Dataset finalize_dataset(std::vector<Demonstration> demos, const Horizons& horizons) {
  Dataset ds;
  ds.horizons = horizons;
  NormStats& st = ds.stats;
  constexpr double inf = std::numeric_limits<double>::infinity();
  st.obs_min.fill(inf);
  st.obs_max.fill(-inf);
  st.act_min.fill(inf);
  st.act_max.fill(-inf);
  std::array<double, market::kStateDim> sum{}, sum2{};
  std::size_t rows = 0;
  for (const auto& d : demos) {
    for (std::size_t i = 0; i < d.window.size(); ++i) {
      const std::size_t f = i % market::kStateDim;
      st.obs_min[f] = std::min(st.obs_min[f], d.window[i]);
      st.obs_max[f] = std::max(st.obs_max[f], d.window[i]);
    }
    // Moments from the newest state only, so padded rows do not double count.
    const std::size_t newest = d.window.size() - market::kStateDim;
    for (std::size_t f = 0; f < market::kStateDim; ++f) {
      sum[f] += d.window[newest + f];
      sum2[f] += d.window[newest + f] * d.window[newest + f];
    }
    ++rows;
    for (std::size_t i = 0; i < d.chunk.size(); ++i) {
      const std::size_t a = i % kActionDim;
      st.act_min[a] = std::min(st.act_min[a], d.chunk[i]);
      st.act_max[a] = std::max(st.act_max[a], d.chunk[i]);
    }
  }
  if (rows == 0) {
    st = NormStats{};
  } else {
    for (std::size_t f = 0; f < market::kStateDim; ++f) {
      st.obs_mean[f] = sum[f] / rows;
      const double var = std::max(0.0, sum2[f] / rows - st.obs_mean[f] * st.obs_mean[f]);
      st.obs_std[f] = var > 1e-12 ? std::sqrt(var) : 1.0;
    }
  }
  ds.records.reserve(demos.size());
  for (auto& d : demos) {
    DemoRecord r;
    r.window = std::move(d.window);
    r.scenario_id = d.scenario_id;
    r.expert = d.expert;
    r.chunk.resize(d.chunk.size());
    for (std::size_t i = 0; i < d.chunk.size(); ++i) {
      r.chunk[i] = std::clamp(st.normalize_action(static_cast<int>(i % kActionDim), d.chunk[i]), -1.0, 1.0);
    }
    ds.records.push_back(std::move(r));
  }
  return ds;
}

Dataset generate_dataset(const GenDataConfig& config) {
  config.horizons.validate();
  const auto grid = build_scenario_grid(config.axes, config.base);
  std::vector<ScenarioSummary> summaries(grid.size());
  std::vector<std::vector<Demonstration>> per_scenario(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    const auto& scenario = grid[i];
    std::vector<std::unique_ptr<experts::QuotingStrategy>> owned;
    for (auto kind : config.candidates) owned.push_back(experts::make_expert(kind, scenario));
    if (config.ppo_factory) owned.push_back(config.ppo_factory(scenario, derive_seed(config.seed, {stream::init, i})));
    std::vector<const experts::QuotingStrategy*> candidates;
    for (const auto& c : owned) candidates.push_back(c.get());
    ScenarioSummary& s = summaries[i];
    s.id = static_cast<int>(i);
    s.config = scenario;
    s.board = evaluate_candidates(scenario, candidates, config.tournament_episodes,
                                  derive_seed(config.seed, {stream::tournament, i}));
    const std::size_t win = select_expert(s.board);
    s.winner = s.board[win].kind;
    per_scenario[i] = collect_demonstrations(scenario, *candidates[win], static_cast<int>(i), config.episodes,
                                             derive_seed(config.seed, {stream::collection, i}), config.horizons);
    s.records = per_scenario[i].size();
  });
  std::vector<Demonstration> all;
  for (auto& v : per_scenario) {
    for (auto& d : v) all.push_back(std::move(d));
  }
  Dataset ds = finalize_dataset(std::move(all), config.horizons);
  ds.scenarios = std::move(summaries);
  return ds;
}

void write_winner_csv(std::ostream& out, const std::vector<ScenarioSummary>& scenarios) {
  out << "scenario_id,drift,volatility,jump_intensity,dt,liquidity,winner";
  if (!scenarios.empty()) {
    for (const auto& e : scenarios.front().board) out << ",score_" << e.name;
  }
  out << '\n';
  for (const auto& s : scenarios) {
    out << s.id << ',' << format_double(s.config.drift) << ',' << format_double(s.config.volatility) << ','
        << format_double(s.config.jump_intensity) << ',' << format_double(s.config.dt) << ','
        << format_double(s.config.base_intensity_buy) << ',' << experts::to_string(s.winner);
    for (const auto& e : s.board) out << ',' << format_double(e.mean_score);
    out << '\n';
  }
}

void save_dataset(const Dataset& ds, std::ostream& out) {
  nlohmann::json header;
  header["format"] = "finflow-dataset";
  header["version"] = Dataset::kVersion;
  header["horizons"] = {{"obs", ds.horizons.obs}, {"pred", ds.horizons.pred}, {"exec", ds.horizons.exec}};
  header["stats"] = ds.stats.to_json();
  const std::size_t wlen = static_cast<std::size_t>(ds.horizons.obs) * market::kStateDim;
  const std::size_t clen = static_cast<std::size_t>(ds.horizons.pred) * kActionDim;
  header["counts"] = {{"records", ds.records.size()}, {"window_len", wlen}, {"chunk_len", clen}};
  nlohmann::json grid = nlohmann::json::array();
  for (const auto& s : ds.scenarios) {
    nlohmann::json board = nlohmann::json::array();
    for (const auto& e : s.board) {
      board.push_back({{"name", e.name}, {"mean_score", e.mean_score}, {"sharpe", e.sharpe}});
    }
    grid.push_back({{"id", s.id},
                    {"config", s.config.to_keyed().to_text()},
                    {"winner", experts::to_string(s.winner)},
                    {"records", s.records},
                    {"scores", board}});
  }
  header["grid"] = grid;

  std::vector<std::uint8_t> body;
  body.reserve(ds.records.size() * ((wlen + clen) * 8 + 4));
  for (const auto& r : ds.records) {
    if (r.window.size() != wlen || r.chunk.size() != clen) throw std::invalid_argument("save_dataset: record shape mismatch");
    for (double v : r.window) io::append_f64_le(body, v);
    for (double v : r.chunk) io::append_f64_le(body, v);
    io::append_u16_le(body, r.scenario_id);
    io::append_u16_le(body, static_cast<std::uint16_t>(r.expert));
  }
  io::write_framed(out, header, body);
}

void save_dataset(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write dataset: " + path);
  save_dataset(ds, out);
}

Dataset load_dataset(std::istream& in) {
  auto [header, body] = io::read_framed(in);
  if (header.value("format", "") != "finflow-dataset") throw std::runtime_error("not a finflow dataset");
  if (header.value("version", -1) != Dataset::kVersion) throw std::runtime_error("dataset version mismatch");
  Dataset ds;
  try {
    ds.horizons.obs = header.at("horizons").at("obs").get<int>();
    ds.horizons.pred = header.at("horizons").at("pred").get<int>();
    ds.horizons.exec = header.at("horizons").at("exec").get<int>();
    ds.stats = NormStats::from_json(header.at("stats"));
    const auto n = header.at("counts").at("records").get<std::size_t>();
    const auto wlen = header.at("counts").at("window_len").get<std::size_t>();
    const auto clen = header.at("counts").at("chunk_len").get<std::size_t>();
    if (wlen != static_cast<std::size_t>(ds.horizons.obs) * market::kStateDim ||
        clen != static_cast<std::size_t>(ds.horizons.pred) * kActionDim) {
      throw std::runtime_error("dataset record shape disagrees with horizons");
    }
    const std::size_t stride = (wlen + clen) * 8 + 4;
    if (body.size() != n * stride) {
      throw std::runtime_error("dataset body size " + std::to_string(body.size()) + " does not match header (" +
                               std::to_string(n * stride) + ")");
    }
    ds.records.resize(n);
    const std::uint8_t* p = body.data();
    for (auto& r : ds.records) {
      r.window.resize(wlen);
      r.chunk.resize(clen);
      for (auto& v : r.window) {
        v = io::read_f64_le(p);
        p += 8;
      }
      for (auto& v : r.chunk) {
        v = io::read_f64_le(p);
        p += 8;
      }
      r.scenario_id = io::read_u16_le(p);
      r.expert = static_cast<experts::ExpertKind>(io::read_u16_le(p + 2));
      p += 4;
    }
    for (const auto& g : header.at("grid")) {
      ScenarioSummary s;
      s.id = g.at("id").get<int>();
      s.config.apply(KeyedConfig::parse(g.at("config").get<std::string>()));
      s.winner = experts::expert_kind_from_string(g.at("winner").get<std::string>());
      s.records = g.at("records").get<std::size_t>();
      for (const auto& e : g.at("scores")) {
        ScoreEntry entry;
        entry.name = e.at("name").get<std::string>();
        entry.kind = experts::expert_kind_from_string(entry.name);
        entry.mean_score = e.at("mean_score").get<double>();
        entry.sharpe = e.at("sharpe").get<double>();
        s.board.push_back(entry);
      }
      ds.scenarios.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("corrupt dataset header: ") + e.what());
  }
  return ds;
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dataset: " + path);
  return load_dataset(in);
}

}  // namespace finflow::data
