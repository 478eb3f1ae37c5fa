#include "finflow/cli/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <stdexcept>

#include "CLI11.hpp"

#include "finflow/data/demo_dataset.hpp"
#include "finflow/eval/benchmark.hpp"
#include "finflow/eval/latency.hpp"
#include "finflow/meanflow/meanflow_policy.hpp"
#include "finflow/rl/direct_ppo.hpp"
#include "finflow/rl/finetune.hpp"

namespace finflow::cli {

namespace fs = std::filesystem;

namespace {

KeyedConfig keyed(std::initializer_list<std::pair<const char*, const char*>> kv) {
  KeyedConfig c;
  for (const auto& [k, v] : kv) c.set(k, v);
  return c;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void echo_config(const KeyedConfig& cfg, const fs::path& dir) {
  const std::string text = cfg.to_text();
  open_out(dir / "config.txt") << text;
  std::cerr << text;
}

int get_int(const KeyedConfig& cfg, const std::string& key) {
  const long long v = cfg.get_int(key, 0);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw std::invalid_argument(key + " is out of range");
  }
  return static_cast<int>(v);
}

std::uint64_t get_seed(const KeyedConfig& cfg) { return static_cast<std::uint64_t>(cfg.get_int("seed", 0)); }

std::string require_path(const KeyedConfig& cfg, const std::string& key) {
  const std::string p = cfg.get_string(key, "");
  if (p.empty()) throw std::invalid_argument(key + " is required");
  if (!fs::exists(p)) throw std::runtime_error(key + " not found: " + p);
  return p;
}

rl::PPOHyper ppo_hyper(const KeyedConfig& cfg) {
  rl::PPOHyper h;
  h.clip = cfg.get_double("clip", h.clip);
  h.value_coeff = cfg.get_double("value_coeff", h.value_coeff);
  h.entropy_coeff = cfg.get_double("entropy_coeff", h.entropy_coeff);
  h.discount = cfg.get_double("discount", h.discount);
  h.gae_lambda = cfg.get_double("gae_lambda", h.gae_lambda);
  h.epochs = get_int(cfg, "epochs");
  h.minibatch = get_int(cfg, "minibatch");
  h.learning_rate = cfg.get_double("learning_rate", h.learning_rate);
  h.validate();
  return h;
}

std::vector<eval::Mode> parse_modes(const std::string& s) {
  if (s == "all") return eval::all_modes();
  return {eval::mode_from_string(s)};
}

std::shared_ptr<const meanflow::MeanFlowPolicy> load_expert(const KeyedConfig& cfg) {
  return std::make_shared<const meanflow::MeanFlowPolicy>(meanflow::MeanFlowPolicy::load(require_path(cfg, "expert")));
}

}  // namespace

KeyedConfig command_defaults(const std::string& command) {
  if (command == "gen-data") {
    return keyed({{"seed", "0"},
                  {"episodes", "100"},
                  {"tournament_episodes", "100"},
                  {"obs", "2"},
                  {"pred", "16"},
                  {"exec", "8"},
                  {"ppo_candidate", "false"},
                  {"ppo_updates", "60"}});
  }
  if (command == "train") {
    return keyed({{"seed", "0"},
                  {"dataset", ""},
                  {"steps", "20000"},
                  {"batch_size", "64"},
                  {"learning_rate", "0.01"},
                  {"ema_decay", "0.998"},
                  {"hidden", "128"},
                  {"film_hidden", "64"},
                  {"trunk_layers", "2"},
                  {"log_every", "100"}});
  }
  if (command == "finetune") {
    return keyed({{"seed", "0"},
                  {"expert", ""},
                  {"mode", "LL"},
                  {"envs", "16"},
                  {"chunks_per_env", "100"},
                  {"updates", "200"},
                  {"hidden", "64"},
                  {"init_log_std", "0"},
                  {"reward", "sum"},
                  {"clip", "0.2"},
                  {"value_coeff", "0.5"},
                  {"entropy_coeff", "0.01"},
                  {"discount", "0.99"},
                  {"gae_lambda", "0.95"},
                  {"epochs", "4"},
                  {"minibatch", "256"},
                  {"learning_rate", "5e-05"}});
  }
  if (command == "eval") {
    return keyed({{"seed", "0"},
                  {"expert", ""},
                  {"finetuned", ""},
                  {"mode", "all"},
                  {"episodes", "2000"},
                  {"baselines", "true"},
                  {"ppo_updates", "60"},
                  {"plot_data", "false"}});
  }
  if (command == "bench-latency") {
    return keyed({{"seed", "0"}, {"expert", ""}, {"finetuned", ""}, {"calls", "1000000"}});
  }
  throw std::invalid_argument("unknown command '" + command + "'");
}

KeyedConfig resolve_config(const std::string& command, const KeyedConfig& file, const KeyedConfig& overrides) {
  KeyedConfig cfg = command_defaults(command);
  for (const KeyedConfig* layer : {&file, &overrides}) {
    for (const auto& [k, v] : layer->values()) {
      if (!cfg.contains(k)) throw std::invalid_argument("unknown key '" + k + "' for " + command);
      cfg.set(k, v);
    }
  }
  return cfg;
}

void cmd_gen_data(const KeyedConfig& cfg, const std::string& out_dir) {
  data::GenDataConfig g;
  g.episodes = get_int(cfg, "episodes");
  g.tournament_episodes = get_int(cfg, "tournament_episodes");
  g.horizons = {get_int(cfg, "obs"), get_int(cfg, "pred"), get_int(cfg, "exec")};
  g.horizons.validate();
  g.seed = get_seed(cfg);
  if (cfg.get_bool("ppo_candidate", false)) {
    rl::DirectPPOConfig p;
    p.updates = get_int(cfg, "ppo_updates");
    g.ppo_factory = rl::direct_ppo_factory(p);
  }
  const data::Dataset ds = data::generate_dataset(g);
  for (const auto& s : ds.scenarios) {
    std::cout << "scenario " << s.id << " winner " << experts::to_string(s.winner) << " records " << s.records
              << '\n';
  }
  std::cout << "winners " << ds.scenarios.size() << " records " << ds.records.size() << '\n';
  data::save_dataset(ds, (fs::path(out_dir) / "dataset.bin").string());
  auto csv = open_out(fs::path(out_dir) / "winners.csv");
  data::write_winner_csv(csv, ds.scenarios);
}

void cmd_train(const KeyedConfig& cfg, const std::string& out_dir) {
  const data::Dataset ds = data::load_dataset(require_path(cfg, "dataset"));
  if (ds.records.empty()) throw std::runtime_error("dataset has no records");
  meanflow::PretrainConfig p;
  p.steps = get_int(cfg, "steps");
  p.train.batch_size = get_int(cfg, "batch_size");
  p.train.learning_rate = cfg.get_double("learning_rate", p.train.learning_rate);
  p.train.ema_decay = cfg.get_double("ema_decay", p.train.ema_decay);
  p.net.hidden = get_int(cfg, "hidden");
  p.net.film_hidden = get_int(cfg, "film_hidden");
  p.net.trunk_layers = get_int(cfg, "trunk_layers");
  p.log_every = get_int(cfg, "log_every");
  p.seed = get_seed(cfg);
  auto log = open_out(fs::path(out_dir) / "train_log.csv");
  log << "step,loss\n";
  const auto policy = meanflow::pretrain(ds, p, [&](int step, double loss) {
    log << step << ',' << format_double(loss) << '\n';
    std::cout << "step " << step << " loss " << loss << '\n';
  });
  const fs::path ck = fs::path(out_dir) / "expert.ckpt";
  policy.save(ck.string());
  std::cout << "expert " << ck.string() << " hash " << policy.parameter_hash() << '\n';
}

void cmd_finetune(const KeyedConfig& cfg, const std::string& out_dir) {
  const auto expert = load_expert(cfg);
  rl::FinetuneConfig f;
  const auto modes = parse_modes(cfg.get_string("mode", "LL"));
  if (modes.size() != 1) throw std::invalid_argument("finetune needs a single mode");
  f.scenario = eval::mode_scenario(modes.front());
  f.envs = get_int(cfg, "envs");
  f.chunks_per_env = get_int(cfg, "chunks_per_env");
  f.updates = get_int(cfg, "updates");
  f.policy_hidden = f.value_hidden = get_int(cfg, "hidden");
  f.init_log_std = cfg.get_double("init_log_std", 0.0);
  const std::string reward = cfg.get_string("reward", "sum");
  if (reward == "sum") {
    f.reward_mode = rl::ChunkReward::sum;
  } else if (reward == "discounted") {
    f.reward_mode = rl::ChunkReward::discounted;
  } else {
    throw std::invalid_argument("reward must be sum or discounted");
  }
  f.hyper = ppo_hyper(cfg);
  f.seed = get_seed(cfg);
  auto log = open_out(fs::path(out_dir) / "finetune_log.csv");
  rl::write_finetune_log_header(log);
  const auto ft = rl::finetune(expert, f, [&](const rl::FinetuneLogRow& row) {
    rl::write_finetune_log_row(log, row);
    std::cout << "update " << row.update << " mean_r_total " << row.mean_chunk_reward << " clip "
              << row.diag.clip_fraction << '\n';
  });
  const fs::path ck = fs::path(out_dir) / "finetune.ckpt";
  ft.save(ck.string());
  std::cout << "expert_hash " << ft.expert_hash << '\n';
}

void cmd_eval(const KeyedConfig& cfg, const std::string& out_dir) {
  const std::uint64_t seed = get_seed(cfg);
  std::vector<eval::Contender> who;
  if (cfg.get_bool("baselines", true)) {
    for (auto k : {experts::ExpertKind::as, experts::ExpertKind::glft, experts::ExpertKind::glft_drift,
                   experts::ExpertKind::random}) {
      who.push_back(eval::expert_contender(k));
    }
    const int ppo_updates = get_int(cfg, "ppo_updates");
    if (ppo_updates > 0) {
      who.push_back({"PPO", [seed, ppo_updates](const market::ScenarioConfig& sc) {
                       rl::DirectPPOConfig p;
                       p.scenario = sc;
                       p.updates = ppo_updates;
                       p.seed = derive_seed(seed, {stream::init, static_cast<std::uint64_t>(sc.volatility * 1e6),
                                                   static_cast<std::uint64_t>(sc.base_intensity_buy * 1e6)});
                       const auto policy = std::make_shared<const rl::DirectPPOPolicy>(rl::train_direct_ppo(p));
                       return std::unique_ptr<experts::QuotingStrategy>(
                           std::make_unique<rl::DirectPPOStrategy>(policy));
                     }});
    }
  }
  std::shared_ptr<const meanflow::MeanFlowPolicy> expert;
  if (!cfg.get_string("expert", "").empty()) {
    expert = load_expert(cfg);
    who.push_back(eval::fixed_contender("Pretrained", std::make_shared<meanflow::PretrainedStrategy>(expert)));
  }
  if (!cfg.get_string("finetuned", "").empty()) {
    if (!expert) throw std::invalid_argument("finetuned requires expert");
    const auto ft = std::make_shared<const rl::FineTunedPolicy>(
        rl::FineTunedPolicy::load(require_path(cfg, "finetuned"), expert));
    who.push_back(eval::fixed_contender("FinFlowRL", std::make_shared<rl::FineTunedStrategy>(ft)));
  }
  if (who.empty()) throw std::invalid_argument("nothing to evaluate");
  const bool plot = cfg.get_bool("plot_data", false);
  std::vector<eval::CellEpisodes> detail;
  const auto report = eval::run_benchmark(who, parse_modes(cfg.get_string("mode", "all")),
                                          get_int(cfg, "episodes"), seed, plot ? &detail : nullptr, plot);
  eval::write_report_csv(std::cout, report);
  auto csv = open_out(fs::path(out_dir) / "report.csv");
  eval::write_report_csv(csv, report);
  open_out(fs::path(out_dir) / "report.json") << eval::report_json(report).dump(2) << '\n';
  if (plot) {
    auto w = open_out(fs::path(out_dir) / "wealth.csv");
    eval::write_wealth_csv(w, detail);
  }
}

void cmd_bench_latency(const KeyedConfig& cfg, const std::string& out_dir) {
  const auto expert = load_expert(cfg);
  rl::FineTunedPolicy ft;
  if (cfg.get_string("finetuned", "").empty()) {
    rl::FinetuneConfig f;
    f.seed = get_seed(cfg);
    ft = rl::init_finetune(expert, f);
  } else {
    ft = rl::FineTunedPolicy::load(require_path(cfg, "finetuned"), expert);
  }
  const auto r = eval::bench_latency(ft, cfg.get_int("calls", 1000000), get_seed(cfg));
  std::cout << "calls " << r.calls << " exec " << r.exec << " mean_us_per_action " << r.mean_us_per_action
            << " p99_us_per_action " << r.p99_us_per_action << '\n';
  nlohmann::json j{{"calls", r.calls},
                   {"exec", r.exec},
                   {"mean_us_per_action", r.mean_us_per_action},
                   {"p99_us_per_action", r.p99_us_per_action}};
  open_out(fs::path(out_dir) / "latency.json") << j.dump(2) << '\n';
}

int run(int argc, const char* const* argv) {
  CLI::App app{"finflow: market-making imitation and noise-space fine-tuning"};
  app.require_subcommand(1);
  std::string config_path, out_dir = ".";
  std::optional<long long> seed, episodes, updates;
  std::optional<std::string> mode;
  bool plot = false;
  std::vector<std::string> sets;

  struct Command {
    const char* name;
    const char* help;
    void (*fn)(const KeyedConfig&, const std::string&);
  };
  const Command commands[] = {
      {"gen-data", "build the scenario grid, run tournaments, collect demonstrations", cmd_gen_data},
      {"train", "pre-train the MeanFlow expert on a dataset", cmd_train},
      {"finetune", "PPO in noise space against the frozen expert", cmd_finetune},
      {"eval", "four-mode benchmark report", cmd_eval},
      {"bench-latency", "time deterministic chunk inference", cmd_bench_latency},
  };
  std::vector<CLI::App*> subs;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", config_path, "keyed text config file");
    sub->add_option("--seed", seed, "global seed");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--episodes", episodes, "episodes (gen-data: per scenario, eval: per cell)");
    sub->add_option("--updates", updates, "finetune: PPO updates, train: gradient steps");
    sub->add_option("--mode", mode, "HH, HL, LH, LL or all");
    sub->add_flag("--plot-data", plot, "eval: write per-episode wealth paths");
    sub->add_option("--set", sets, "key=value override (repeatable)");
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    std::size_t which = 0;
    while (!subs[which]->parsed()) ++which;
    const std::string name = commands[which].name;
    KeyedConfig overrides;
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + s + "'");
      overrides.set(s.substr(0, eq), s.substr(eq + 1));
    }
    if (seed) overrides.set("seed", std::to_string(*seed));
    if (episodes) overrides.set("episodes", std::to_string(*episodes));
    if (updates) overrides.set(name == "train" ? "steps" : "updates", std::to_string(*updates));
    if (mode) overrides.set("mode", *mode);
    if (plot) overrides.set("plot_data", "true");
    const KeyedConfig file = config_path.empty() ? KeyedConfig{} : KeyedConfig::load(config_path);
    const KeyedConfig cfg = resolve_config(name, file, overrides);
    fs::create_directories(out_dir);
    echo_config(cfg, out_dir);
    commands[which].fn(cfg, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("finflow");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace finflow::cli
