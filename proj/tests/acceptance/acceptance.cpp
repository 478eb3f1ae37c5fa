// Runs every acceptance criterion and prints one PASS/FAIL line per item
// with the measured value, the pinned tolerance and the runtime budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "grad_oracle.hpp"

#include "finflow/cli/commands.hpp"
#include "finflow/data/tournament.hpp"
#include "finflow/eval/benchmark.hpp"
#include "finflow/eval/latency.hpp"
#include "finflow/eval/metrics.hpp"
#include "finflow/experts/experts.hpp"
#include "finflow/market/hawkes.hpp"
#include "finflow/market/market_env.hpp"
#include "finflow/market/price_path.hpp"
#include "finflow/meanflow/meanflow_policy.hpp"
#include "finflow/numerics/checkpoint.hpp"
#include "finflow/numerics/film.hpp"
#include "finflow/rl/finetune.hpp"

using namespace finflow;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<Outcome()> run;
};

// Silences the CLI's progress output while a command runs.
class Quiet {
 public:
  Quiet() : out_(std::cout.rdbuf(sink_.rdbuf())), err_(std::cerr.rdbuf(sink_.rdbuf())) {}
  ~Quiet() {
    std::cout.rdbuf(out_);
    std::cerr.rdbuf(err_);
  }

 private:
  std::ostringstream sink_;
  std::streambuf* out_;
  std::streambuf* err_;
};

void cli_or_throw(const std::vector<std::string>& args) {
  int code = 0;
  {
    Quiet q;
    code = cli::run(args);
  }
  if (code != 0) {
    std::string line;
    for (const auto& a : args) line += a + " ";
    throw std::runtime_error("command failed: " + line);
  }
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path work_dir() {
  const fs::path dir = fs::temp_directory_path() / "finflow_acceptance";
  fs::create_directories(dir);
  return dir;
}

// ---------------------------------------------------------------- 1
Outcome metric_oracles() {
  bool ok = true;
  std::vector<double> none;
  ok &= eval::cumulative_return(none) == 0.0;
  const std::vector<double> r2{0.1, -0.1};
  ok &= std::abs(eval::cumulative_return(r2) - (-1.0)) <= 1e-12;
  const std::vector<double> r1{0.07};
  ok &= std::abs(eval::cumulative_return(r1) - 7.0) <= 1e-12;
  ok &= eval::sharpe(r2) == 0.0;
  const std::vector<double> s3{0.02, 0.04, 0.06};
  ok &= std::abs(eval::sharpe(s3) - 2.0) <= 1e-12;
  const std::vector<double> flat{0.03, 0.03, 0.03};
  bool threw = false;
  try {
    eval::sharpe(flat);
  } catch (const eval::UndefinedSharpe&) {
    threw = true;
  }
  ok &= threw;
  const std::vector<double> dd{100, 50, 75};
  ok &= std::abs(eval::max_drawdown(dd) - 0.5) <= 1e-12;
  const std::vector<double> up{1, 2, 3, 4};
  ok &= eval::max_drawdown(up) == 0.0;

  Rng rng(1);
  double worst = 0.0;
  for (int walk = 0; walk < 100; ++walk) {
    std::vector<double> v(1000);
    double x = 100.0;
    for (auto& e : v) {
      x *= std::exp(0.02 * standard_normal(rng));
      e = x;
    }
    double brute = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = i; j < v.size(); ++j) brute = std::max(brute, (v[i] - v[j]) / v[i]);
    worst = std::max(worst, std::abs(eval::max_drawdown(v) - brute));
  }
  ok &= worst <= 1e-12;
  return {ok, "spot values exact; MDD vs O(n^2) brute force max |diff| " + fmt("%.1e", worst) + " (tol 1e-12)"};
}

// ---------------------------------------------------------------- 2
Outcome expert_formulas() {
  using namespace experts;
  bool ok = true;
  Rng rng(2);
  int checks = 0;
  for (int i = 0; i < 100; ++i) {
    const double g = 0.01 + 0.5 * uniform01(rng);
    const double sigma = 0.01 + 0.5 * uniform01(rng);
    const double k = 0.5 + 3.0 * uniform01(rng);
    const double a = 5.0 + 50.0 * uniform01(rng);
    const double t = 0.99 * uniform01(rng);
    const ASParams as{g, sigma, k, 1.0};
    const GLFTParams gl{g, sigma, k, a, 0.0};
    const double glft_sum = 2.0 * glft_c1(gl) + sigma * glft_c2(gl);
    for (int q = -10; q <= 10; ++q) {
      const auto x = as_quotes_raw(q, t, as), y = as_quotes_raw(-q, t, as);
      ok &= x.delta_bid == y.delta_ask && x.delta_ask == y.delta_bid;
      if (q > 0) ok &= x.delta_bid < x.delta_ask;
      if (q < 0) ok &= x.delta_bid > x.delta_ask;
      const auto gq = glft_quotes_raw(q, gl);
      ok &= std::abs(gq.delta_bid + gq.delta_ask - glft_sum) <= 1e-12 * std::max(1.0, glft_sum);
      const auto gc = glft_quotes(q, gl);
      ok &= gc.delta_bid >= 0.0 && gc.delta_ask >= 0.0;
      const auto d = glft_drift_quotes(q, gl);
      ok &= std::isfinite(d.delta_bid) && std::isfinite(d.delta_ask);
      checks += 4;
    }
    const auto sym = glft_drift_quotes_raw(0, gl);
    ok &= std::abs(sym.delta_bid - sym.delta_ask) <= 1e-12;
  }
  // Spot values evaluated with 40-digit arithmetic.
  const ASParams as{0.1, 0.3, 1.5, 1.0};
  const auto a = as_quotes(1, 0.5, as);
  ok &= std::abs(a.delta_bid - 0.64313521137571171673) < 1e-12;
  ok &= std::abs(a.delta_ask - 0.65213521137571171673) < 1e-12;
  const GLFTParams gl{0.1, 0.3, 1.5, 20.0, 0.0};
  ok &= std::abs(glft_c1(gl) - 0.64538521137571171673) < 1e-12;
  ok &= std::abs(glft_c2(gl) - 0.068415446179651163425) < 1e-12;
  const auto b = glft_quotes(2, gl);
  ok &= std::abs(b.delta_bid - 0.6966967960104500893) < 1e-12;
  ok &= std::abs(b.delta_ask - 0.61459826059486869319) < 1e-12;
  const GLFTParams gd{0.1, 0.3, 1.5, 20.0, 0.05};
  const auto c = glft_drift_quotes_raw(0, gd);
  ok &= std::abs(c.delta_bid - 0.31725644516142788221) < 1e-12;
  ok &= std::abs(c.delta_ask - 1.0384185687093044416) < 1e-12;
  return {ok, std::to_string(checks) + " invariant checks over a 100-point sweep, |q| <= 10; spot values (tol 1e-12)"};
}

// ---------------------------------------------------------------- 3
Outcome hawkes() {
  using namespace market;
  ScenarioConfig c;
  c.decay = 2.0;
  c.self_excite_bb = 0.9;
  c.self_excite_aa = 0.5;
  c.cross_excite_ab = 0.2;
  c.cross_excite_ba = 0.4;
  c.base_intensity_buy = 30.0;
  c.base_intensity_sell = 15.0;
  c.horizon = 0.2;
  Rng rng(3);
  double worst = 0.0;
  for (int h = 0; h < 1000; ++h) {
    MarketEnv env(c);
    env.set_record_events(true);
    env.reset(static_cast<std::uint64_t>(h));
    while (!env.done()) {
      env.step({uniform01(rng), uniform01(rng)});
      const double t = env.state().time;
      worst = std::max(worst, std::abs(hawkes_intensity(Side::buy, env.hawkes(), c) -
                                       env.event_log().intensity(Side::buy, t, c)));
      worst = std::max(worst, std::abs(hawkes_intensity(Side::sell, env.hawkes(), c) -
                                       env.event_log().intensity(Side::sell, t, c)));
    }
  }
  ScenarioConfig s;
  s.self_excite_aa = s.self_excite_bb = s.cross_excite_ab = s.cross_excite_ba = 0.04;
  s.decay = 0.1;
  s.base_intensity_buy = s.base_intensity_sell = 1.0;
  const double expected = 1.0 / (1.0 - 0.08 / 0.1);
  Rng srng(33);
  const auto n = simulate_hawkes(s, 1000000, srng);
  const double eb = n.buy / n.elapsed / expected - 1.0;
  const double es = n.sell / n.elapsed / expected - 1.0;
  const bool ok = worst <= 1e-10 && std::abs(eb) < 0.05 && std::abs(es) < 0.05;
  return {ok, "recursive vs naive max diff " + fmt("%.1e", worst) + " (tol 1e-10); stationary rate error buy " +
                  fmt("%+.2f%%", 100 * eb) + " sell " + fmt("%+.2f%%", 100 * es) + " (tol 5%, 1e6 thinning steps)"};
}

// ---------------------------------------------------------------- 4
Outcome price_moments() {
  market::ScenarioConfig c;
  c.volatility = 0.1;
  c.drift = 0.05;
  c.jump_intensity = 0.0;
  const int paths = 100000;
  Rng rng(4);
  double sum = 0.0, sum2 = 0.0;
  for (int p = 0; p < paths; ++p) {
    const auto s = market::simulate_price_path(c, rng);
    const double x = std::log(s.back() / s.front());
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / paths;
  const double se = std::sqrt((sum2 - paths * mean * mean) / (paths - 1) / paths);
  const double expected = (c.drift - 0.5 * c.volatility * c.volatility) * c.horizon;
  const double z_mean = (mean - expected) / se;

  c.jump_intensity = 2.0;
  double jsum = 0.0, jsum2 = 0.0;
  for (int p = 0; p < paths; ++p) {
    int jumps = 0;
    market::simulate_price_path(c, rng, &jumps);
    jsum += jumps;
    jsum2 += static_cast<double>(jumps) * jumps;
  }
  const double jmean = jsum / paths;
  const double jse = std::sqrt((jsum2 - paths * jmean * jmean) / (paths - 1) / paths);
  const double jexpected = c.steps() * c.jump_intensity * c.dt;
  const double z_jump = (jmean - jexpected) / jse;
  const bool ok = std::abs(z_mean) < 3.0 && std::abs(z_jump) < 3.0;
  return {ok, "log-mean z = " + fmt("%+.2f", z_mean) + ", jump-count z = " + fmt("%+.2f", z_jump) +
                  " (tol |z| < 3, 1e5 paths)"};
}

// ---------------------------------------------------------------- 5
Outcome gradient_checks() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(500 + seed);
    {
      const auto act = seed % 2 ? nn::Activation::tanh : nn::Activation::relu;
      auto net = nn::DenseNet::glorot({10, 16, 16, 4}, act, rng);
      for (std::size_t l = 0; l < net.num_layers(); ++l)
        net.bias(l) = Eigen::VectorXd::NullaryExpr(net.bias(l).size(), [&] { return 0.1 * standard_normal(rng); });
      const Eigen::MatrixXd x = Eigen::MatrixXd::NullaryExpr(10, 4, [&] { return standard_normal(rng); });
      const Eigen::MatrixXd w = Eigen::MatrixXd::NullaryExpr(4, 4, [&] { return standard_normal(rng); });
      nn::Tape tape;
      net.forward(x, &tape);
      std::vector<double> analytic(net.num_params(), 0.0);
      net.backward(tape, w, analytic);
      const auto numeric = testing::numeric_gradient(
          net.params(), [&] { return (net.forward(x, nullptr).array() * w.array()).sum(); });
      worst = std::max(worst, testing::max_relative_error(analytic, numeric));
    }
    {
      auto film = nn::FiLMLayer::create(5, 8, 6, rng);
      const Eigen::MatrixXd h = Eigen::MatrixXd::NullaryExpr(6, 3, [&] { return standard_normal(rng); });
      const Eigen::MatrixXd c = Eigen::MatrixXd::NullaryExpr(5, 3, [&] { return standard_normal(rng); });
      const Eigen::MatrixXd w = Eigen::MatrixXd::NullaryExpr(6, 3, [&] { return standard_normal(rng); });
      nn::Tape tape;
      const auto mod = film.modulation(c, &tape);
      std::vector<double> analytic(film.condition_net().num_params(), 0.0);
      film.backward(tape, mod, h, w, analytic);
      const auto numeric = testing::numeric_gradient(film.condition_net().params(), [&] {
        return (film.modulate(h, c).array() * w.array()).sum();
      });
      worst = std::max(worst, testing::max_relative_error(analytic, numeric));
    }
    {
      meanflow::VelocityNetConfig cfg;
      cfg.action_dim = 8;
      cfg.condition_dim = 6;
      cfg.hidden = 16;
      cfg.film_hidden = 8;
      auto net = meanflow::VelocityNet::create(cfg, rng);
      auto gauss = [&](int r, int c) { return Eigen::MatrixXd::NullaryExpr(r, c, [&] { return standard_normal(rng); }); };
      const Eigen::MatrixXd z = gauss(8, 3), s = gauss(6, 3), probe = gauss(8, 3);
      const Eigen::RowVectorXd r = Eigen::RowVectorXd::NullaryExpr(3, [&] { return 0.5 * uniform01(rng); });
      const Eigen::RowVectorXd t = r.array() + 0.4;
      meanflow::VelocityNet::Tape tape;
      net.forward(z, r, t, s, &tape);
      std::vector<double> analytic(net.num_params(), 0.0);
      net.backward(tape, probe, analytic);
      std::vector<double> numeric;
      const auto group = net.param_group();
      for (auto part : group.parts()) {
        const auto g = testing::numeric_gradient(
            part, [&] { return (net.forward(z, r, t, s).array() * probe.array()).sum(); });
        numeric.insert(numeric.end(), g.begin(), g.end());
      }
      worst = std::max(worst, testing::max_relative_error(analytic, numeric));
    }
  }
  return {worst < 1e-4, "DenseNet (relu/tanh), FiLM, VelocityNet over 10 seeds: max relative error " +
                            fmt("%.2e", worst) + " (tol 1e-4)"};
}

// ---------------------------------------------------------------- 6
double heldout_mse(const meanflow::MeanFlowPolicy& pol, const std::vector<data::Demonstration>& held, Rng& rng) {
  double se = 0.0;
  long n = 0;
  const auto& h = pol.horizons;
  for (const auto& d : held) {
    const Eigen::VectorXd cond = pol.stats.condition(std::span<const double>(d.window));
    Eigen::VectorXd w(h.noise_dim());
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = standard_normal(rng);
    const Eigen::MatrixXd chunk = pol.generate_chunk(w, cond);
    for (int j = 0; j < h.pred; ++j)
      for (int k = 0; k < data::kActionDim; ++k) {
        const double e = pol.stats.normalize_action(k, chunk(j, k)) -
                         pol.stats.normalize_action(k, d.chunk[static_cast<std::size_t>(j * data::kActionDim + k)]);
        se += e * e;
        ++n;
      }
  }
  return se / static_cast<double>(n);
}

std::vector<data::Demonstration> linear_teacher(int n, Rng& rng, const data::Horizons& h) {
  std::vector<data::Demonstration> out;
  for (int i = 0; i < n; ++i) {
    data::Demonstration d;
    const int q = static_cast<int>(std::floor(uniform01(rng) * 21.0)) - 10;
    for (int k = 0; k < h.obs; ++k) {
      const int qk = k == h.obs - 1 ? q : std::clamp(q + (uniform01(rng) < 0.5 ? -1 : 1), -10, 10);
      const double s[5] = {uniform01(rng), 1000.0 + 10.0 * standard_normal(rng), static_cast<double>(qk),
                           100.0 + standard_normal(rng), 1.4 + 0.1 * standard_normal(rng)};
      d.window.insert(d.window.end(), s, s + 5);
    }
    for (int j = 0; j < h.pred; ++j) {
      d.chunk.push_back(0.7 - 0.05 * q);
      d.chunk.push_back(0.7 + 0.05 * q);
    }
    out.push_back(std::move(d));
  }
  return out;
}

Outcome meanflow_learning() {
  const data::Horizons h;
  meanflow::PretrainConfig cfg;
  cfg.steps = 5000;
  cfg.seed = 6;

  data::Demonstration fixed;
  for (int k = 0; k < h.obs; ++k) {
    const double s[5] = {0.3 + 0.01 * k, 1001.0, 2.0, 100.2, 1.3};
    fixed.window.insert(fixed.window.end(), s, s + 5);
  }
  for (int j = 0; j < h.pred; ++j) {
    fixed.chunk.push_back(0.5 + 0.3 * std::sin(0.7 * j));
    fixed.chunk.push_back(0.8 + 0.2 * std::cos(0.4 * j));
  }
  const auto constant = meanflow::pretrain(data::finalize_dataset({fixed}, h), cfg);
  Rng g1(61);
  const double mse_const = heldout_mse(constant, std::vector<data::Demonstration>(200, fixed), g1);

  Rng rng(62);
  const auto train = linear_teacher(20000, rng, h);
  const auto linear = meanflow::pretrain(data::finalize_dataset(train, h), cfg);
  const auto held = linear_teacher(2000, rng, h);
  Rng g2(63);
  const double mse_linear = heldout_mse(linear, held, g2);
  const bool ok = mse_const < 1e-2 && mse_linear < 1e-2;
  return {ok, "one-step MSE (normalized units) constant " + fmt("%.2e", mse_const) + ", linear-in-q held-out " +
                  fmt("%.2e", mse_linear) + " after 5000 steps (tol 1e-2)"};
}

// ---------------------------------------------------------------- pipeline
struct Pipeline {
  fs::path dir;
  std::shared_ptr<const meanflow::MeanFlowPolicy> expert;
  std::shared_ptr<const rl::FineTunedPolicy> finetuned;
  std::string expert_file_hash_before;
  std::string expert_file_hash_after;
};

Pipeline& pipeline() {
  static Pipeline p;
  return p;
}

Outcome imitation_parity() {
  auto& p = pipeline();
  p.dir = work_dir() / "full";
  fs::remove_all(p.dir);
  const std::string d = p.dir.string();
  cli_or_throw({"gen-data", "--out", d});
  cli_or_throw({"train", "--out", d, "--set", "dataset=" + (p.dir / "dataset.bin").string()});
  p.expert = std::make_shared<const meanflow::MeanFlowPolicy>(
      meanflow::MeanFlowPolicy::load((p.dir / "expert.ckpt").string()));

  const auto ll = eval::mode_scenario(eval::Mode::LL);
  std::vector<std::unique_ptr<experts::QuotingStrategy>> owned;
  std::vector<const experts::QuotingStrategy*> candidates;
  for (auto k : {experts::ExpertKind::as, experts::ExpertKind::glft, experts::ExpertKind::glft_drift}) {
    owned.push_back(experts::make_expert(k, ll));
    candidates.push_back(owned.back().get());
  }
  const auto board = data::evaluate_candidates(ll, candidates, 100, 7);
  const auto teacher = board[data::select_expert(board)].kind;

  const std::vector<eval::Contender> who{
      eval::expert_contender(teacher),
      eval::fixed_contender("Pretrained", std::make_shared<meanflow::PretrainedStrategy>(p.expert))};
  const auto rep = eval::run_benchmark(who, {eval::Mode::LL}, 2000, 7);
  const double t = rep.cells[0].mean_pnl, m = rep.cells[1].mean_pnl;
  const double gap = std::abs(m - t) / std::abs(t);
  return {gap <= 0.15, "LL, 2000 shared-seed episodes: pretrained PnL " + fmt("%.3f", m) + " vs teacher " +
                           experts::to_string(teacher) + " " + fmt("%.3f", t) + ", gap " + fmt("%.1f%%", 100 * gap) +
                           " (tol 15%)"};
}

Outcome finetune_improvement() {
  auto& p = pipeline();
  if (!p.expert) return {false, "pipeline unavailable"};
  const fs::path ck = p.dir / "expert.ckpt";
  p.expert_file_hash_before = io::file_hash(ck.string());
  cli_or_throw({"finetune", "--out", (p.dir / "ft").string(), "--mode", "LL", "--set", "expert=" + ck.string()});
  p.expert_file_hash_after = io::file_hash(ck.string());
  p.finetuned = std::make_shared<const rl::FineTunedPolicy>(
      rl::FineTunedPolicy::load((p.dir / "ft" / "finetune.ckpt").string(), p.expert));

  const std::vector<eval::Contender> who{
      eval::fixed_contender("Pretrained", std::make_shared<meanflow::PretrainedStrategy>(p.expert)),
      eval::fixed_contender("FinFlowRL", std::make_shared<rl::FineTunedStrategy>(p.finetuned))};
  std::vector<eval::CellEpisodes> detail;
  const auto rep = eval::run_benchmark(who, {eval::Mode::LL}, 2000, 8, &detail);
  const auto test = eval::paired_t_test(detail[1].pnl, detail[0].pnl);
  const double pre = rep.cells[0].mean_pnl, ft = rep.cells[1].mean_pnl;
  const bool ok = ft > pre && test.p_value_one_sided < 0.05;
  return {ok, "LL, 16 envs x 200 updates, 2000 shared-seed episodes: fine-tuned PnL " + fmt("%.3f", ft) +
                  " vs pretrained " + fmt("%.3f", pre) + ", one-sided paired p = " +
                  fmt("%.2e", test.p_value_one_sided) + " (tol p < 0.05)"};
}

// ---------------------------------------------------------------- 9
Outcome baseline_ordering() {
  const std::vector<eval::Contender> who{eval::expert_contender(experts::ExpertKind::as),
                                         eval::expert_contender(experts::ExpertKind::glft),
                                         eval::expert_contender(experts::ExpertKind::random)};
  const auto rep = eval::run_benchmark(who, {eval::Mode::LH, eval::Mode::LL}, 2000, 9);
  bool ok = true;
  std::string detail;
  for (const char* m : {"LH", "LL"}) {
    const double as = rep.cell(m, "AS").mean_pnl, glft = rep.cell(m, "GLFT").mean_pnl,
                 rnd = rep.cell(m, "Random").mean_pnl;
    ok &= glft >= as - 0.05 * std::abs(as);
    ok &= rnd > 0.0 && as >= 5.0 * rnd && glft >= 5.0 * rnd;
    detail += std::string(m) + ": GLFT " + fmt("%.2f", glft) + " AS " + fmt("%.2f", as) + " Random " +
              fmt("%.2f", rnd) + "; ";
  }
  return {ok, detail + "(GLFT >= AS - 5%, both >= 5x Random, 2000 episodes)"};
}

// ---------------------------------------------------------------- 10
Outcome freeze_and_determinism() {
  auto& p = pipeline();
  bool ok = true;
  std::string detail;
  if (p.finetuned) {
    const bool frozen = p.expert_file_hash_before == p.expert_file_hash_after &&
                        p.finetuned->expert_hash == p.expert->parameter_hash();
    ok &= frozen;
    detail += std::string("frozen expert ") + (frozen ? "unchanged" : "CHANGED") + "; ";
  } else {
    ok = false;
    detail += "fine-tune unavailable; ";
  }

  const fs::path dir = work_dir() / "repro";
  const fs::path first = work_dir() / "repro_first";
  const std::string d = dir.string();
  const std::string ds = (dir / "dataset.bin").string();
  const std::string ck = (dir / "expert.ckpt").string();
  const std::string ftck = (dir / "ft" / "finetune.ckpt").string();
  auto run_all = [&] {
    fs::remove_all(dir);
    cli_or_throw({"gen-data", "--out", d, "--episodes", "2", "--seed", "11", "--set", "tournament_episodes=3"});
    cli_or_throw({"train", "--out", d, "--seed", "11", "--updates", "150", "--set", "dataset=" + ds, "--set",
                  "log_every=50"});
    cli_or_throw({"finetune", "--out", (dir / "ft").string(), "--seed", "11", "--updates", "3", "--set",
                  "expert=" + ck, "--set", "envs=3", "--set", "chunks_per_env=20", "--set", "minibatch=16"});
    cli_or_throw({"eval", "--out", (dir / "ev").string(), "--seed", "11", "--episodes", "40", "--mode", "LL",
                  "--plot-data", "--set", "expert=" + ck, "--set", "finetuned=" + ftck, "--set", "ppo_updates=2"});
  };
  const char* saved = std::getenv("FINFLOW_THREADS");
  const std::string saved_value = saved ? saved : "";
  setenv("FINFLOW_THREADS", "1", 1);
  run_all();
  fs::remove_all(first);
  fs::copy(dir, first, fs::copy_options::recursive);
  setenv("FINFLOW_THREADS", "3", 1);
  run_all();
  if (saved) {
    setenv("FINFLOW_THREADS", saved_value.c_str(), 1);
  } else {
    unsetenv("FINFLOW_THREADS");
  }

  int files = 0, differing = 0;
  for (const auto& e : fs::recursive_directory_iterator(first)) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), first);
    ++files;
    if (read_file(e.path()) != read_file(dir / rel)) {
      ++differing;
      detail += "differs: " + rel.string() + "; ";
    }
  }
  ok &= differing == 0 && files >= 12;
  detail += std::to_string(files) + " artifacts from gen-data/train/finetune/eval compared byte-for-byte across "
            "two runs (1 vs 3 worker threads), " + std::to_string(differing) + " differ";
  return {ok, detail};
}

// ---------------------------------------------------------------- 11
Outcome latency() {
  auto& p = pipeline();
  std::shared_ptr<const rl::FineTunedPolicy> ft = p.finetuned;
  if (!ft) {
    Rng rng(11);
    auto expert = std::make_shared<const meanflow::MeanFlowPolicy>(
        meanflow::MeanFlowPolicy{meanflow::VelocityNet::create({}, rng), data::NormStats{}, data::Horizons{}});
    ft = std::make_shared<const rl::FineTunedPolicy>(rl::init_finetune(expert, rl::FinetuneConfig{}));
  }
  const auto r = eval::bench_latency(*ft, 1000000, 11);
  const bool ok = r.mean_us_per_action < 50.0 && r.mean_us_per_action > 0.0 && r.p99_us_per_action >= 0.0;
  return {ok, "1e6 infer_chunk calls, " + std::to_string(r.exec) + " actions each: mean " +
                  fmt("%.3f", r.mean_us_per_action) + " us/action, p99 " + fmt("%.3f", r.p99_us_per_action) +
                  " us/action (tol mean < 50 us)"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "metric oracles", 1, metric_oracles},
      {2, "expert formula suite", 1, expert_formulas},
      {3, "Hawkes correctness", 30, hawkes},
      {4, "price-path moments", 30, price_moments},
      {5, "gradient checks", 10, gradient_checks},
      {6, "MeanFlow desk-scale learning", 300, meanflow_learning},
      {7, "imitation parity", 600, imitation_parity},
      {8, "fine-tuning improvement", 1800, finetune_improvement},
      {9, "baseline ordering", 600, baseline_ordering},
      {10, "freeze and determinism", 600, freeze_and_determinism},
      {11, "latency benchmark", 600, latency},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("[%s] %2d %s: %s [%.1f s, budget %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                o.detail.c_str(), secs, c.budget_s, in_time ? "" : ", OVER BUDGET");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
