#include "finflow/eval/latency.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "finflow/common/rng.hpp"

namespace finflow::eval {

LatencyReport bench_latency(const rl::FineTunedPolicy& policy, long calls, std::uint64_t seed) {
  if (calls < 1) throw std::invalid_argument("bench_latency: calls must be >= 1");
  const auto& h = policy.expert->horizons;
  constexpr int kPool = 1024;
  Rng rng(derive_seed(seed, {stream::evaluation}));
  std::vector<std::vector<market::MarketState>> pool(kPool);
  for (auto& window : pool) {
    for (int k = 0; k < h.obs; ++k) {
      market::MarketState s;
      s.time = uniform01(rng);
      s.cash = 1000.0 + 20.0 * standard_normal(rng);
      s.inventory = static_cast<int>(std::lround(6.0 * standard_normal(rng)));
      s.inventory = std::clamp(s.inventory, -10, 10);
      s.mid_price = 100.0 * (1.0 + 0.02 * standard_normal(rng));
      s.prev_spread = 2.0 * uniform01(rng);
      window.push_back(s);
    }
  }

  LatencyReport r;
  r.calls = calls;
  r.exec = h.exec;
  std::vector<double> per_call(static_cast<std::size_t>(calls));
  double total = 0.0;
  for (long i = 0; i < calls; ++i) {
    const auto& window = pool[static_cast<std::size_t>(i % kPool)];
    const auto t0 = std::chrono::steady_clock::now();
    const Eigen::MatrixXd a = policy.infer_chunk(window);
    const auto t1 = std::chrono::steady_clock::now();
    r.checksum += a.sum();
    const double us = std::chrono::duration<double, std::micro>(t1 - t0).count();
    per_call[static_cast<std::size_t>(i)] = us;
    total += us;
  }
  r.mean_us_per_action = total / static_cast<double>(calls) / h.exec;
  const auto k = static_cast<std::size_t>(0.99 * static_cast<double>(calls - 1));
  std::nth_element(per_call.begin(), per_call.begin() + static_cast<std::ptrdiff_t>(k), per_call.end());
  r.p99_us_per_action = per_call[k] / h.exec;
  return r;
}

}  // namespace finflow::eval
