#pragma once

#include <cstdint>

#include "finflow/rl/finetune.hpp"

namespace finflow::eval {

struct LatencyReport {
  long calls = 0;
  int exec = 0;                     // actions produced per call
  double mean_us_per_action = 0.0;
  double p99_us_per_action = 0.0;
  double checksum = 0.0;            // sum of produced spreads, keeps the work observable
};

/// Times `calls` infer_chunk calls on synthetic windows (a pool of random
/// market states cycled in order). Each call is timed individually.
LatencyReport bench_latency(const rl::FineTunedPolicy& policy, long calls, std::uint64_t seed);

}  // namespace finflow::eval
