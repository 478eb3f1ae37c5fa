#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace finflow {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Counter-based seed derivation. Every component seed is a pure function of
/// the global seed and a path of counters (stream id, episode index, ...), so
/// the order in which work is scheduled never changes what a unit of work sees.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path);

/// Well-known stream ids used with derive_seed.
namespace stream {
inline constexpr std::uint64_t price_path = 1;
inline constexpr std::uint64_t fills = 2;
inline constexpr std::uint64_t strategy = 3;
inline constexpr std::uint64_t episode = 4;
inline constexpr std::uint64_t init = 5;
inline constexpr std::uint64_t training = 6;
inline constexpr std::uint64_t rollout = 7;
inline constexpr std::uint64_t tournament = 8;
inline constexpr std::uint64_t collection = 9;
inline constexpr std::uint64_t evaluation = 10;
}  // namespace stream

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline double standard_normal(Rng& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace finflow
