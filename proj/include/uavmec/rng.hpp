#pragma once

#include <cstdint>
#include <random>

namespace uavmec {

using Rng = std::mt19937_64;

/// Independent sub-streams derived from one experiment seed. Each consumer
/// (channel draws, arrivals, exploration, ...) owns its own stream so that
/// changing how one of them is consumed never perturbs the others.
enum class StreamTag : std::uint32_t {
  layout = 1,
  channel = 2,
  arrival = 3,
  policy = 4,
  training = 5,
  training_episode = 6,
  evaluation_episode = 7,
};

inline Rng make_stream(std::uint64_t seed, StreamTag tag, std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

/// Draws a 64-bit seed for a child component (e.g. one episode) from a stream.
inline std::uint64_t derive_seed(std::uint64_t seed, StreamTag tag, std::uint64_t index) {
  auto rng = make_stream(seed, tag, index);
  return rng();
}

}  // namespace uavmec
