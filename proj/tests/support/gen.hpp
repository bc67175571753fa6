#pragma once

// Small random generators for property tests. Every test builds its own Gen
// from a fixed seed, so failures replay exactly.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "uavmec/queueing.hpp"

namespace testgen {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double unit() { return uniform(0.0, 1.0); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool coin(double p = 0.5) { return unit() < p; }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }

  /// Positive value spread over several decades.
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

  /// Backlog that is sometimes exactly zero.
  double backlog(double hi = 1e7) { return coin(0.1) ? 0.0 : log_uniform(1.0, hi); }

  uavmec::QueueTriple queues(double hi = 1e7) { return {backlog(hi), backlog(hi), backlog(hi)}; }

  std::vector<double> vector(std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = uniform(lo, hi);
    return v;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Relative difference with a floor on the scale, for tolerance checks.
inline double rel_diff(double a, double b, double floor = 1e-300) {
  const double scale = std::max({std::abs(a), std::abs(b), floor});
  return std::abs(a - b) / scale;
}

}  // namespace testgen
