#pragma once

// Property checks shared by the `selftest` CLI verb and the acceptance suite.
// Each check is deterministic for a given seed and reports its own runtime.

#include <cstdint>
#include <string>
#include <vector>

namespace uavmec::selftest {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Library queue splits/updates against the reference evaluator, bit for bit.
CheckResult check_queue_oracle(std::uint64_t seed, std::size_t instances = 1000);

/// Library reward against a term-by-term evaluation, plus the single-device
/// reduction of the reward to the drift-plus-penalty value.
CheckResult check_reward_oracle(std::uint64_t seed, std::size_t instances = 100);

/// Mean power of the Rician amplitude and its collapse to pure LoS.
CheckResult check_channel_statistics(std::uint64_t seed, std::size_t samples = 100000);

/// Backprop against central finite differences on small random networks.
CheckResult check_gradient(std::uint64_t seed, std::size_t networks = 10);

/// Random valid fractions and arrivals never drive a queue negative nor hit
/// the {.}^+ clamp; exercised both on a bare queue triple and through the
/// environment.
CheckResult check_queue_fuzz(std::uint64_t seed, std::size_t steps = 100000);

std::vector<CheckResult> run_all(std::uint64_t seed);

}  // namespace uavmec::selftest
