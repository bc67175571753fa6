#include "uavmec/baselines.hpp"

#include <stdexcept>

namespace uavmec {

DeviceFractions uav_heavy_fractions() { return {0.6, 0.3, 0.6, 0.3}; }

DeviceFractions cloud_heavy_fractions() { return {0.6, 0.6, 0.3, 0.6}; }

std::size_t baseline_action(PolicyKind kind, const SimConfig& config, Rng& rng) {
  switch (kind) {
    case PolicyKind::random: {
      std::uniform_int_distribution<std::size_t> pick(0, catalog_size(config) - 1);
      return pick(rng);
    }
    case PolicyKind::uav_heavy: {
      ActionVector a{std::vector<DeviceFractions>(config.num_devices, uav_heavy_fractions()),
                     UavMove::stay};
      return action_index(a, config);
    }
    case PolicyKind::cloud_heavy: {
      ActionVector a{std::vector<DeviceFractions>(config.num_devices, cloud_heavy_fractions()),
                     UavMove::stay};
      return action_index(a, config);
    }
    case PolicyKind::dqn: break;
  }
  throw std::invalid_argument("baseline_action: the DQN policy needs a trained network");
}

}  // namespace uavmec
