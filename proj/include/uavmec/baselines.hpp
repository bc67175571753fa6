#pragma once

#include <cstddef>

#include "uavmec/config.hpp"
#include "uavmec/environment.hpp"
#include "uavmec/rng.hpp"

namespace uavmec {

/// Fixed per-device fractions of the UAV-centric baseline: 60% offloaded to
/// and processed by the hovering UAV.
DeviceFractions uav_heavy_fractions();
/// Fixed per-device fractions of the cloud-centric baseline: 60% forwarded to
/// and processed by the cloud.
DeviceFractions cloud_heavy_fractions();

/// Catalog index chosen by a non-learning policy. Throws for PolicyKind::dqn.
std::size_t baseline_action(PolicyKind kind, const SimConfig& config, Rng& rng);

}  // namespace uavmec
