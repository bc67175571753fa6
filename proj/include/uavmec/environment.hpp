#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "uavmec/channel.hpp"
#include "uavmec/computation.hpp"
#include "uavmec/config.hpp"
#include "uavmec/objective.hpp"
#include "uavmec/queueing.hpp"
#include "uavmec/rng.hpp"

namespace uavmec {

enum class UavMove : std::uint8_t { stay = 0, pos_x, neg_x, pos_y, neg_y };
inline constexpr std::size_t kNumUavMoves = 5;

struct ActionVector {
  std::vector<DeviceFractions> devices;
  UavMove move = UavMove::stay;

  friend bool operator==(const ActionVector&, const ActionVector&) = default;
};

/// Joint enumeration of every per-device fraction combination and UAV move.
/// Ordering is lexicographic with device 0 most significant and the move
/// least significant; within a device the order is x_uav, x_cloud, w_uav,
/// w_cloud, each running over config.fraction_levels.
std::vector<ActionVector> action_catalog(const SimConfig& config);

/// Number of entries action_catalog(config) would hold.
std::size_t catalog_size(const SimConfig& config);

/// Position of `action` in action_catalog(config).
std::size_t action_index(const ActionVector& action, const SimConfig& config);

/// 0..9 bucket of a backlog relative to `cap`.
int queue_level(double q, double cap);

struct Observation {
  std::vector<std::uint8_t> levels;  // 3 per device: local, uav, cloud
  std::vector<double> uav_xy;        // normalised to [0,1]; empty unless enabled
  std::vector<QueueTriple> raw;

  /// Network input: levels / 9 followed by uav_xy.
  std::vector<double> normalized() const;

  friend bool operator==(const Observation&, const Observation&) = default;
};

struct DeviceInterval {
  QueueTriple queues;  // at the start of the interval
  DeviceFractions fractions;
  SplitAmounts splits;
  double arrival = 0.0;
  double distance = 0.0;
  double power_gain = 0.0;
  double sinr = 0.0;
  double rate = 0.0;
  DelayBreakdown delays;
  double comm_delay = 0.0;
  double processed = 0.0;
  double historical_pde = 0.0;  // device PDE over earlier intervals
  bool deadline_met = true;
  double reward = 0.0;
};

/// Everything that happened in one interval.
struct IntervalRecord {
  std::size_t interval = 0;
  Position2D uav_before;
  Position2D uav_after;
  std::vector<DeviceInterval> devices;
  FeasibilityReport feasibility;
  double reward = 0.0;
};

struct TransitionRecord {
  Observation observation;
  std::size_t action = 0;
  double reward = 0.0;
  Observation next_observation;
  bool done = false;
  IntervalRecord interval;
};

struct EpisodeState {
  std::size_t interval = 0;
  std::vector<QueueTriple> queues;
  Position2D uav;
  PdeAccumulator accumulator;
  Rng channel_rng;
  Rng arrival_rng;
};

/// One episode at a time of the device/UAV/cloud network. Device placement is
/// fixed for the lifetime of the instance; reset() restarts queues, the UAV
/// and the random streams.
class Environment {
 public:
  Environment(SimConfig config, std::uint64_t layout_seed);

  Observation reset(std::uint64_t seed);
  TransitionRecord step(std::size_t action);
  Observation observe() const;

  bool done() const { return state_.interval >= config_.num_intervals; }

  const SimConfig& config() const { return config_; }
  const std::vector<ActionVector>& catalog() const { return catalog_; }
  const std::vector<Position2D>& device_positions() const { return devices_; }
  const EpisodeState& state() const { return state_; }
  std::size_t observation_size() const;

  /// Replaces the episode state, e.g. to script a specific interval.
  void load_state(EpisodeState state);

 private:
  Position2D apply_move(Position2D from, UavMove move) const;

  SimConfig config_;
  std::vector<ActionVector> catalog_;
  std::vector<Position2D> devices_;
  ChannelParams channel_;
  LinkBudget link_;
  ComputeParams compute_;
  FeasibilityLimits limits_;
  std::vector<CpuAllocation> cpu_;
  std::vector<double> tx_powers_;
  EpisodeState state_;
};

/// Seed of the i-th training or evaluation episode for an experiment seed.
std::uint64_t training_episode_seed(std::uint64_t seed, std::size_t episode);
std::uint64_t evaluation_episode_seed(std::uint64_t seed, std::size_t realization);

}  // namespace uavmec
