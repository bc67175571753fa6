#pragma once

#include <span>

#include "uavmec/rng.hpp"

namespace uavmec {

/// Backlogs in bits for one device: its own queue and the queues the UAV and
/// the cloud keep on its behalf.
struct QueueTriple {
  double local = 0.0;
  double uav = 0.0;
  double cloud = 0.0;

  friend bool operator==(const QueueTriple&, const QueueTriple&) = default;
};

/// Bits moved or served in one interval, all computed from the backlogs at the
/// start of the interval.
struct SplitAmounts {
  double d_uav = 0.0;    // device -> UAV
  double b_local = 0.0;  // served at the device
  double d_cloud = 0.0;  // UAV -> cloud
  double b_uav = 0.0;    // served at the UAV
  double b_cloud = 0.0;  // served at the cloud

  friend bool operator==(const SplitAmounts&, const SplitAmounts&) = default;
};

struct ArrivalProcess {
  double max_bits = 2.5e5;
};

/// Throws std::invalid_argument if any fraction is outside [0, 1].
SplitAmounts compute_splits(const QueueTriple& q, double x_uav, double x_cloud, double w_local,
                            double w_uav, double w_cloud);

double update_local(double q_local, const SplitAmounts& s, double arrival);
double update_uav(double q_uav, const SplitAmounts& s);
double update_cloud(double q_cloud, const SplitAmounts& s);

inline QueueTriple update_queues(const QueueTriple& q, const SplitAmounts& s, double arrival) {
  return {update_local(q.local, s, arrival), update_uav(q.uav, s), update_cloud(q.cloud, s)};
}

/// Uniform on [0, max_bits].
double draw_arrival(Rng& rng, const ArrivalProcess& process);

/// Per-queue arithmetic mean; throws std::invalid_argument on empty input.
QueueTriple running_mean_backlog(std::span<const QueueTriple> history);

}  // namespace uavmec
