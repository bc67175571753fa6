#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "uavmec/channel.hpp"
#include "uavmec/queueing.hpp"

namespace uavmec {

/// Bits served across the three tiers for one device in one interval.
double processed_total(double b_local, double b_uav, double b_cloud);

/// processed / delay with the conventions 0/0 = 0 and x/0 = +inf for x > 0.
double pde_ratio(double processed, double delay);

/// Running sums of processed bits and communication delay, overall and per
/// device, plus the per-interval totals needed for short-term PDE queries.
class PdeAccumulator {
 public:
  PdeAccumulator() = default;
  explicit PdeAccumulator(std::size_t num_devices);

  /// Appends one interval. Both spans hold one entry per device.
  void record(std::span<const double> processed, std::span<const double> comm_delay);
  /// Appends every interval of `other` after the ones already recorded.
  void merge(const PdeAccumulator& other);
  void clear();

  std::size_t num_devices() const { return device_processed_.size(); }
  std::size_t intervals() const { return interval_processed_.size() - 1; }

  double cum_processed() const { return cum_processed_; }
  double cum_comm_delay() const { return cum_comm_delay_; }
  double device_processed(std::size_t k) const { return device_processed_.at(k); }
  double device_comm_delay(std::size_t k) const { return device_comm_delay_.at(k); }

  /// Historical PDE of a single device; 0 until it has any delay history.
  double device_pde(std::size_t k) const;

  /// Sums over the first n recorded intervals (all devices).
  double processed_before(std::size_t n) const;
  double comm_delay_before(std::size_t n) const;

 private:
  double cum_processed_ = 0.0;
  double cum_comm_delay_ = 0.0;
  std::vector<double> device_processed_;
  std::vector<double> device_comm_delay_;
  // Prefix sums: entry n is the total over intervals 0..n-1.
  std::vector<double> interval_processed_{0.0};
  std::vector<double> interval_comm_delay_{0.0};
};

double long_term_pde(const PdeAccumulator& acc);

/// Ratio of the sums over intervals 0..n-1; 0 for n == 0 or no delay.
double short_term_pde(const PdeAccumulator& acc, std::size_t n);

struct RewardWeights {
  double v1 = 1e-6;
  double v2 = 1e-6;
  double v3 = 1e-6;
  double v4 = 1.0;
  double lyapunov_v = 1.0;
  /// Subtracted from a device's reward when its end-to-end delay misses the
  /// interval deadline. Zero keeps the reward exactly as in the MDP definition.
  double violation_penalty = 0.0;

  void validate() const;
};

/// Q^L(B^L + D^U) for one device: credit for draining the device queue.
double local_drain_term(const QueueTriple& q, const SplitAmounts& s);
/// Q^U(D^U - B^U - D^C): net growth pressure on the UAV queue.
double uav_growth_term(const QueueTriple& q, const SplitAmounts& s);
/// Q^C(D^C - B^C): net growth pressure on the cloud queue.
double cloud_growth_term(const QueueTriple& q, const SplitAmounts& s);

/// Per-interval drift-plus-penalty objective summed over devices. `queues`,
/// `splits` and `comm_delays` hold one entry per device; the short-term PDE
/// U[n] is read from `acc` at `interval`.
double drift_plus_penalty_value(std::span<const QueueTriple> queues,
                                std::span<const SplitAmounts> splits,
                                std::span<const double> comm_delays, const PdeAccumulator& acc,
                                const RewardWeights& weights, std::size_t interval);

/// Per-device reward. `historical_pde` is the device's own PDE over the
/// intervals before this one. The PDE term is dropped entirely when the
/// deadline indicator is false.
double reward(const QueueTriple& q, const SplitAmounts& s, double comm_delay,
              double historical_pde, const RewardWeights& weights, bool deadline_met);

double reward(const QueueTriple& q, const SplitAmounts& s, double comm_delay,
              const PdeAccumulator& acc, std::size_t device, const RewardWeights& weights,
              bool deadline_met);

// ---------------------------------------------------------------------------
// Feasibility

struct DeviceFractions {
  double x_uav = 0.0;
  double x_cloud = 0.0;
  double w_uav = 0.0;
  double w_cloud = 0.0;

  friend bool operator==(const DeviceFractions&, const DeviceFractions&) = default;
};

struct CpuAllocation {
  double local = 0.0;
  double uav = 0.0;
  double cloud = 0.0;
};

struct FeasibilityLimits {
  double p_max = 0.1;
  double local_cpu_max = 1e6;
  double uav_cpu_max = 5e6;
  double cloud_cpu_max = 1e8;
  double v_max = 30.0;
  double tau = 1.0;
  double area_width = 500.0;
  double area_height = 500.0;
  Position2D start{250.0, 250.0};
  Position2D finish{250.0, 250.0};
  std::size_t num_intervals = 1000;
};

/// Everything decided or measured for one interval that the constraints look at.
struct IntervalDecision {
  std::size_t interval = 0;
  std::span<const double> tx_powers;
  std::span<const DeviceFractions> fractions;
  double w_local = 0.0;
  std::span<const CpuAllocation> cpu;
  Position2D uav_before;
  Position2D uav_after;
  std::span<const double> total_delays;
};

struct FeasibilityReport {
  bool c1_power = true;
  bool c2_offload_fractions = true;
  bool c3_processing_fractions = true;
  bool c4_local_cpu = true;
  bool c5_uav_cpu = true;
  bool c6_cloud_cpu = true;
  bool c7_speed = true;
  bool c8_endpoints = true;
  bool c9_area = true;
  bool c10_deadline = true;
  std::vector<bool> eta;  // per device: total delay within the interval

  bool all_satisfied() const;
  friend bool operator==(const FeasibilityReport&, const FeasibilityReport&) = default;
};

FeasibilityReport check_feasibility(const IntervalDecision& decision,
                                    const FeasibilityLimits& limits);

}  // namespace uavmec
