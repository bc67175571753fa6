#include "uavmec/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace uavmec {

double processed_total(double b_local, double b_uav, double b_cloud) {
  return b_local + b_uav + b_cloud;
}

double pde_ratio(double processed, double delay) {
  if (delay == 0.0) return processed > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return processed / delay;
}

PdeAccumulator::PdeAccumulator(std::size_t num_devices)
    : device_processed_(num_devices, 0.0),
      device_comm_delay_(num_devices, 0.0) {}

void PdeAccumulator::record(std::span<const double> processed,
                            std::span<const double> comm_delay) {
  if (processed.size() != num_devices() || comm_delay.size() != num_devices())
    throw std::invalid_argument("PdeAccumulator::record: one entry per device expected");
  double b = 0.0;
  double t = 0.0;
  for (std::size_t k = 0; k < num_devices(); ++k) {
    device_processed_[k] += processed[k];
    device_comm_delay_[k] += comm_delay[k];
    b += processed[k];
    t += comm_delay[k];
  }
  cum_processed_ += b;
  cum_comm_delay_ += t;
  interval_processed_.push_back(interval_processed_.back() + b);
  interval_comm_delay_.push_back(interval_comm_delay_.back() + t);
}

void PdeAccumulator::merge(const PdeAccumulator& other) {
  if (other.num_devices() != num_devices())
    throw std::invalid_argument("PdeAccumulator::merge: device count mismatch");
  for (std::size_t k = 0; k < num_devices(); ++k) {
    device_processed_[k] += other.device_processed_[k];
    device_comm_delay_[k] += other.device_comm_delay_[k];
  }
  cum_processed_ += other.cum_processed_;
  cum_comm_delay_ += other.cum_comm_delay_;
  const double base_b = interval_processed_.back();
  const double base_t = interval_comm_delay_.back();
  for (std::size_t n = 1; n < other.interval_processed_.size(); ++n) {
    interval_processed_.push_back(base_b + other.interval_processed_[n]);
    interval_comm_delay_.push_back(base_t + other.interval_comm_delay_[n]);
  }
}

void PdeAccumulator::clear() { *this = PdeAccumulator(num_devices()); }

double PdeAccumulator::device_pde(std::size_t k) const {
  const double t = device_comm_delay_.at(k);
  if (t == 0.0) return 0.0;
  return device_processed_.at(k) / t;
}

double PdeAccumulator::processed_before(std::size_t n) const {
  return interval_processed_.at(std::min(n, interval_processed_.size() - 1));
}

double PdeAccumulator::comm_delay_before(std::size_t n) const {
  return interval_comm_delay_.at(std::min(n, interval_comm_delay_.size() - 1));
}

double long_term_pde(const PdeAccumulator& acc) {
  return pde_ratio(acc.cum_processed(), acc.cum_comm_delay());
}

double short_term_pde(const PdeAccumulator& acc, std::size_t n) {
  if (n == 0) return 0.0;
  const double t = acc.comm_delay_before(n);
  if (t == 0.0) return 0.0;
  return acc.processed_before(n) / t;
}

void RewardWeights::validate() const {
  if (!(v1 >= 0.0 && v2 >= 0.0 && v3 >= 0.0 && v4 >= 0.0 && lyapunov_v >= 0.0 &&
        violation_penalty >= 0.0))
    throw std::invalid_argument("reward weights must be non-negative");
}

double local_drain_term(const QueueTriple& q, const SplitAmounts& s) {
  return q.local * (s.b_local + s.d_uav);
}

double uav_growth_term(const QueueTriple& q, const SplitAmounts& s) {
  return q.uav * (s.d_uav - s.b_uav - s.d_cloud);
}

double cloud_growth_term(const QueueTriple& q, const SplitAmounts& s) {
  return q.cloud * (s.d_cloud - s.b_cloud);
}

double drift_plus_penalty_value(std::span<const QueueTriple> queues,
                                std::span<const SplitAmounts> splits,
                                std::span<const double> comm_delays, const PdeAccumulator& acc,
                                const RewardWeights& weights, std::size_t interval) {
  if (queues.size() != splits.size() || queues.size() != comm_delays.size())
    throw std::invalid_argument("drift_plus_penalty_value: mismatched device counts");
  double processed = 0.0;
  double delay = 0.0;
  double drift = 0.0;
  for (std::size_t k = 0; k < queues.size(); ++k) {
    processed += processed_total(splits[k].b_local, splits[k].b_uav, splits[k].b_cloud);
    delay += comm_delays[k];
    drift += local_drain_term(queues[k], splits[k]) - uav_growth_term(queues[k], splits[k]) -
             cloud_growth_term(queues[k], splits[k]);
  }
  const double utility = short_term_pde(acc, interval);
  // U[n] = 0 would turn an infinite delay into 0 * inf.
  const double penalty = utility == 0.0 ? processed : processed - utility * delay;
  const double scaled = weights.lyapunov_v == 0.0 ? 0.0 : weights.lyapunov_v * penalty;
  return scaled + drift;
}

double reward(const QueueTriple& q, const SplitAmounts& s, double comm_delay,
              double historical_pde, const RewardWeights& weights, bool deadline_met) {
  double r = weights.v1 * local_drain_term(q, s) - weights.v2 * uav_growth_term(q, s) -
             weights.v3 * cloud_growth_term(q, s);
  if (deadline_met) {
    const double processed = processed_total(s.b_local, s.b_uav, s.b_cloud);
    const double expected = historical_pde == 0.0 ? 0.0 : comm_delay * historical_pde;
    r += weights.v4 * (processed - expected);
  } else {
    r -= weights.violation_penalty;
  }
  return r;
}

double reward(const QueueTriple& q, const SplitAmounts& s, double comm_delay,
              const PdeAccumulator& acc, std::size_t device, const RewardWeights& weights,
              bool deadline_met) {
  return reward(q, s, comm_delay, acc.device_pde(device), weights, deadline_met);
}

bool FeasibilityReport::all_satisfied() const {
  return c1_power && c2_offload_fractions && c3_processing_fractions && c4_local_cpu &&
         c5_uav_cpu && c6_cloud_cpu && c7_speed && c8_endpoints && c9_area && c10_deadline;
}

FeasibilityReport check_feasibility(const IntervalDecision& d, const FeasibilityLimits& limits) {
  constexpr double kTol = 1e-9;
  const auto in_unit = [](double f) { return f >= 0.0 && f <= 1.0; };
  const auto near = [](Position2D a, Position2D b) {
    return std::hypot(a.x - b.x, a.y - b.y) <= kTol * (1.0 + std::hypot(b.x, b.y));
  };

  FeasibilityReport r;
  for (double p : d.tx_powers)
    if (!(p >= 0.0 && p <= limits.p_max)) r.c1_power = false;

  for (const auto& f : d.fractions) {
    if (!in_unit(f.x_uav) || !in_unit(f.x_cloud)) r.c2_offload_fractions = false;
    if (!in_unit(f.w_uav) || !in_unit(f.w_cloud)) r.c3_processing_fractions = false;
  }
  if (!in_unit(d.w_local)) r.c3_processing_fractions = false;

  double uav_sum = 0.0;
  double cloud_sum = 0.0;
  for (const auto& c : d.cpu) {
    if (!(c.local >= 0.0 && c.local <= limits.local_cpu_max)) r.c4_local_cpu = false;
    if (c.uav < 0.0) r.c5_uav_cpu = false;
    if (c.cloud < 0.0) r.c6_cloud_cpu = false;
    uav_sum += c.uav;
    cloud_sum += c.cloud;
  }
  if (uav_sum > limits.uav_cpu_max * (1.0 + kTol)) r.c5_uav_cpu = false;
  if (cloud_sum > limits.cloud_cpu_max * (1.0 + kTol)) r.c6_cloud_cpu = false;

  const double speed = horizontal_distance(d.uav_after, d.uav_before) / limits.tau;
  if (speed > limits.v_max * (1.0 + kTol)) r.c7_speed = false;

  if (d.interval == 0 && !near(d.uav_before, limits.start)) r.c8_endpoints = false;
  if (d.interval + 1 == limits.num_intervals && !near(d.uav_after, limits.finish))
    r.c8_endpoints = false;

  const auto& q = d.uav_after;
  if (!(q.x >= 0.0 && q.x <= limits.area_width && q.y >= 0.0 && q.y <= limits.area_height))
    r.c9_area = false;

  r.eta.reserve(d.total_delays.size());
  for (double t : d.total_delays) {
    const bool ok = t <= limits.tau;
    r.eta.push_back(ok);
    if (!ok) r.c10_deadline = false;
  }
  return r;
}

}  // namespace uavmec
