#pragma once

namespace uavmec {

struct ComputeParams {
  double cycles_per_bit = 1024;
  double local_cpu = 1e6;        // per-device budget, cycles/s
  double uav_cpu_total = 5e6;    // shared by all devices
  double cloud_cpu_total = 1e8;  // shared by all devices

  void validate() const;
};

struct DelayBreakdown {
  double t_local_comp = 0.0;
  double t_uplink_comm = 0.0;
  double t_uav_comp = 0.0;
  double t_cloud_comm = 0.0;
  double t_cloud_comp = 0.0;
  double t_total = 0.0;
};

/// bits * cycles_per_bit / cpu; +inf when there is work but no CPU.
double comp_delay(double bits, double cpu, double cycles_per_bit);

/// Local compute overlaps the uplink and UAV compute overlaps the cloud
/// forward, so each stage costs the slower of its two activities.
double total_task_delay(const DelayBreakdown& b);

}  // namespace uavmec
