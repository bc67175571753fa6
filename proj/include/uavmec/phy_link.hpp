#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace uavmec {

struct LinkBudget {
  double bandwidth = 180e3;     // Hz
  double noise_power = 0.0;     // W, total over the band
  double install_delay = 0.25;  // s, UAV-cloud link setup

  void validate() const;
};

struct UplinkSnapshot {
  std::vector<double> power_gains;  // |h_k|^2
  std::vector<double> tx_powers;    // W
};

double db_to_linear(double db);
double dbm_to_watts(double dbm);

/// Thermal noise over `bandwidth` from a per-Hz density given in dBm/Hz.
double noise_power_from_density(double density_dbm_per_hz, double bandwidth);

/// Uplink SINR of `device` with every other device interfering through its
/// own channel.
double sinr(std::size_t device, const UplinkSnapshot& snapshot, double noise_power);

/// Shannon rate in bits/s.
double rate(double sinr, double bandwidth);

/// bits / rate. Zero bits cost nothing even on a dead link; positive bits on a
/// dead link yield +inf, which downstream code treats as an infeasible interval.
double uplink_comm_delay(double bits_offloaded, double rate);

/// The fixed setup delay whenever anything is forwarded to the cloud.
double cloud_comm_delay(double x_cloud, double install_delay);

double total_comm_delay(double uplink, double cloud);

}  // namespace uavmec
