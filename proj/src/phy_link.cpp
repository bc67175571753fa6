#include "uavmec/phy_link.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace uavmec {

void LinkBudget::validate() const {
  if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be positive");
  if (!(noise_power > 0.0)) throw std::invalid_argument("noise power must be positive");
  if (!(install_delay >= 0.0)) throw std::invalid_argument("install delay must be non-negative");
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double dbm_to_watts(double dbm) { return db_to_linear(dbm) * 1e-3; }

double noise_power_from_density(double density_dbm_per_hz, double bandwidth) {
  return dbm_to_watts(density_dbm_per_hz) * bandwidth;
}

double sinr(std::size_t device, const UplinkSnapshot& snapshot, double noise_power) {
  const auto& g = snapshot.power_gains;
  const auto& p = snapshot.tx_powers;
  if (device >= g.size() || g.size() != p.size())
    throw std::out_of_range("sinr: device index outside the snapshot");
  double interference = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (i != device) interference += g[i] * p[i];
  return g[device] * p[device] / (interference + noise_power);
}

double rate(double sinr, double bandwidth) { return bandwidth * std::log2(1.0 + sinr); }

double uplink_comm_delay(double bits_offloaded, double rate) {
  if (bits_offloaded == 0.0) return 0.0;
  if (rate <= 0.0) return std::numeric_limits<double>::infinity();
  return bits_offloaded / rate;
}

double cloud_comm_delay(double x_cloud, double install_delay) {
  return x_cloud > 0.0 ? install_delay : 0.0;
}

double total_comm_delay(double uplink, double cloud) { return uplink + cloud; }

}  // namespace uavmec
