#include "uavmec/computation.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace uavmec {

void ComputeParams::validate() const {
  if (!(cycles_per_bit > 0.0) || !(local_cpu > 0.0) || !(uav_cpu_total > 0.0) ||
      !(cloud_cpu_total > 0.0))
    throw std::invalid_argument("compute parameters must all be positive");
}

double comp_delay(double bits, double cpu, double cycles_per_bit) {
  if (bits == 0.0) return 0.0;
  if (cpu <= 0.0) return std::numeric_limits<double>::infinity();
  return bits * cycles_per_bit / cpu;
}

double total_task_delay(const DelayBreakdown& b) {
  return std::max(b.t_local_comp, b.t_uplink_comm) + std::max(b.t_uav_comp, b.t_cloud_comm) +
         b.t_cloud_comp;
}

}  // namespace uavmec
