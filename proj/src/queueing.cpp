#include "uavmec/queueing.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace uavmec {
namespace {

void require_fraction(double f, const char* name) {
  if (!(f >= 0.0 && f <= 1.0))
    throw std::invalid_argument(std::string("fraction ") + name + " outside [0, 1]: " +
                                std::to_string(f));
}

}  // namespace

SplitAmounts compute_splits(const QueueTriple& q, double x_uav, double x_cloud, double w_local,
                            double w_uav, double w_cloud) {
  require_fraction(x_uav, "x_uav");
  require_fraction(x_cloud, "x_cloud");
  require_fraction(w_local, "w_local");
  require_fraction(w_uav, "w_uav");
  require_fraction(w_cloud, "w_cloud");

  SplitAmounts s;
  s.d_uav = x_uav * q.local;
  s.b_local = w_local * (1.0 - x_uav) * q.local;
  s.d_cloud = x_cloud * q.uav;
  s.b_uav = w_uav * (1.0 - x_cloud) * q.uav;
  s.b_cloud = w_cloud * q.cloud;
  return s;
}

double update_local(double q_local, const SplitAmounts& s, double arrival) {
  return std::max(0.0, q_local - s.d_uav - s.b_local) + arrival;
}

double update_uav(double q_uav, const SplitAmounts& s) {
  return std::max(0.0, q_uav - s.d_cloud - s.b_uav) + s.d_uav;
}

double update_cloud(double q_cloud, const SplitAmounts& s) {
  return std::max(0.0, q_cloud - s.b_cloud) + s.d_cloud;
}

double draw_arrival(Rng& rng, const ArrivalProcess& process) {
  if (process.max_bits <= 0.0) return 0.0;
  std::uniform_real_distribution<double> uniform(0.0, process.max_bits);
  return uniform(rng);
}

QueueTriple running_mean_backlog(std::span<const QueueTriple> history) {
  if (history.empty()) throw std::invalid_argument("running_mean_backlog: empty history");
  QueueTriple sum;
  for (const auto& q : history) {
    sum.local += q.local;
    sum.uav += q.uav;
    sum.cloud += q.cloud;
  }
  const double n = static_cast<double>(history.size());
  return {sum.local / n, sum.uav / n, sum.cloud / n};
}

}  // namespace uavmec
