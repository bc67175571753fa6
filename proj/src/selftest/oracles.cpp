#include "selftest/oracles.hpp"

#include <algorithm>

namespace uavmec::oracle {

QueueOutcome queue_step(const QueueCase& c) {
  QueueOutcome o{};
  o.d_uav = c.x_uav * c.ql;
  o.b_local = c.w_local * (1.0 - c.x_uav) * c.ql;
  o.d_cloud = c.x_cloud * c.qu;
  o.b_uav = c.w_uav * (1.0 - c.x_cloud) * c.qu;
  o.b_cloud = c.w_cloud * c.qc;

  o.raw_ql = c.ql - o.d_uav - o.b_local;
  o.raw_qu = c.qu - o.d_cloud - o.b_uav;
  o.raw_qc = c.qc - o.b_cloud;
  o.next_ql = std::max(o.raw_ql, 0.0) + c.arrival;
  o.next_qu = std::max(o.raw_qu, 0.0) + o.d_uav;
  o.next_qc = std::max(o.raw_qc, 0.0) + o.d_cloud;
  return o;
}

double reward(const RewardCase& c) {
  const double t1 = c.v1 * c.ql * (c.b_local + c.d_uav);
  const double t2 = c.v2 * c.qu * (c.d_uav - c.b_uav - c.d_cloud);
  const double t3 = c.v3 * c.qc * (c.d_cloud - c.b_cloud);
  double t4 = 0.0;
  if (c.deadline_met) {
    const double served = c.b_local + c.b_uav + c.b_cloud;
    double ratio = 0.0;
    if (c.history_delay > 0.0) ratio = c.history_bits / c.history_delay;
    t4 = c.v4 * (served - (ratio == 0.0 ? 0.0 : c.comm_delay * ratio));
  }
  return t1 - t2 - t3 + t4;
}

double drift_plus_penalty_single(const RewardCase& c, double utility, double lyapunov_v) {
  const double served = c.b_local + c.b_uav + c.b_cloud;
  const double penalty = utility == 0.0 ? served : served - utility * c.comm_delay;
  return lyapunov_v * penalty + c.ql * (c.b_local + c.d_uav) -
         c.qu * (c.d_uav - c.b_uav - c.d_cloud) - c.qc * (c.d_cloud - c.b_cloud);
}

std::vector<double> mlp_forward(const Mlp& net, const std::vector<double>& x) {
  std::vector<double> h = x;
  for (std::size_t l = 0; l < net.w.size(); ++l) {
    std::vector<double> next(net.w[l].size());
    for (std::size_t o = 0; o < next.size(); ++o) {
      double s = net.b[l][o];
      for (std::size_t i = 0; i < h.size(); ++i) s += net.w[l][o][i] * h[i];
      const bool hidden = l + 1 < net.w.size();
      next[o] = hidden ? std::max(s, 0.0) : s;
    }
    h = std::move(next);
  }
  return h;
}

double mlp_loss(const Mlp& net, const std::vector<std::vector<double>>& inputs,
                const std::vector<std::size_t>& actions, const std::vector<double>& targets) {
  double total = 0.0;
  for (std::size_t b = 0; b < inputs.size(); ++b) {
    const double e = mlp_forward(net, inputs[b])[actions[b]] - targets[b];
    total += e * e;
  }
  return total / static_cast<double>(inputs.size());
}

}  // namespace uavmec::oracle
