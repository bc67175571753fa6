#pragma once

// Single-purpose reference evaluators written straight from the model
// equations. They share no code with the library so that agreement between the
// two is evidence rather than tautology.

#include <cstddef>
#include <vector>

namespace uavmec::oracle {

struct QueueCase {
  double ql, qu, qc;
  double x_uav, x_cloud, w_local, w_uav, w_cloud;
  double arrival;
};

struct QueueOutcome {
  double d_uav, b_local, d_cloud, b_uav, b_cloud;
  double next_ql, next_qu, next_qc;
  // Values inside the {.}^+ before clamping.
  double raw_ql, raw_qu, raw_qc;
};

QueueOutcome queue_step(const QueueCase& c);

struct RewardCase {
  double ql, qu, qc;
  double d_uav, b_local, d_cloud, b_uav, b_cloud;
  double comm_delay;
  double history_bits;   // sum of processed bits over earlier intervals
  double history_delay;  // sum of communication delay over earlier intervals
  double v1, v2, v3, v4;
  bool deadline_met;
};

double reward(const RewardCase& c);

/// Drift-plus-penalty for one device with the short-term PDE supplied directly.
double drift_plus_penalty_single(const RewardCase& c, double utility, double lyapunov_v);

/// Plain nested-vector MLP used to evaluate losses for finite differences.
struct Mlp {
  std::vector<std::vector<std::vector<double>>> w;  // layer, out, in
  std::vector<std::vector<double>> b;               // layer, out
};

std::vector<double> mlp_forward(const Mlp& net, const std::vector<double>& x);

/// Mean squared error of the chosen-action outputs against the targets.
double mlp_loss(const Mlp& net, const std::vector<std::vector<double>>& inputs,
                const std::vector<std::size_t>& actions, const std::vector<double>& targets);

}  // namespace uavmec::oracle
