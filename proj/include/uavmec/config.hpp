#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "uavmec/channel.hpp"
#include "uavmec/computation.hpp"
#include "uavmec/objective.hpp"
#include "uavmec/phy_link.hpp"
#include "uavmec/queueing.hpp"

namespace uavmec {

enum class PolicyKind { dqn, random, uav_heavy, cloud_heavy };

std::string to_string(PolicyKind kind);
PolicyKind parse_policy(const std::string& name);

enum class OptimizerKind { sgd, adam };

struct TrainConfig {
  std::vector<std::size_t> hidden_layers{64, 64};
  double discount = 0.95;
  double learning_rate = 1e-3;
  std::size_t batch_size = 64;
  std::size_t buffer_capacity = 10000;
  std::size_t target_sync_period = 200;  // environment steps
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_decay_fraction = 0.5;  // share of all training steps
  std::size_t episodes = 200;
  double grad_clip = 10.0;  // global L2 norm
  double reward_scale = 1e5;
  OptimizerKind optimizer = OptimizerKind::sgd;
};

struct SweepSpec {
  std::vector<double> i_max_values{0.5e5, 1.0e5, 1.5e5, 2.0e5, 2.5e5};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::vector<PolicyKind> policies{PolicyKind::dqn, PolicyKind::random, PolicyKind::uav_heavy,
                                   PolicyKind::cloud_heavy};
  std::size_t realizations = 1000;
  bool shared_model = false;
};

/// Every constant of the simulated network, the reward, the learner and the
/// sweep. Physical quantities are stored in the units used at runtime
/// (linear gains, watts); dB-valued keys are converted when loaded.
struct SimConfig {
  // geometry
  std::size_t num_devices = 2;
  double area_width = 500.0;
  double area_height = 500.0;
  double altitude = 100.0;
  double v_max = 30.0;
  double tau = 1.0;
  std::size_t num_intervals = 1000;
  /// Empty: positions are drawn uniformly in the area from the layout seed.
  std::vector<Position2D> device_positions;

  // channel
  double eta0_db = -40.0;
  double path_loss_exponent = 2.0;
  double rice_k = 10.0;

  // link
  double p_max = 0.1;
  double tx_power = 0.1;
  double bandwidth = 180e3;
  double noise_density_dbm_hz = -174.0;
  std::optional<double> noise_power_w;  // overrides the density reading
  double install_delay = 0.25;

  // computation
  double cycles_per_bit = 1024;
  double local_cpu_max = 1e6;
  double uav_cpu_max = 5e6;
  double cloud_cpu_max = 1e8;
  std::optional<double> local_cpu;  // default: local_cpu_max
  std::optional<double> uav_cpu;    // per device; default: even split
  std::optional<double> cloud_cpu;  // per device; default: even split

  // queues and MDP
  double i_max = 2.5e5;
  double w_local = 0.3;
  std::vector<double> fraction_levels{0.3, 0.6};
  std::optional<double> q_cap;  // default: 4 * i_max
  bool observe_uav_position = false;
  std::size_t max_catalog_size = 1u << 20;

  RewardWeights weights;
  TrainConfig train;
  SweepSpec sweep;

  // derived quantities
  double eta0_linear() const;
  double noise_power() const;
  double queue_cap() const;
  double local_cpu_alloc() const;
  double uav_cpu_alloc() const;
  double cloud_cpu_alloc() const;
  Position2D area_center() const;
  ChannelParams channel_params() const;
  LinkBudget link_budget() const;
  ComputeParams compute_params() const;
  FeasibilityLimits feasibility_limits() const;

  /// Throws ConfigError naming the first offending key.
  void validate() const;
};

class ConfigError : public std::runtime_error {
 public:
  enum class Kind { io, malformed, unknown_key, bad_value, out_of_range };

  ConfigError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Applies one `key=value` assignment to `config`. Values are not range
/// checked here; call validate() after all assignments.
void apply_setting(SimConfig& config, const std::string& key, const std::string& value);

/// Defaults, then the `key=value` lines of `text`, then `overrides`.
SimConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});

/// As parse_config, reading the file at `path` (an empty path means no file).
SimConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Every recognised key with its current value, in a stable order. Feeding
/// the result back through parse_config reproduces the configuration.
std::map<std::string, std::string> dump_config(const SimConfig& config);

}  // namespace uavmec
