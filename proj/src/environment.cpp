#include "uavmec/environment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "uavmec/phy_link.hpp"

namespace uavmec {

std::vector<ActionVector> action_catalog(const SimConfig& config) {
  const std::size_t levels = config.fraction_levels.size();
  const std::size_t per_device = levels * levels * levels * levels;
  std::size_t total = kNumUavMoves;
  for (std::size_t k = 0; k < config.num_devices; ++k) {
    if (total > config.max_catalog_size / per_device)
      throw std::length_error("action catalog for " + std::to_string(config.num_devices) +
                              " devices exceeds max_catalog_size=" +
                              std::to_string(config.max_catalog_size) +
                              "; a factorized action space is required");
    total *= per_device;
  }

  std::vector<ActionVector> catalog;
  catalog.reserve(total);
  const auto& f = config.fraction_levels;
  for (std::size_t joint = 0; joint < total / kNumUavMoves; ++joint) {
    ActionVector base;
    base.devices.resize(config.num_devices);
    std::size_t rest = joint;
    for (std::size_t k = config.num_devices; k-- > 0;) {
      std::size_t combo = rest % per_device;
      rest /= per_device;
      auto& d = base.devices[k];
      d.w_cloud = f[combo % levels];
      combo /= levels;
      d.w_uav = f[combo % levels];
      combo /= levels;
      d.x_cloud = f[combo % levels];
      combo /= levels;
      d.x_uav = f[combo % levels];
    }
    for (std::size_t m = 0; m < kNumUavMoves; ++m) {
      base.move = static_cast<UavMove>(m);
      catalog.push_back(base);
    }
  }
  return catalog;
}

std::size_t catalog_size(const SimConfig& config) {
  const std::size_t levels = config.fraction_levels.size();
  std::size_t total = kNumUavMoves;
  for (std::size_t k = 0; k < config.num_devices; ++k) total *= levels * levels * levels * levels;
  return total;
}

std::size_t action_index(const ActionVector& action, const SimConfig& config) {
  if (action.devices.size() != config.num_devices)
    throw std::invalid_argument("action_index: device count mismatch");
  const auto& f = config.fraction_levels;
  const std::size_t levels = f.size();
  const auto level_of = [&](double v) -> std::size_t {
    const auto it = std::find(f.begin(), f.end(), v);
    if (it == f.end())
      throw std::invalid_argument("action_index: fraction " + std::to_string(v) +
                                  " is not a catalog level");
    return static_cast<std::size_t>(it - f.begin());
  };
  std::size_t joint = 0;
  for (const auto& d : action.devices) {
    std::size_t combo = level_of(d.x_uav);
    combo = combo * levels + level_of(d.x_cloud);
    combo = combo * levels + level_of(d.w_uav);
    combo = combo * levels + level_of(d.w_cloud);
    joint = joint * levels * levels * levels * levels + combo;
  }
  return joint * kNumUavMoves + static_cast<std::size_t>(action.move);
}

int queue_level(double q, double cap) {
  if (!(q > 0.0)) return 0;
  const double level = std::floor(10.0 * q / cap);
  return level >= 9.0 ? 9 : static_cast<int>(level);
}

std::vector<double> Observation::normalized() const {
  std::vector<double> out;
  out.reserve(levels.size() + uav_xy.size());
  for (auto l : levels) out.push_back(static_cast<double>(l) / 9.0);
  out.insert(out.end(), uav_xy.begin(), uav_xy.end());
  return out;
}

std::uint64_t training_episode_seed(std::uint64_t seed, std::size_t episode) {
  return derive_seed(seed, StreamTag::training_episode, episode);
}

std::uint64_t evaluation_episode_seed(std::uint64_t seed, std::size_t realization) {
  return derive_seed(seed, StreamTag::evaluation_episode, realization);
}

Environment::Environment(SimConfig config, std::uint64_t layout_seed)
    : config_(std::move(config)) {
  config_.validate();
  catalog_ = action_catalog(config_);

  if (!config_.device_positions.empty()) {
    devices_ = config_.device_positions;
  } else {
    auto rng = make_stream(layout_seed, StreamTag::layout);
    std::uniform_real_distribution<double> ux(0.0, config_.area_width);
    std::uniform_real_distribution<double> uy(0.0, config_.area_height);
    for (std::size_t k = 0; k < config_.num_devices; ++k) {
      const double x = ux(rng);
      const double y = uy(rng);
      devices_.push_back({x, y});
    }
  }

  channel_ = config_.channel_params();
  link_ = config_.link_budget();
  compute_ = config_.compute_params();
  limits_ = config_.feasibility_limits();
  cpu_.assign(config_.num_devices,
              {config_.local_cpu_alloc(), config_.uav_cpu_alloc(), config_.cloud_cpu_alloc()});
  tx_powers_.assign(config_.num_devices, config_.tx_power);
  reset(0);
}

Observation Environment::reset(std::uint64_t seed) {
  state_.interval = 0;
  state_.queues.assign(config_.num_devices, QueueTriple{});
  state_.uav = config_.area_center();
  state_.accumulator = PdeAccumulator(config_.num_devices);
  state_.channel_rng = make_stream(seed, StreamTag::channel);
  state_.arrival_rng = make_stream(seed, StreamTag::arrival);
  return observe();
}

void Environment::load_state(EpisodeState state) {
  if (state.queues.size() != config_.num_devices ||
      state.accumulator.num_devices() != config_.num_devices)
    throw std::invalid_argument("load_state: device count mismatch");
  state_ = std::move(state);
}

std::size_t Environment::observation_size() const {
  return 3 * config_.num_devices + (config_.observe_uav_position ? 2 : 0);
}

Observation Environment::observe() const {
  Observation obs;
  const double cap = config_.queue_cap();
  obs.levels.reserve(3 * config_.num_devices);
  for (const auto& q : state_.queues) {
    obs.levels.push_back(static_cast<std::uint8_t>(queue_level(q.local, cap)));
    obs.levels.push_back(static_cast<std::uint8_t>(queue_level(q.uav, cap)));
    obs.levels.push_back(static_cast<std::uint8_t>(queue_level(q.cloud, cap)));
  }
  if (config_.observe_uav_position)
    obs.uav_xy = {state_.uav.x / config_.area_width, state_.uav.y / config_.area_height};
  obs.raw = state_.queues;
  return obs;
}

Position2D Environment::apply_move(Position2D from, UavMove move) const {
  const double step = config_.v_max * config_.tau;
  Position2D to = from;
  switch (move) {
    case UavMove::stay: break;
    case UavMove::pos_x: to.x += step; break;
    case UavMove::neg_x: to.x -= step; break;
    case UavMove::pos_y: to.y += step; break;
    case UavMove::neg_y: to.y -= step; break;
  }
  to.x = std::clamp(to.x, 0.0, config_.area_width);
  to.y = std::clamp(to.y, 0.0, config_.area_height);
  return to;
}

TransitionRecord Environment::step(std::size_t action) {
  if (done()) throw std::logic_error("step() called on a finished episode; call reset()");
  if (action >= catalog_.size())
    throw std::out_of_range("action index " + std::to_string(action) + " outside catalog of " +
                            std::to_string(catalog_.size()));

  const std::size_t num = config_.num_devices;
  const ActionVector& a = catalog_[action];

  TransitionRecord tr;
  tr.observation = observe();
  tr.action = action;

  IntervalRecord& rec = tr.interval;
  rec.interval = state_.interval;
  rec.devices.resize(num);

  // UAV motion, clipped to the service area.
  rec.uav_before = state_.uav;
  rec.uav_after = apply_move(state_.uav, a.move);
  state_.uav = rec.uav_after;

  // Block-fading channels at the new position.
  UplinkSnapshot snapshot;
  snapshot.power_gains.resize(num);
  snapshot.tx_powers = tx_powers_;
  for (std::size_t k = 0; k < num; ++k) {
    auto& dev = rec.devices[k];
    dev.distance = distance(state_.uav, devices_[k], channel_.altitude);
    dev.power_gain = channel_gain(dev.distance, channel_, state_.channel_rng).power_gain;
    snapshot.power_gains[k] = dev.power_gain;
  }

  std::vector<double> total_delays(num);
  std::vector<double> processed(num);
  std::vector<double> comm(num);
  std::vector<DeviceFractions> fractions(num);
  for (std::size_t k = 0; k < num; ++k) {
    auto& dev = rec.devices[k];
    dev.sinr = sinr(k, snapshot, link_.noise_power);
    dev.rate = rate(dev.sinr, link_.bandwidth);

    dev.queues = state_.queues[k];
    dev.fractions = a.devices[k];
    fractions[k] = dev.fractions;
    const auto& f = dev.fractions;
    dev.splits =
        compute_splits(dev.queues, f.x_uav, f.x_cloud, config_.w_local, f.w_uav, f.w_cloud);

    auto& t = dev.delays;
    t.t_local_comp = comp_delay(dev.splits.b_local, cpu_[k].local, compute_.cycles_per_bit);
    t.t_uplink_comm = uplink_comm_delay(dev.splits.d_uav, dev.rate);
    t.t_uav_comp = comp_delay(dev.splits.b_uav, cpu_[k].uav, compute_.cycles_per_bit);
    t.t_cloud_comm = cloud_comm_delay(f.x_cloud, link_.install_delay);
    t.t_cloud_comp = comp_delay(dev.splits.b_cloud, cpu_[k].cloud, compute_.cycles_per_bit);
    t.t_total = total_task_delay(t);
    total_delays[k] = t.t_total;

    dev.comm_delay = total_comm_delay(t.t_uplink_comm, t.t_cloud_comm);
    dev.processed = processed_total(dev.splits.b_local, dev.splits.b_uav, dev.splits.b_cloud);
    processed[k] = dev.processed;
    comm[k] = dev.comm_delay;
  }

  IntervalDecision decision;
  decision.interval = state_.interval;
  decision.tx_powers = tx_powers_;
  decision.fractions = fractions;
  decision.w_local = config_.w_local;
  decision.cpu = cpu_;
  decision.uav_before = rec.uav_before;
  decision.uav_after = rec.uav_after;
  decision.total_delays = total_delays;
  rec.feasibility = check_feasibility(decision, limits_);

  rec.reward = 0.0;
  for (std::size_t k = 0; k < num; ++k) {
    auto& dev = rec.devices[k];
    dev.deadline_met = rec.feasibility.eta[k];
    dev.historical_pde = state_.accumulator.device_pde(k);
    dev.reward = reward(dev.queues, dev.splits, dev.comm_delay, dev.historical_pde,
                        config_.weights, dev.deadline_met);
    rec.reward += dev.reward;
  }

  const ArrivalProcess arrivals{config_.i_max};
  for (std::size_t k = 0; k < num; ++k) {
    auto& dev = rec.devices[k];
    dev.arrival = draw_arrival(state_.arrival_rng, arrivals);
    state_.queues[k] = update_queues(dev.queues, dev.splits, dev.arrival);
  }

  state_.accumulator.record(processed, comm);
  ++state_.interval;

  tr.reward = rec.reward;
  tr.next_observation = observe();
  tr.done = done();
  return tr;
}

}  // namespace uavmec
