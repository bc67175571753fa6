#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "uavmec/config.hpp"
#include "uavmec/environment.hpp"
#include "uavmec/qnetwork.hpp"
#include "uavmec/replay_buffer.hpp"

namespace uavmec {

/// Raised when a training step produces a non-finite loss.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameter gradients laid out like the network. Only the output rows of
/// actions that appear in a batch are ever non-zero, so the output layer keeps
/// a list of touched rows and clear() resets just those.
class Gradients {
 public:
  Gradients() = default;
  explicit Gradients(const QNetwork& net);

  void clear();
  void touch_output_row(std::size_t row);

  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> bias;
  std::vector<std::size_t> touched_rows;  // output layer rows with non-zero gradient

  double squared_norm() const;
  void scale(double factor);

 private:
  std::vector<char> touched_flag_;
};

struct Batch {
  std::size_t size = 0;
  std::vector<double> observations;  // size x input
  std::vector<std::size_t> actions;
  std::vector<double> rewards;
  std::vector<double> next_observations;  // size x input
  std::vector<char> terminal;
};

Batch make_batch(const ReplayBuffer& buffer, std::span<const std::size_t> indices);

/// Mean squared error between Q(s, a) and `targets` and its gradient with
/// respect to every parameter of `net`.
double loss_and_gradient(const QNetwork& net, std::span<const double> inputs,
                         std::span<const std::size_t> actions, std::span<const double> targets,
                         Gradients& grad);

/// Memo of max_a Q_target(s', a) keyed by the exact observation bytes. Valid
/// only while the target network is unchanged; clear it on every sync.
class TargetCache {
 public:
  const double* find(std::span<const double> obs) const;
  void insert(std::span<const double> obs, double value);
  void clear() { map_.clear(); }
  std::size_t size() const { return map_.size(); }

 private:
  struct Hash {
    std::size_t operator()(const std::string& key) const { return std::hash<std::string>{}(key); }
  };
  std::unordered_map<std::string, double, Hash> map_;
};

/// y = r + discount * max_a Q_target(s', a), or y = r at terminal transitions.
std::vector<double> compute_targets(const QNetwork& target, const Batch& batch, double discount,
                                    TargetCache* cache = nullptr);

class Optimizer {
 public:
  Optimizer(const QNetwork& net, const TrainConfig& config);
  /// Clips `grad` to the configured global norm and applies one update.
  void apply(QNetwork& net, Gradients& grad);

 private:
  OptimizerKind kind_;
  double learning_rate_;
  double grad_clip_;
  // Adam moments
  std::vector<std::vector<double>> m_w_, v_w_, m_b_, v_b_;
  std::size_t t_ = 0;
};

/// One gradient step on `net` against targets from `target`. Returns the loss
/// before the update; throws DivergenceError on a non-finite loss.
double train_step(QNetwork& net, const QNetwork& target, const Batch& batch,
                  const TrainConfig& config, Optimizer& optimizer, TargetCache* cache = nullptr);

/// Copies every parameter of `net` into `target`.
void sync_target(const QNetwork& net, QNetwork& target);

/// Epsilon-greedy choice: with probability epsilon a uniform action, else the
/// lowest-index argmax of the network output.
std::size_t select_action(const QNetwork& net, std::span<const double> obs, double epsilon,
                          Rng& rng);

/// Linear decay from start to end over the first decay_fraction of all steps.
double epsilon_at(const TrainConfig& config, std::size_t step, std::size_t total_steps);

struct TrainResult {
  QNetwork network;
  std::vector<double> episode_rewards;  // cumulative raw reward per episode
  std::vector<double> losses;           // one per gradient step
};

using EnvironmentFactory = std::function<Environment()>;
/// Called after each training episode with its index and cumulative raw reward.
using EpisodeCallback = std::function<void(std::size_t episode, double reward)>;

TrainResult train(const EnvironmentFactory& make_env, const TrainConfig& config,
                  std::uint64_t seed, const EpisodeCallback& on_episode = {});

}  // namespace uavmec
