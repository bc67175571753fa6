#include "uavmec/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

namespace uavmec {

// Replay sampling -------------------------------------------------------------

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t count, Rng& rng) const {
  const std::size_t n = storage_.size();
  if (count > n) throw std::invalid_argument("cannot sample more transitions than stored");
  // Floyd's algorithm: a uniform count-subset of [0, n).
  std::vector<std::size_t> picked;
  picked.reserve(count);
  for (std::size_t j = n - count; j < n; ++j) {
    std::uniform_int_distribution<std::size_t> u(0, j);
    const std::size_t t = u(rng);
    if (std::find(picked.begin(), picked.end(), t) == picked.end())
      picked.push_back(t);
    else
      picked.push_back(j);
  }
  return picked;
}

// Gradients ---------------------------------------------------------------------

Gradients::Gradients(const QNetwork& net) {
  for (const auto& l : net.layers()) {
    weights.emplace_back(l.weights.size(), 0.0);
    bias.emplace_back(l.bias.size(), 0.0);
  }
  touched_flag_.assign(net.output_size(), 0);
}

void Gradients::clear() {
  const std::size_t last = weights.size() - 1;
  for (std::size_t l = 0; l < last; ++l) {
    std::fill(weights[l].begin(), weights[l].end(), 0.0);
    std::fill(bias[l].begin(), bias[l].end(), 0.0);
  }
  const std::size_t in_dim = weights[last].size() / bias[last].size();
  for (std::size_t row : touched_rows) {
    std::fill_n(weights[last].begin() + static_cast<std::ptrdiff_t>(row * in_dim), in_dim, 0.0);
    bias[last][row] = 0.0;
    touched_flag_[row] = 0;
  }
  touched_rows.clear();
}

void Gradients::touch_output_row(std::size_t row) {
  if (!touched_flag_[row]) {
    touched_flag_[row] = 1;
    touched_rows.push_back(row);
  }
}

double Gradients::squared_norm() const {
  const std::size_t last = weights.size() - 1;
  double sum = 0.0;
  for (std::size_t l = 0; l < last; ++l) {
    for (double g : weights[l]) sum += g * g;
    for (double g : bias[l]) sum += g * g;
  }
  const std::size_t in_dim = weights[last].size() / bias[last].size();
  for (std::size_t row : touched_rows) {
    for (std::size_t i = 0; i < in_dim; ++i) {
      const double g = weights[last][row * in_dim + i];
      sum += g * g;
    }
    sum += bias[last][row] * bias[last][row];
  }
  return sum;
}

void Gradients::scale(double factor) {
  const std::size_t last = weights.size() - 1;
  for (std::size_t l = 0; l < last; ++l) {
    for (double& g : weights[l]) g *= factor;
    for (double& g : bias[l]) g *= factor;
  }
  const std::size_t in_dim = weights[last].size() / bias[last].size();
  for (std::size_t row : touched_rows) {
    for (std::size_t i = 0; i < in_dim; ++i) weights[last][row * in_dim + i] *= factor;
    bias[last][row] *= factor;
  }
}

// Loss and backprop ----------------------------------------------------------------

Batch make_batch(const ReplayBuffer& buffer, std::span<const std::size_t> indices) {
  Batch b;
  b.size = indices.size();
  for (std::size_t i : indices) {
    const Transition& t = buffer.at(i);
    b.observations.insert(b.observations.end(), t.observation.begin(), t.observation.end());
    b.next_observations.insert(b.next_observations.end(), t.next_observation.begin(),
                               t.next_observation.end());
    b.actions.push_back(t.action);
    b.rewards.push_back(t.reward);
    b.terminal.push_back(t.terminal ? 1 : 0);
  }
  return b;
}

double loss_and_gradient(const QNetwork& net, std::span<const double> inputs,
                         std::span<const std::size_t> actions, std::span<const double> targets,
                         Gradients& grad) {
  const auto& layers = net.layers();
  const std::size_t batch = actions.size();
  if (batch == 0) throw std::invalid_argument("loss_and_gradient: empty batch");
  if (targets.size() != batch || inputs.size() != batch * net.input_size())
    throw std::invalid_argument("loss_and_gradient: batch shape mismatch");
  grad.clear();

  const std::size_t last = layers.size() - 1;
  // activations[l] is the input of layer l for the whole batch.
  std::vector<std::vector<double>> activations(layers.size());
  activations[0].assign(inputs.begin(), inputs.end());
  for (std::size_t l = 0; l < last; ++l) {
    activations[l + 1].assign(batch * layers[l].out_dim, 0.0);
    kernels::dense_forward_serial(layers[l].weights, layers[l].bias, layers[l].in_dim,
                                  layers[l].out_dim, activations[l], batch, activations[l + 1],
                                  true);
  }

  const DenseLayer& out = layers[last];
  double loss = 0.0;
  std::vector<double> delta;
  std::vector<double> prev_delta;
  for (std::size_t b = 0; b < batch; ++b) {
    const std::size_t a = actions[b];
    if (a >= out.out_dim) throw std::out_of_range("loss_and_gradient: action outside output");
    const double* h = activations[last].data() + b * out.in_dim;
    const double* w_row = out.weights.data() + a * out.in_dim;
    double q = out.bias[a];
    for (std::size_t i = 0; i < out.in_dim; ++i) q += w_row[i] * h[i];
    const double diff = q - targets[b];
    loss += diff * diff;

    const double dq = 2.0 * diff / static_cast<double>(batch);
    grad.touch_output_row(a);
    double* g_row = grad.weights[last].data() + a * out.in_dim;
    for (std::size_t i = 0; i < out.in_dim; ++i) g_row[i] += dq * h[i];
    grad.bias[last][a] += dq;

    delta.assign(out.in_dim, 0.0);
    for (std::size_t i = 0; i < out.in_dim; ++i) delta[i] = dq * w_row[i];

    for (std::size_t l = last; l-- > 0;) {
      const DenseLayer& layer = layers[l];
      const double* y = activations[l + 1].data() + b * layer.out_dim;
      const double* x = activations[l].data() + b * layer.in_dim;
      for (std::size_t o = 0; o < layer.out_dim; ++o)
        if (y[o] <= 0.0) delta[o] = 0.0;
      auto& gw = grad.weights[l];
      auto& gb = grad.bias[l];
      for (std::size_t o = 0; o < layer.out_dim; ++o) {
        if (delta[o] == 0.0) continue;
        double* g = gw.data() + o * layer.in_dim;
        for (std::size_t i = 0; i < layer.in_dim; ++i) g[i] += delta[o] * x[i];
        gb[o] += delta[o];
      }
      if (l == 0) break;
      prev_delta.assign(layer.in_dim, 0.0);
      for (std::size_t o = 0; o < layer.out_dim; ++o) {
        if (delta[o] == 0.0) continue;
        const double* w = layer.weights.data() + o * layer.in_dim;
        for (std::size_t i = 0; i < layer.in_dim; ++i) prev_delta[i] += delta[o] * w[i];
      }
      delta.swap(prev_delta);
    }
  }
  return loss / static_cast<double>(batch);
}

// Targets ---------------------------------------------------------------------------

const double* TargetCache::find(std::span<const double> obs) const {
  const std::string key(reinterpret_cast<const char*>(obs.data()), obs.size_bytes());
  const auto it = map_.find(key);
  return it == map_.end() ? nullptr : &it->second;
}

void TargetCache::insert(std::span<const double> obs, double value) {
  map_.emplace(std::string(reinterpret_cast<const char*>(obs.data()), obs.size_bytes()), value);
}

std::vector<double> compute_targets(const QNetwork& target, const Batch& batch, double discount,
                                    TargetCache* cache) {
  const std::size_t width = target.input_size();
  std::vector<double> next_max(batch.size, 0.0);

  std::vector<std::size_t> pending;
  std::vector<double> pending_inputs;
  for (std::size_t b = 0; b < batch.size; ++b) {
    if (batch.terminal[b]) continue;
    const std::span<const double> obs(batch.next_observations.data() + b * width, width);
    if (cache) {
      if (const double* hit = cache->find(obs)) {
        next_max[b] = *hit;
        continue;
      }
    }
    pending.push_back(b);
    pending_inputs.insert(pending_inputs.end(), obs.begin(), obs.end());
  }

  if (!pending.empty()) {
    const auto q = target.forward_batch(pending_inputs, pending.size());
    std::vector<double> best(pending.size());
    kernels::row_max_serial(q, pending.size(), target.output_size(), best);
    for (std::size_t i = 0; i < pending.size(); ++i) {
      next_max[pending[i]] = best[i];
      if (cache)
        cache->insert(std::span<const double>(pending_inputs.data() + i * width, width), best[i]);
    }
  }

  std::vector<double> y(batch.size);
  for (std::size_t b = 0; b < batch.size; ++b)
    y[b] = batch.terminal[b] ? batch.rewards[b] : batch.rewards[b] + discount * next_max[b];
  return y;
}

// Optimizer ----------------------------------------------------------------------------

Optimizer::Optimizer(const QNetwork& net, const TrainConfig& config)
    : kind_(config.optimizer), learning_rate_(config.learning_rate), grad_clip_(config.grad_clip) {
  if (kind_ == OptimizerKind::adam) {
    for (const auto& l : net.layers()) {
      m_w_.emplace_back(l.weights.size(), 0.0);
      v_w_.emplace_back(l.weights.size(), 0.0);
      m_b_.emplace_back(l.bias.size(), 0.0);
      v_b_.emplace_back(l.bias.size(), 0.0);
    }
  }
}

void Optimizer::apply(QNetwork& net, Gradients& grad) {
  const double norm = std::sqrt(grad.squared_norm());
  if (norm > grad_clip_) grad.scale(grad_clip_ / norm);

  auto& layers = net.layers();
  const std::size_t last = layers.size() - 1;

  if (kind_ == OptimizerKind::sgd) {
    for (std::size_t l = 0; l < last; ++l) {
      for (std::size_t i = 0; i < layers[l].weights.size(); ++i)
        layers[l].weights[i] -= learning_rate_ * grad.weights[l][i];
      for (std::size_t i = 0; i < layers[l].bias.size(); ++i)
        layers[l].bias[i] -= learning_rate_ * grad.bias[l][i];
    }
    const std::size_t in_dim = layers[last].in_dim;
    for (std::size_t row : grad.touched_rows) {
      for (std::size_t i = 0; i < in_dim; ++i)
        layers[last].weights[row * in_dim + i] -= learning_rate_ * grad.weights[last][row * in_dim + i];
      layers[last].bias[row] -= learning_rate_ * grad.bias[last][row];
    }
    return;
  }

  constexpr double beta1 = 0.9;
  constexpr double beta2 = 0.999;
  constexpr double eps = 1e-8;
  ++t_;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
  const auto step = [&](std::vector<double>& p, const std::vector<double>& g,
                        std::vector<double>& m, std::vector<double>& v) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
      v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
      p[i] -= learning_rate_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
    }
  };
  for (std::size_t l = 0; l < layers.size(); ++l) {
    step(layers[l].weights, grad.weights[l], m_w_[l], v_w_[l]);
    step(layers[l].bias, grad.bias[l], m_b_[l], v_b_[l]);
  }
}

double train_step(QNetwork& net, const QNetwork& target, const Batch& batch,
                  const TrainConfig& config, Optimizer& optimizer, TargetCache* cache) {
  if (batch.size == 0) throw std::invalid_argument("train_step: empty batch");
  const auto y = compute_targets(target, batch, config.discount, cache);
  thread_local Gradients grad;
  bool shape_ok = grad.weights.size() == net.layers().size();
  for (std::size_t l = 0; shape_ok && l < grad.weights.size(); ++l)
    shape_ok = grad.weights[l].size() == net.layers()[l].weights.size();
  if (!shape_ok) grad = Gradients(net);
  const double loss = loss_and_gradient(net, batch.observations, batch.actions, y, grad);
  if (!std::isfinite(loss)) {
    std::ostringstream msg;
    msg << "non-finite training loss (" << loss << ") on a batch of " << batch.size;
    throw DivergenceError(msg.str());
  }
  optimizer.apply(net, grad);
  return loss;
}

void sync_target(const QNetwork& net, QNetwork& target) {
  if (net.sizes() != target.sizes())
    throw std::invalid_argument("sync_target: architectures differ");
  target = net;
}

std::size_t select_action(const QNetwork& net, std::span<const double> obs, double epsilon,
                          Rng& rng) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < epsilon) {
    std::uniform_int_distribution<std::size_t> pick(0, net.output_size() - 1);
    return pick(rng);
  }
  return argmax(net.forward(obs));
}

double epsilon_at(const TrainConfig& config, std::size_t step, std::size_t total_steps) {
  const double horizon = config.epsilon_decay_fraction * static_cast<double>(total_steps);
  if (horizon <= 0.0 || static_cast<double>(step) >= horizon) return config.epsilon_end;
  const double progress = static_cast<double>(step) / horizon;
  return config.epsilon_start + (config.epsilon_end - config.epsilon_start) * progress;
}

TrainResult train(const EnvironmentFactory& make_env, const TrainConfig& config,
                  std::uint64_t seed, const EpisodeCallback& on_episode) {
  Environment env = make_env();
  Rng rng = make_stream(seed, StreamTag::training);

  std::vector<std::size_t> sizes{env.observation_size()};
  sizes.insert(sizes.end(), config.hidden_layers.begin(), config.hidden_layers.end());
  sizes.push_back(env.catalog().size());

  TrainResult result;
  result.network = QNetwork::random(sizes, rng);
  QNetwork target = result.network;
  QNetwork& net = result.network;

  ReplayBuffer buffer(config.buffer_capacity);
  Optimizer optimizer(net, config);
  TargetCache cache;

  const std::size_t total_steps = config.episodes * env.config().num_intervals;
  std::size_t step = 0;
  for (std::size_t episode = 0; episode < config.episodes; ++episode) {
    std::vector<double> obs = env.reset(training_episode_seed(seed, episode)).normalized();
    double cumulative = 0.0;
    while (!env.done()) {
      const double epsilon = epsilon_at(config, step, total_steps);
      const std::size_t action = select_action(net, obs, epsilon, rng);
      TransitionRecord tr = env.step(action);
      cumulative += tr.reward;

      std::vector<double> next = tr.next_observation.normalized();
      buffer.push({obs, action, tr.reward / config.reward_scale, next, tr.done});

      if (buffer.size() >= config.batch_size) {
        const auto indices = buffer.sample_indices(config.batch_size, rng);
        const Batch batch = make_batch(buffer, indices);
        try {
          result.losses.push_back(train_step(net, target, batch, config, optimizer, &cache));
        } catch (const DivergenceError& e) {
          std::ostringstream msg;
          msg << e.what() << " at episode " << episode << ", step " << step
              << " (learning_rate=" << config.learning_rate << ", epsilon=" << epsilon << ")";
          throw DivergenceError(msg.str());
        }
      }

      ++step;
      if (step % config.target_sync_period == 0) {
        sync_target(net, target);
        cache.clear();
      }
      obs = std::move(next);
    }
    result.episode_rewards.push_back(cumulative);
    if (on_episode) on_episode(episode, cumulative);
  }
  return result;
}

}  // namespace uavmec
