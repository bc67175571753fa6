#include "uavmec/qnetwork.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace uavmec {

QNetwork::QNetwork(std::vector<std::size_t> sizes) {
  if (sizes.size() < 2) throw std::invalid_argument("QNetwork needs at least input and output");
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    if (sizes[l] == 0 || sizes[l + 1] == 0)
      throw std::invalid_argument("QNetwork layer widths must be positive");
    DenseLayer layer;
    layer.in_dim = sizes[l];
    layer.out_dim = sizes[l + 1];
    layer.weights.assign(layer.in_dim * layer.out_dim, 0.0);
    layer.bias.assign(layer.out_dim, 0.0);
    layers_.push_back(std::move(layer));
  }
}

QNetwork QNetwork::random(std::vector<std::size_t> sizes, Rng& rng) {
  QNetwork net(std::move(sizes));
  for (auto& layer : net.layers_) {
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.in_dim));
    std::uniform_real_distribution<double> u(-limit, limit);
    for (auto& w : layer.weights) w = u(rng);
  }
  return net;
}

std::size_t QNetwork::input_size() const { return layers_.empty() ? 0 : layers_.front().in_dim; }

std::size_t QNetwork::output_size() const { return layers_.empty() ? 0 : layers_.back().out_dim; }

std::vector<std::size_t> QNetwork::sizes() const {
  std::vector<std::size_t> out;
  if (layers_.empty()) return out;
  out.push_back(layers_.front().in_dim);
  for (const auto& l : layers_) out.push_back(l.out_dim);
  return out;
}

std::size_t QNetwork::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weights.size() + l.bias.size();
  return n;
}

std::vector<double> QNetwork::forward(std::span<const double> obs) const {
  return forward_batch(obs, 1);
}

std::vector<double> QNetwork::forward_batch(std::span<const double> inputs, std::size_t batch,
                                            kernels::Mode mode) const {
  if (layers_.empty()) throw std::logic_error("forward on an empty QNetwork");
  if (inputs.size() != batch * input_size())
    throw std::invalid_argument("QNetwork input has " + std::to_string(inputs.size()) +
                                " values, expected " + std::to_string(batch * input_size()));
  std::vector<double> current(inputs.begin(), inputs.end());
  std::vector<double> next;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    next.assign(batch * layer.out_dim, 0.0);
    kernels::dense_forward(mode, layer.weights, layer.bias, layer.in_dim, layer.out_dim, current,
                           batch, next, l + 1 < layers_.size());
    current.swap(next);
  }
  return current;
}

bool QNetwork::all_finite() const {
  for (const auto& l : layers_) {
    for (double w : l.weights)
      if (!std::isfinite(w)) return false;
    for (double b : l.bias)
      if (!std::isfinite(b)) return false;
  }
  return true;
}

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("argmax of an empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

}  // namespace uavmec
