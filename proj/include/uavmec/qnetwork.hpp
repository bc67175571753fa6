#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "uavmec/kernels.hpp"
#include "uavmec/rng.hpp"

namespace uavmec {

struct DenseLayer {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::vector<double> weights;  // out_dim x in_dim, row-major
  std::vector<double> bias;     // out_dim

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

/// Fully connected action-value network: ReLU on hidden layers, identity on
/// the output layer, one output per catalog action.
class QNetwork {
 public:
  QNetwork() = default;
  /// Zero-initialised network with the given layer widths (input first).
  explicit QNetwork(std::vector<std::size_t> sizes);

  /// He-uniform weights, zero biases.
  static QNetwork random(std::vector<std::size_t> sizes, Rng& rng);

  std::size_t input_size() const;
  std::size_t output_size() const;
  std::vector<std::size_t> sizes() const;
  std::size_t parameter_count() const;

  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  /// Throws std::invalid_argument when obs.size() != input_size().
  std::vector<double> forward(std::span<const double> obs) const;

  /// Row-major batch in, row-major batch x output_size out.
  std::vector<double> forward_batch(std::span<const double> inputs, std::size_t batch,
                                    kernels::Mode mode = kernels::Mode::serial) const;

  bool all_finite() const;

  friend bool operator==(const QNetwork&, const QNetwork&) = default;

 private:
  std::vector<DenseLayer> layers_;
};

/// Index of the largest value; ties go to the lowest index.
std::size_t argmax(std::span<const double> values);

}  // namespace uavmec
