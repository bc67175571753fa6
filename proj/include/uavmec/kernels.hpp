#pragma once

#include <cstddef>
#include <span>

namespace uavmec::kernels {

enum class Mode { serial, parallel };

/// out[b, o] = act(bias[o] + sum_i weights[o, i] * in[b, i]) for a row-major
/// batch. `weights` is out_dim x in_dim row-major. The serial version is the
/// reference; the OpenMP version splits the (batch, output) grid across
/// threads and performs the same per-element arithmetic, so both produce
/// bit-identical results.
void dense_forward_serial(std::span<const double> weights, std::span<const double> bias,
                          std::size_t in_dim, std::size_t out_dim, std::span<const double> in,
                          std::size_t batch, std::span<double> out, bool relu);

void dense_forward_parallel(std::span<const double> weights, std::span<const double> bias,
                            std::size_t in_dim, std::size_t out_dim, std::span<const double> in,
                            std::size_t batch, std::span<double> out, bool relu);

inline void dense_forward(Mode mode, std::span<const double> weights, std::span<const double> bias,
                          std::size_t in_dim, std::size_t out_dim, std::span<const double> in,
                          std::size_t batch, std::span<double> out, bool relu) {
  if (mode == Mode::parallel)
    dense_forward_parallel(weights, bias, in_dim, out_dim, in, batch, out, relu);
  else
    dense_forward_serial(weights, bias, in_dim, out_dim, in, batch, out, relu);
}

/// Row-wise max over a batch x width matrix.
void row_max_serial(std::span<const double> values, std::size_t batch, std::size_t width,
                    std::span<double> out);
void row_max_parallel(std::span<const double> values, std::size_t batch, std::size_t width,
                      std::span<double> out);

}  // namespace uavmec::kernels
