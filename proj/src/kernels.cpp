#include "uavmec/kernels.hpp"

#include <cstdint>

namespace uavmec::kernels {
namespace {

inline double dense_element(const double* w_row, double b, const double* x, std::size_t in_dim,
                            bool relu) {
  double acc = b;
  for (std::size_t i = 0; i < in_dim; ++i) acc += w_row[i] * x[i];
  return (relu && acc < 0.0) ? 0.0 : acc;
}

// Computes a BB x BO block of outputs. Every accumulator sums in the same order as
// dense_element, so tiled and untiled results are bit-identical; the tiling only exposes
// independent dependency chains to the CPU.
template <std::size_t BB, std::size_t BO>
inline void dense_tile(const double* w, const double* bias, const double* in, std::size_t in_dim,
                       std::size_t out_dim, std::size_t b0, std::size_t o0, double* out,
                       bool relu) {
  double acc[BB][BO];
  for (std::size_t bb = 0; bb < BB; ++bb)
    for (std::size_t oo = 0; oo < BO; ++oo) acc[bb][oo] = bias[o0 + oo];
  for (std::size_t i = 0; i < in_dim; ++i) {
    double xs[BB];
    for (std::size_t bb = 0; bb < BB; ++bb) xs[bb] = in[(b0 + bb) * in_dim + i];
    for (std::size_t oo = 0; oo < BO; ++oo) {
      const double wv = w[(o0 + oo) * in_dim + i];
      for (std::size_t bb = 0; bb < BB; ++bb) acc[bb][oo] += wv * xs[bb];
    }
  }
  for (std::size_t bb = 0; bb < BB; ++bb)
    for (std::size_t oo = 0; oo < BO; ++oo) {
      const double v = acc[bb][oo];
      out[(b0 + bb) * out_dim + o0 + oo] = (relu && v < 0.0) ? 0.0 : v;
    }
}

constexpr std::size_t kTileB = 2;
constexpr std::size_t kTileO = 8;

// Fills the rows [b0, b1) of the output, tiling where the block is full.
void dense_rows(const double* w, const double* bias, const double* in, std::size_t in_dim,
                std::size_t out_dim, std::size_t b0, std::size_t b1, double* out, bool relu) {
  std::size_t b = b0;
  for (; b + kTileB <= b1; b += kTileB) {
    std::size_t o = 0;
    for (; o + kTileO <= out_dim; o += kTileO)
      dense_tile<kTileB, kTileO>(w, bias, in, in_dim, out_dim, b, o, out, relu);
    for (; o < out_dim; ++o)
      dense_tile<kTileB, 1>(w, bias, in, in_dim, out_dim, b, o, out, relu);
  }
  for (; b < b1; ++b) {
    std::size_t o = 0;
    for (; o + kTileO <= out_dim; o += kTileO)
      dense_tile<1, kTileO>(w, bias, in, in_dim, out_dim, b, o, out, relu);
    for (; o < out_dim; ++o)
      out[b * out_dim + o] = dense_element(w + o * in_dim, bias[o], in + b * in_dim, in_dim, relu);
  }
}

}  // namespace

void dense_forward_serial(std::span<const double> weights, std::span<const double> bias,
                          std::size_t in_dim, std::size_t out_dim, std::span<const double> in,
                          std::size_t batch, std::span<double> out, bool relu) {
  dense_rows(weights.data(), bias.data(), in.data(), in_dim, out_dim, 0, batch, out.data(), relu);
}

void dense_forward_parallel(std::span<const double> weights, std::span<const double> bias,
                            std::size_t in_dim, std::size_t out_dim, std::span<const double> in,
                            std::size_t batch, std::span<double> out, bool relu) {
  // Work is split by row blocks, and each block runs the serial tile sequence.
  const auto blocks = static_cast<std::int64_t>((batch + kTileB - 1) / kTileB);
#pragma omp parallel for schedule(static)
  for (std::int64_t blk = 0; blk < blocks; ++blk) {
    const std::size_t b0 = static_cast<std::size_t>(blk) * kTileB;
    const std::size_t b1 = b0 + kTileB < batch ? b0 + kTileB : batch;
    dense_rows(weights.data(), bias.data(), in.data(), in_dim, out_dim, b0, b1, out.data(), relu);
  }
}

void row_max_serial(std::span<const double> values, std::size_t batch, std::size_t width,
                    std::span<double> out) {
  for (std::size_t b = 0; b < batch; ++b) {
    const double* row = values.data() + b * width;
    double best = row[0];
    for (std::size_t i = 1; i < width; ++i)
      if (row[i] > best) best = row[i];
    out[b] = best;
  }
}

void row_max_parallel(std::span<const double> values, std::size_t batch, std::size_t width,
                      std::span<double> out) {
  const auto rows = static_cast<std::int64_t>(batch);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < rows; ++b) {
    const double* row = values.data() + static_cast<std::size_t>(b) * width;
    double best = row[0];
    for (std::size_t i = 1; i < width; ++i)
      if (row[i] > best) best = row[i];
    out[static_cast<std::size_t>(b)] = best;
  }
}

}  // namespace uavmec::kernels
