#include "uavmec/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace uavmec {

double horizontal_distance(Position2D a, Position2D b) { return std::hypot(a.x - b.x, a.y - b.y); }

void ChannelParams::validate() const {
  if (!(eta0 > 0.0) || !std::isfinite(eta0)) throw std::invalid_argument("eta0 must be positive");
  if (!(theta >= 0.0)) throw std::invalid_argument("path-loss exponent must be non-negative");
  if (!(rice_k >= 0.0)) throw std::invalid_argument("Rician factor must be non-negative");
  if (!(altitude > 0.0)) throw std::invalid_argument("altitude must be positive");
}

double distance(Position2D uav_xy, Position2D device_xy, double altitude) {
  const double dx = uav_xy.x - device_xy.x;
  const double dy = uav_xy.y - device_xy.y;
  return std::sqrt(dx * dx + dy * dy + altitude * altitude);
}

double large_scale_gain(double d, const ChannelParams& params) {
  return params.eta0 * std::pow(d, -params.theta);
}

std::complex<double> rician_sample(Rng& rng, double rice_k) {
  // CN(0, 1): independent real and imaginary parts with variance 1/2 each.
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  const double re = normal(rng);
  const double im = normal(rng);
  const std::complex<double> scattered(re, im);

  if (std::isinf(rice_k)) return {1.0, 0.0};
  const double los_weight = std::sqrt(rice_k / (rice_k + 1.0));
  const double nlos_weight = std::sqrt(1.0 / (rice_k + 1.0));
  return los_weight * std::complex<double>(1.0, 0.0) + nlos_weight * scattered;
}

ChannelRealization channel_gain(double d, const ChannelParams& params, Rng& rng) {
  const auto rho = rician_sample(rng, params.rice_k);
  ChannelRealization out;
  out.gain = std::sqrt(large_scale_gain(d, params)) * rho;
  out.power_gain = std::norm(out.gain);
  return out;
}

}  // namespace uavmec
