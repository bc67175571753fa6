#pragma once

#include <complex>

#include "uavmec/rng.hpp"

namespace uavmec {

struct Position2D {
  double x = 0.0;  // meters
  double y = 0.0;  // meters

  friend bool operator==(const Position2D&, const Position2D&) = default;
};

double horizontal_distance(Position2D a, Position2D b);

/// Large-scale and small-scale channel constants. All values linear scale.
struct ChannelParams {
  double eta0 = 1e-4;     // power gain at the 1 m reference distance
  double theta = 2.0;     // path-loss exponent
  double rice_k = 10.0;   // Rician factor (LoS / scattered power ratio)
  double altitude = 100;  // UAV altitude, meters

  void validate() const;
};

/// One block-fading draw for a single device.
struct ChannelRealization {
  std::complex<double> gain;
  double power_gain = 0.0;  // |gain|^2
};

/// 3-D UAV-device distance with the device on the ground.
double distance(Position2D uav_xy, Position2D device_xy, double altitude);

/// eta0 * d^-theta.
double large_scale_gain(double d, const ChannelParams& params);

/// Unit-mean-power Rician amplitude. The LoS component has zero phase; the
/// scattered component is CN(0, 1). rice_k may be +inf (pure LoS).
std::complex<double> rician_sample(Rng& rng, double rice_k);

ChannelRealization channel_gain(double d, const ChannelParams& params, Rng& rng);

}  // namespace uavmec
