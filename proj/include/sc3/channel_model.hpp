#pragma once

// Free-space line-of-sight downlink from the hub to a robot over orthogonal
// channels (no interference, no fading).

#include <cmath>
#include <numbers>

#include "sc3/error.hpp"

namespace sc3 {

struct LinkParams {
  double bandwidth_hz = 5e3;      // B, per channel
  double gamma0 = 1e-6;           // reference channel gain at 1 m
  double noise_power_w = 1e-14;   // sigma^2
  double uav_height_m = 100.0;

  void validate() const {
    if (!(bandwidth_hz > 0.0) || !(gamma0 > 0.0) || !(noise_power_w > 0.0) || !(uav_height_m > 0.0))
      throw Error(ErrorCode::InvalidParams, "link params must all be positive");
  }
};

inline double channel_gain(double distance_m, const LinkParams& link) {
  return link.gamma0 / (distance_m * distance_m);
}

// bits/s/Hz
inline double spectral_efficiency(double p_w, double gain, const LinkParams& link) {
  return std::log2(1.0 + gain * p_w / link.noise_power_w);
}

// Bits delivered to the robot in one cycle.
inline double entropy_per_cycle(double p_w, double t_commu_s, double distance_m, const LinkParams& link) {
  return link.bandwidth_hz * t_commu_s * spectral_efficiency(p_w, channel_gain(distance_m, link), link);
}

inline double power_for_entropy(double bits, double t_commu_s, double distance_m, const LinkParams& link) {
  if (!(t_commu_s > 0.0)) throw Error(ErrorCode::InvalidParams, "communication time must be positive");
  const double se = bits / (link.bandwidth_hz * t_commu_s);
  return link.noise_power_w / channel_gain(distance_m, link) * std::expm1(se * std::numbers::ln2);
}

}  // namespace sc3
