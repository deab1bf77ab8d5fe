#pragma once

#include <cstdint>
#include <vector>

#include "ahrs/pipeline.hpp"
#include "ahrs/trajectory.hpp"

namespace ahrs::sim {

/// Sensor error model. Biases are constant for the whole run; white noise is Gaussian.
/// The accelerometer noise is first-order high-pass filtered white noise scaled so that its
/// stationary standard deviation equals accel_noise_mps2.
struct CorruptionConfig {
  Vec3 gyro_bias_dps = Vec3::Zero();
  Vec3 gyro_noise_dps = Vec3::Zero();
  Vec3 accel_bias_mps2 = Vec3::Zero();
  Vec3 accel_noise_mps2 = Vec3::Zero();
  double accel_noise_corner_hz = 20.0;
  Vec3 mag_bias_mgauss = Vec3::Zero();
  Vec3 mag_noise_mgauss = Vec3::Zero();
  double gps_speed_bias_mps = 0.0;
  double gps_speed_noise_mps = 0.0;
  double gps_delay_s = 1.0;
  double gps_rate_hz = 1.0;
  std::uint64_t seed = 1;

  /// Typical MEMS values: gyro 3 deg/s bias, 1 deg/s noise; accel 0.05 / 0.009 m/s^2;
  /// mag 4 / 1.25 mG; GPS speed 0.5 / 1.5 m/s; GPS delayed 1 s.
  static CorruptionConfig typical_mems();
  /// No bias, no noise, no GPS delay.
  static CorruptionConfig clean();

  /// Throws std::invalid_argument on negative sigmas, negative delay or bad rates.
  void validate() const;
};

/// Produces the sensor stream seen by the estimator. GPS speed is delivered at gps_rate_hz
/// on ticks that are whole multiples of the GPS period, carrying the truth speed from
/// exactly gps_delay_s earlier. `dt` is the truth sample interval.
std::vector<SensorFrame> corrupt(const std::vector<TruthSample>& truth, const CorruptionConfig& cfg,
                                 double dt);

/// Stationary std of the first-order high-pass y_k = a (y_{k-1} + x_k - x_{k-1}) for unit
/// white input: a sqrt(2 / (1 + a)).
double highpass_noise_gain(double corner_hz, double dt);

}  // namespace ahrs::sim
