#include "ahrs/corruption.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace ahrs::sim {

namespace {

double highpass_coefficient(double corner_hz, double dt) {
  const double rc = 1.0 / (2.0 * kPi * corner_hz);
  return rc / (rc + dt);
}

std::int64_t ticks_for(double seconds, double dt) { return std::llround(seconds / dt); }

}  // namespace

CorruptionConfig CorruptionConfig::typical_mems() {
  CorruptionConfig c;
  c.gyro_bias_dps = Vec3::Constant(3.0);
  c.gyro_noise_dps = Vec3::Constant(1.0);
  c.accel_bias_mps2 = Vec3::Constant(0.05);
  c.accel_noise_mps2 = Vec3::Constant(0.009);
  c.mag_bias_mgauss = Vec3::Constant(4.0);
  c.mag_noise_mgauss = Vec3::Constant(1.25);
  c.gps_speed_bias_mps = 0.5;
  c.gps_speed_noise_mps = 1.5;
  c.gps_delay_s = 1.0;
  return c;
}

CorruptionConfig CorruptionConfig::clean() {
  CorruptionConfig c;
  c.gps_delay_s = 0.0;
  return c;
}

void CorruptionConfig::validate() const {
  const bool sigmas_ok = (gyro_noise_dps.array() >= 0.0).all() && (accel_noise_mps2.array() >= 0.0).all() &&
                         (mag_noise_mgauss.array() >= 0.0).all() && gps_speed_noise_mps >= 0.0;
  if (!sigmas_ok) throw std::invalid_argument("noise sigmas must be non-negative");
  if (!(gps_delay_s >= 0.0)) throw std::invalid_argument("gps delay must be non-negative");
  if (!(gps_rate_hz > 0.0)) throw std::invalid_argument("gps rate must be positive");
  if (!(accel_noise_corner_hz > 0.0)) throw std::invalid_argument("accel noise corner must be positive");
}

double highpass_noise_gain(double corner_hz, double dt) {
  const double a = highpass_coefficient(corner_hz, dt);
  return a * std::sqrt(2.0 / (1.0 + a));
}

std::vector<SensorFrame> corrupt(const std::vector<TruthSample>& truth, const CorruptionConfig& cfg,
                                 double dt) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  auto gaussian3 = [&](const Vec3& sigma) {
    Vec3 v;
    for (int i = 0; i < 3; ++i) v[i] = sigma[i] * unit(rng);
    return v;
  };

  const Vec3 gyro_bias = cfg.gyro_bias_dps * kDegToRad;
  const Vec3 gyro_sigma = cfg.gyro_noise_dps * kDegToRad;
  const Vec3 mag_bias = cfg.mag_bias_mgauss / 1000.0;
  const Vec3 mag_sigma = cfg.mag_noise_mgauss / 1000.0;

  const double hp = highpass_coefficient(cfg.accel_noise_corner_hz, dt);
  const Vec3 accel_white_sigma = cfg.accel_noise_mps2 / highpass_noise_gain(cfg.accel_noise_corner_hz, dt);
  Vec3 hp_out = Vec3::Zero();
  Vec3 hp_prev_in = Vec3::Zero();

  const std::int64_t gps_period = std::max<std::int64_t>(1, ticks_for(1.0 / cfg.gps_rate_hz, dt));
  const std::int64_t gps_delay = ticks_for(cfg.gps_delay_s, dt);
  std::optional<double> last_gps_t;

  std::vector<SensorFrame> frames;
  frames.reserve(truth.size());
  for (std::size_t k = 0; k < truth.size(); ++k) {
    const TruthSample& s = truth[k];
    SensorFrame f;
    f.t = s.t;
    f.gyro = s.omega + gyro_bias + gaussian3(gyro_sigma);

    const Vec3 white = gaussian3(accel_white_sigma);
    hp_out = hp * (hp_out + white - hp_prev_in);
    hp_prev_in = white;
    f.accel = s.accel_body + cfg.accel_bias_mps2 + hp_out;

    f.mag = s.mag_body + mag_bias + gaussian3(mag_sigma);

    const auto tick = static_cast<std::int64_t>(k);
    if (tick % gps_period == 0 && tick >= gps_delay) {
      const double delayed_speed = truth[k - static_cast<std::size_t>(gps_delay)].speed;
      f.gps_speed = delayed_speed + cfg.gps_speed_bias_mps + cfg.gps_speed_noise_mps * unit(rng);
      last_gps_t = f.t;
    }
    f.gps_age = last_gps_t ? f.t - *last_gps_t : std::numeric_limits<double>::infinity();
    frames.push_back(f);
  }
  return frames;
}

}  // namespace ahrs::sim
