#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "ahrs/attitude_math.hpp"

namespace ahrs::sim {

/// Wings-level constant-speed flight. The speed ramps linearly from the previous segment's
/// speed over `speed_ramp_s`.
struct SteadyFlight {
  double duration = 0.0;  // s
  double speed = 20.0;    // m/s
};

/// Banked turn. Bank rolls in and out with raised-cosine ramps of `roll_time` seconds.
/// If `yaw_rate` is set, the held-bank yaw rate is that value and scales with tan(bank)
/// during the ramps; otherwise the coordinated value g tan(bank) / U is used.
/// Negative bank turns left.
struct CoordinatedTurn {
  double duration = 0.0;           // s
  double bank = 0.0;               // rad
  std::optional<double> yaw_rate;  // rad/s
  double roll_time = 3.0;          // s
};

/// One full sine period of pitch rate with the given amplitude (pull-up then push-over).
struct PitchDoublet {
  double duration = 0.0;   // s
  double amplitude = 0.0;  // rad/s
};

/// Band-limited random roll/pitch disturbance with the given attitude rms, windowed so that
/// it starts and ends at zero.
struct Gust {
  double duration = 0.0;  // s
  double rms = 0.0;       // rad
  std::uint64_t seed = 1;
};

struct Maneuver {
  std::variant<SteadyFlight, CoordinatedTurn, PitchDoublet, Gust> kind;
  /// Body-frame additive magnetic disturbance (gauss) present during the segment, e.g.
  /// a motor-current transient. Zero for a clean field.
  Vec3 mag_disturbance = Vec3::Zero();
  /// Window within the segment (seconds from its start) in which the disturbance acts;
  /// an absent end means until the end of the segment.
  double mag_disturbance_start = 0.0;
  std::optional<double> mag_disturbance_end;

  bool mag_disturbed_at(double tau) const {
    return tau >= mag_disturbance_start && (!mag_disturbance_end || tau < *mag_disturbance_end);
  }
};

double duration(const Maneuver& m);

struct TrajectoryEnvironment {
  Vec3 mag_ref_ned{0.26, 0.0, 0.36};  // gauss
  double gravity = 9.80665;           // m/s^2
  double initial_speed = 20.0;        // m/s
  double initial_yaw = 0.0;           // rad
  double speed_ramp_s = 5.0;
};

/// Truth at time t. `omega` is the body rate held over [t, t + dt); the next sample's
/// attitude is exactly propagate_quaternion(attitude, omega, dt).
struct TruthSample {
  double t = 0.0;
  Quaternion attitude;
  EulerAngles euler;
  Vec3 omega = Vec3::Zero();       // rad/s
  Vec3 accel_body = Vec3::Zero();  // specific force, m/s^2
  Vec3 mag_body = Vec3::Zero();    // gauss
  double speed = 0.0;              // m/s
};

class EmptyScript : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Samples the maneuver sequence every dt. Body rates come from the scripted Euler-angle
/// profile evaluated at the interval midpoint; the attitude is the exact integral of
/// those rates. Specific force is (dU/dt, 0, 0) + w x (U, 0, 0) - C (0, 0, g).
std::vector<TruthSample> generate_trajectory(const std::vector<Maneuver>& script, double dt,
                                             const TrajectoryEnvironment& env = {});

/// Four-phase reference flight: alignment leg, left coordinated turn, steady leg with gusts
/// and pitch doublets (one under a magnetic transient), right coordinated turn, final
/// steady leg. 602 s long.
std::vector<Maneuver> canonical_script();

}  // namespace ahrs::sim
