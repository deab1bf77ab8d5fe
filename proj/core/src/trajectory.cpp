#include "ahrs/trajectory.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace ahrs::sim {

namespace {

/// Attitude profile of one segment at local time tau: roll, pitch and yaw rate.
struct ProfilePoint {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw_rate = 0.0;
};

double raised_cosine(double x) { return 0.5 * (1.0 - std::cos(kPi * std::clamp(x, 0.0, 1.0))); }

/// Envelope that rises over `ramp` seconds, holds, and falls over the last `ramp` seconds.
double ramp_envelope(double tau, double length, double ramp) {
  if (ramp <= 0.0) return 1.0;
  const double r = std::min(ramp, length / 2.0);
  if (tau < r) return raised_cosine(tau / r);
  if (tau > length - r) return raised_cosine((length - tau) / r);
  return 1.0;
}

class SegmentProfile {
 public:
  SegmentProfile(const Maneuver& m, const TrajectoryEnvironment& env) : maneuver_{m}, env_{env} {
    if (const auto* g = std::get_if<Gust>(&m.kind)) {
      std::mt19937_64 rng(g->seed);
      std::uniform_real_distribution<double> freq(0.1, 0.5);
      std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
      for (auto& c : gust_roll_) c = {freq(rng), phase(rng)};
      for (auto& c : gust_pitch_) c = {freq(rng), phase(rng)};
    }
  }

  ProfilePoint at(double tau, double speed) const {
    return std::visit([&](const auto& k) { return eval(k, tau, speed); }, maneuver_.kind);
  }

 private:
  struct Component {
    double freq = 0.0;
    double phase = 0.0;
  };

  ProfilePoint eval(const SteadyFlight&, double, double) const { return {}; }

  ProfilePoint eval(const CoordinatedTurn& turn, double tau, double speed) const {
    const double envelope = ramp_envelope(tau, turn.duration, turn.roll_time);
    ProfilePoint p;
    p.roll = turn.bank * envelope;
    if (turn.yaw_rate) {
      const double held = std::tan(turn.bank);
      p.yaw_rate = held != 0.0 ? *turn.yaw_rate * std::tan(p.roll) / held : *turn.yaw_rate * envelope;
    } else {
      p.yaw_rate = env_.gravity * std::tan(p.roll) / speed;
    }
    return p;
  }

  ProfilePoint eval(const PitchDoublet& d, double tau, double) const {
    // Pitch rate A sin(2 pi tau / T) integrates to A T / (2 pi) (1 - cos(2 pi tau / T)).
    const double w = 2.0 * kPi / d.duration;
    ProfilePoint p;
    p.pitch = d.amplitude / w * (1.0 - std::cos(w * tau));
    return p;
  }

  ProfilePoint eval(const Gust& g, double tau, double) const {
    const double window = std::pow(std::sin(kPi * tau / g.duration), 2);
    // Equal-amplitude components: rms of the sum is a sqrt(K/2); the sin^2 window has rms sqrt(3/8).
    const double a = g.rms / std::sqrt(kComponents / 2.0) / std::sqrt(3.0 / 8.0);
    auto sum = [&](const std::array<Component, kComponents>& cs) {
      double s = 0.0;
      for (const auto& c : cs) s += std::sin(2.0 * kPi * c.freq * tau + c.phase);
      return a * window * s;
    };
    ProfilePoint p;
    p.roll = sum(gust_roll_);
    p.pitch = 0.5 * sum(gust_pitch_);
    return p;
  }

  static constexpr int kComponents = 4;
  Maneuver maneuver_;
  TrajectoryEnvironment env_;
  std::array<Component, kComponents> gust_roll_{};
  std::array<Component, kComponents> gust_pitch_{};
};

Vec3 body_rates(const SegmentProfile& profile, double tau, double speed) {
  constexpr double h = 1e-6;
  const ProfilePoint p = profile.at(tau, speed);
  const ProfilePoint lo = profile.at(tau - h, speed);
  const ProfilePoint hi = profile.at(tau + h, speed);
  const double roll_rate = (hi.roll - lo.roll) / (2.0 * h);
  const double pitch_rate = (hi.pitch - lo.pitch) / (2.0 * h);
  const double sr = std::sin(p.roll), cr = std::cos(p.roll);
  const double sp = std::sin(p.pitch), cp = std::cos(p.pitch);
  return {roll_rate - p.yaw_rate * sp,
          pitch_rate * cr + p.yaw_rate * sr * cp,
          -pitch_rate * sr + p.yaw_rate * cr * cp};
}

}  // namespace

double duration(const Maneuver& m) {
  return std::visit([](const auto& k) { return k.duration; }, m.kind);
}

std::vector<TruthSample> generate_trajectory(const std::vector<Maneuver>& script, double dt,
                                             const TrajectoryEnvironment& env) {
  if (script.empty()) throw EmptyScript("maneuver script is empty");
  if (!(dt > 0.0)) throw std::invalid_argument("sample interval must be positive");

  std::vector<TruthSample> out;
  Quaternion q = euler_to_quaternion({0.0, 0.0, env.initial_yaw});
  double speed = env.initial_speed;
  const Vec3 gravity_ned{0.0, 0.0, env.gravity};
  std::int64_t tick = 0;

  for (const Maneuver& m : script) {
    const double length = duration(m);
    if (!(length > 0.0)) throw std::invalid_argument("maneuver duration must be positive");
    const SegmentProfile profile(m, env);
    const auto steps = static_cast<std::int64_t>(std::llround(length / dt));

    const double speed_start = speed;
    double speed_target = speed;
    if (const auto* s = std::get_if<SteadyFlight>(&m.kind)) speed_target = s->speed;
    auto speed_at = [&](double tau) {
      if (env.speed_ramp_s <= 0.0 || tau >= env.speed_ramp_s) return speed_target;
      return speed_start + (speed_target - speed_start) * tau / env.speed_ramp_s;
    };
    auto speed_rate_at = [&](double tau) {
      if (env.speed_ramp_s <= 0.0 || tau >= env.speed_ramp_s) return 0.0;
      return (speed_target - speed_start) / env.speed_ramp_s;
    };

    for (std::int64_t k = 0; k < steps; ++k, ++tick) {
      const double tau = static_cast<double>(k) * dt;
      TruthSample s;
      s.t = static_cast<double>(tick) * dt;
      s.attitude = q;
      s.euler = quaternion_to_euler(q);
      s.speed = speed_at(tau);
      s.omega = body_rates(profile, tau + dt / 2.0, speed_at(tau + dt / 2.0));
      const Dcm c = quaternion_to_dcm(q);
      s.accel_body = Vec3{speed_rate_at(tau), 0.0, 0.0} + s.omega.cross(Vec3{s.speed, 0.0, 0.0}) -
                     c * gravity_ned;
      s.mag_body = c * env.mag_ref_ned;
      if (m.mag_disturbed_at(tau)) s.mag_body += m.mag_disturbance;
      out.push_back(s);
      q = propagate_quaternion(q, s.omega, dt);
    }
    speed = speed_target;
  }
  return out;
}

std::vector<Maneuver> canonical_script() {
  constexpr double kBank = 30.0 * kDegToRad;
  auto plain = [](auto kind) {
    Maneuver m;
    m.kind = kind;
    return m;
  };
  // A magnetic transient during the pull-up half of the second doublet, while the load
  // factor is out of the trusted band.
  Maneuver disturbed_doublet = plain(PitchDoublet{6.0, 0.3});
  disturbed_doublet.mag_disturbance = Vec3{0.2, -0.1, 0.15};
  disturbed_doublet.mag_disturbance_start = 0.5;
  disturbed_doublet.mag_disturbance_end = 2.5;
  return {
      plain(SteadyFlight{150.0, 20.0}),
      plain(Gust{20.0, 2.0 * kDegToRad, 11}),
      // Area 1: coordinated turn to the left.
      plain(CoordinatedTurn{30.0, -kBank, std::nullopt, 8.0}),
      // Area 2: steady flight with gusts and two pitch doublets.
      plain(SteadyFlight{40.0, 20.0}),
      plain(Gust{30.0, 3.0 * kDegToRad, 23}),
      plain(SteadyFlight{20.0, 20.0}),
      plain(PitchDoublet{6.0, 0.3}),
      plain(SteadyFlight{20.0, 20.0}),
      disturbed_doublet,
      plain(SteadyFlight{30.0, 20.0}),
      // Area 3: coordinated turn to the right.
      plain(CoordinatedTurn{30.0, kBank, std::nullopt, 8.0}),
      // Area 4: steady flight.
      plain(SteadyFlight{40.0, 20.0}),
      plain(Gust{30.0, 2.0 * kDegToRad, 37}),
      plain(SteadyFlight{150.0, 20.0}),
  };
}

}  // namespace ahrs::sim
