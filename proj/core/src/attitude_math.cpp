#include "ahrs/attitude_math.hpp"

#include <algorithm>
#include <cmath>

namespace ahrs {

namespace {

constexpr double kSmallAngle = 1e-8;
constexpr double kRenormalizeDrift = 1e-12;
constexpr double kGimbalMargin = 1e-9;
// Below this the roll terms c23, c33 carry no usable direction.
constexpr double kLockedColumn = 1e-9;

}  // namespace

double Quaternion::norm() const { return std::sqrt(q0 * q0 + q1 * q1 + q2 * q2 + q3 * q3); }

Quaternion Quaternion::normalized() const {
  const double n = norm();
  return {q0 / n, q1 / n, q2 / n, q3 / n};
}

Quaternion euler_to_quaternion(const EulerAngles& e) {
  const double cr = std::cos(e.roll / 2.0), sr = std::sin(e.roll / 2.0);
  const double cp = std::cos(e.pitch / 2.0), sp = std::sin(e.pitch / 2.0);
  const double cy = std::cos(e.yaw / 2.0), sy = std::sin(e.yaw / 2.0);
  return {
      cr * cp * cy + sr * sp * sy,
      sr * cp * cy - cr * sp * sy,
      cr * sp * cy + sr * cp * sy,
      cr * cp * sy - sr * sp * cy,
  };
}

EulerAngles dcm_to_euler(const Dcm& c) {
  const double s = std::clamp(c(0, 2), -1.0, 1.0);
  EulerAngles e;
  e.pitch = -std::asin(s);
  if (std::hypot(c(1, 2), c(2, 2)) < kLockedColumn) {
    // Pitch is +/-90 deg and only yaw -/+ roll is defined: report roll 0 and put the whole
    // rotation about the vertical into yaw (c21 = -sin(yaw), c22 = cos(yaw) with roll 0).
    e.roll = 0.0;
    e.yaw = std::atan2(-c(1, 0), c(1, 1));
  } else {
    e.roll = std::atan2(c(1, 2), c(2, 2));
    e.yaw = std::atan2(c(0, 1), c(0, 0));
  }
  // atan2 returns -pi for (-0, negative); fold onto the closed end of the range.
  if (e.roll == -kPi) e.roll = kPi;
  if (e.yaw == -kPi) e.yaw = kPi;
  return e;
}

EulerAngles quaternion_to_euler(const Quaternion& q) { return dcm_to_euler(quaternion_to_dcm(q)); }

bool near_gimbal_lock(const Quaternion& q) {
  return std::abs(2.0 * (q.q1 * q.q3 - q.q0 * q.q2)) > 1.0 - kGimbalMargin;
}

Dcm quaternion_to_dcm(const Quaternion& q) {
  const double q0 = q.q0, q1 = q.q1, q2 = q.q2, q3 = q.q3;
  Dcm c;
  c(0, 0) = q0 * q0 + q1 * q1 - q2 * q2 - q3 * q3;
  c(0, 1) = 2.0 * (q1 * q2 + q0 * q3);
  c(0, 2) = 2.0 * (q1 * q3 - q0 * q2);
  c(1, 0) = 2.0 * (q1 * q2 - q0 * q3);
  c(1, 1) = q0 * q0 - q1 * q1 + q2 * q2 - q3 * q3;
  c(1, 2) = 2.0 * (q2 * q3 + q0 * q1);
  c(2, 0) = 2.0 * (q1 * q3 + q0 * q2);
  c(2, 1) = 2.0 * (q2 * q3 - q0 * q1);
  c(2, 2) = q0 * q0 - q1 * q1 - q2 * q2 + q3 * q3;
  return c;
}

Quaternion dcm_to_quaternion(const Dcm& c) {
  // Pick the largest of 4q0^2, 4q1^2, 4q2^2, 4q3^2 as the pivot.
  const double trace = c.trace();
  const double d0 = 1.0 + trace;
  const double d1 = 1.0 + c(0, 0) - c(1, 1) - c(2, 2);
  const double d2 = 1.0 - c(0, 0) + c(1, 1) - c(2, 2);
  const double d3 = 1.0 - c(0, 0) - c(1, 1) + c(2, 2);

  Quaternion q;
  if (d0 >= d1 && d0 >= d2 && d0 >= d3) {
    const double s = 2.0 * std::sqrt(d0);
    q = {s / 4.0, (c(1, 2) - c(2, 1)) / s, (c(2, 0) - c(0, 2)) / s, (c(0, 1) - c(1, 0)) / s};
  } else if (d1 >= d2 && d1 >= d3) {
    const double s = 2.0 * std::sqrt(d1);
    q = {(c(1, 2) - c(2, 1)) / s, s / 4.0, (c(0, 1) + c(1, 0)) / s, (c(2, 0) + c(0, 2)) / s};
  } else if (d2 >= d3) {
    const double s = 2.0 * std::sqrt(d2);
    q = {(c(2, 0) - c(0, 2)) / s, (c(0, 1) + c(1, 0)) / s, s / 4.0, (c(1, 2) + c(2, 1)) / s};
  } else {
    const double s = 2.0 * std::sqrt(d3);
    q = {(c(0, 1) - c(1, 0)) / s, (c(2, 0) + c(0, 2)) / s, (c(1, 2) + c(2, 1)) / s, s / 4.0};
  }
  if (q.q0 < 0.0) q = {-q.q0, -q.q1, -q.q2, -q.q3};
  return q.normalized();
}

Mat4 rate_matrix(const Vec3& omega) {
  const double p = omega.x(), q = omega.y(), r = omega.z();
  Mat4 m;
  m << 0.0, -p, -q, -r,
       p, 0.0, r, -q,
       q, -r, 0.0, p,
       r, q, -p, 0.0;
  return 0.5 * m;
}

Mat4 quaternion_transition(const Vec3& omega, double dt) {
  // Omega^2 = -(|w|/2)^2 I, so exp(Omega dt) = I cos(h) + Omega dt sin(h)/h with h = |w| dt / 2.
  const double angle = omega.norm() * dt;
  const Mat4 omega_dt = rate_matrix(omega) * dt;
  if (angle < kSmallAngle) return Mat4::Identity() + omega_dt;
  const double half = angle / 2.0;
  return Mat4::Identity() * std::cos(half) + omega_dt * (std::sin(half) / half);
}

Quaternion propagate_quaternion(const Quaternion& q, const Vec3& omega, double dt) {
  Quaternion out = Quaternion::from_vector(quaternion_transition(omega, dt) * q.vector());
  if (std::abs(out.norm() - 1.0) > kRenormalizeDrift) out = out.normalized();
  return out;
}

double wrap_angle(double angle) {
  double a = std::remainder(angle, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

}  // namespace ahrs
