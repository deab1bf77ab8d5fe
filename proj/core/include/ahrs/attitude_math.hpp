#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace ahrs {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// NED-to-body direction cosine matrix. Entry (i-1, j-1) is c_ij.
using Dcm = Eigen::Matrix3d;

/// Roll, pitch, yaw in radians. Ranges: (-pi, pi] x [-pi/2, pi/2] x (-pi, pi].
struct EulerAngles {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
};

/// Attitude quaternion (q0 scalar part). Body rotation relative to NED.
struct Quaternion {
  double q0 = 1.0;
  double q1 = 0.0;
  double q2 = 0.0;
  double q3 = 0.0;

  static Quaternion identity() { return {}; }
  static Quaternion from_vector(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }

  Vec4 vector() const { return {q0, q1, q2, q3}; }
  double norm() const;
  Quaternion normalized() const;
};

Quaternion euler_to_quaternion(const EulerAngles& e);

/// Euler angles read from the DCM terms: pitch = -asin(c13), roll = atan2(c23, c33),
/// yaw = atan2(c12, c11). The asin argument is clamped to [-1, 1]. At exact gimbal lock
/// (c23 and c33 both vanish) roll is reported as 0 and yaw carries the vertical rotation.
EulerAngles dcm_to_euler(const Dcm& c);

/// Same formulas as dcm_to_euler applied to quaternion_to_dcm(q).
EulerAngles quaternion_to_euler(const Quaternion& q);

/// True when |2(q1q3 - q0q2)| > 1 - 1e-9, i.e. pitch is at +/-90 deg and roll/yaw are coupled.
bool near_gimbal_lock(const Quaternion& q);

Dcm quaternion_to_dcm(const Quaternion& q);

/// Inverse of quaternion_to_dcm for a proper rotation (Shepperd's method). Returns q0 >= 0.
Quaternion dcm_to_quaternion(const Dcm& c);

/// 4x4 rate matrix Omega = 1/2 [0 -P -Q -R; P 0 R -Q; Q -R 0 P; R Q -P 0].
Mat4 rate_matrix(const Vec3& omega);

/// exp(Omega * dt) for constant omega, in closed form. Orthogonal for every input.
Mat4 quaternion_transition(const Vec3& omega, double dt);

/// One norm-preserving gyro integration step: q+ = exp(Omega dt) q.
Quaternion propagate_quaternion(const Quaternion& q, const Vec3& omega, double dt);

/// Bias-corrected angular rates, omega = omega_s - b.
inline Vec3 correct_rates(const Vec3& measured, const Vec3& bias) { return measured - bias; }

/// Wraps an angle to (-pi, pi].
double wrap_angle(double angle);

constexpr double kPi = 3.14159265358979323846;
constexpr double kDegToRad = kPi / 180.0;
constexpr double kRadToDeg = 180.0 / kPi;

}  // namespace ahrs
