#include "ahrs/ekf.hpp"

#include <cmath>

namespace ahrs {

namespace {

// Xi(q) with Omega(w) q = 1/2 Xi(q) w.
Eigen::Matrix<double, 4, 3> rate_coupling(const Vec4& q) {
  Eigen::Matrix<double, 4, 3> m;
  m << -q[1], -q[2], -q[3],
       q[0], -q[3], q[2],
       q[3], q[0], -q[1],
       -q[2], q[1], q[0];
  return m;
}

}  // namespace

ProcessJacobian process_jacobian(const StateVector& x, const Vec3& gyro, double dt) {
  const Vec4 q = x.head<4>();
  const Vec3 omega = correct_rates(gyro, x.tail<3>());
  const double half_dt = dt / 2.0;
  const double h = omega.norm() * half_dt;

  // q+ = cos(h) q + half_dt * s(h) Xi(q) w with s(h) = sin(h)/h, so
  // dq+/dw = -half_dt^2 s(h) q w^T + half_dt s(h) Xi(q) + half_dt^3 g(h) Xi(q) w w^T
  // where g(h) = s'(h)/h = (h cos h - sin h) / h^3.
  double s = 1.0, g = -1.0 / 3.0;
  if (h > 1e-4) {
    s = std::sin(h) / h;
    g = (h * std::cos(h) - std::sin(h)) / (h * h * h);
  } else {
    const double h2 = h * h;
    s = 1.0 - h2 / 6.0 + h2 * h2 / 120.0;
    g = -1.0 / 3.0 + h2 / 30.0 - h2 * h2 / 840.0;
  }
  const Eigen::Matrix<double, 4, 3> xi = rate_coupling(q);
  const Eigen::Matrix<double, 4, 3> dq_domega = -half_dt * half_dt * s * q * omega.transpose() +
                                                half_dt * s * xi +
                                                half_dt * half_dt * half_dt * g * (xi * omega) * omega.transpose();

  ProcessJacobian F = ProcessJacobian::Zero();
  F.topLeftCorner<4, 4>() = quaternion_transition(omega, dt);
  F.topRightCorner<4, 3>() = -dq_domega;
  F.bottomRightCorner<3, 3>().setIdentity();
  return F;
}

ObservationJacobian observation_jacobian(const StateVector& x) {
  const double q0 = x[0], q1 = x[1], q2 = x[2], q3 = x[3];
  ObservationJacobian H = ObservationJacobian::Zero();
  H.row(0).head<4>() << -2 * q2, 2 * q3, -2 * q0, 2 * q1;  // c13
  H.row(1).head<4>() << 2 * q1, 2 * q0, 2 * q3, 2 * q2;    // c23
  H.row(2).head<4>() << 2 * q0, 2 * q1, -2 * q2, -2 * q3;  // c11
  H.row(3).head<4>() << 2 * q3, 2 * q2, 2 * q1, 2 * q0;    // c12
  return H;
}

namespace ekf {

FilterState propagate(const FilterState& state, const Vec3& gyro, double dt,
                      const StateCovariance& process_noise) {
  const auto predicted = ekf_predict<kStateDim>({state.x, state.P}, process_model(state.x, gyro, dt),
                                                process_jacobian(state.x, gyro, dt), process_noise);
  return finalize_state({predicted.x, predicted.P});
}

CorrectionResult correct(const FilterState& prior, const ObservationVector& y,
                         const ObsCovariance& measurement_noise) {
  const ObsVector predicted = observe(quaternion_to_dcm(prior.attitude())).vector();
  const auto update = ekf_update<kStateDim, kObsDim>({prior.x, prior.P}, y.vector(), predicted,
                                                     observation_jacobian(prior.x), measurement_noise);
  CorrectionResult out;
  if (update.status == UpdateStatus::SingularInnovation) {
    out.state = prior;
    out.status = CorrectionStatus::SingularInnovation;
    return out;
  }
  out.state = finalize_state({update.estimate.x, update.estimate.P});
  return out;
}

}  // namespace ekf

}  // namespace ahrs
