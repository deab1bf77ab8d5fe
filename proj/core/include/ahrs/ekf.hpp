#pragma once

#include "ahrs/ukf.hpp"

namespace ahrs {

using ProcessJacobian = Eigen::Matrix<double, kStateDim, kStateDim>;
using ObservationJacobian = Eigen::Matrix<double, kObsDim, kStateDim>;

/// d(process_model)/dx at x. The upper-left block is exp(Omega dt), the upper-right block
/// carries the bias through w = w_s - b, the lower-right block is I3.
ProcessJacobian process_jacobian(const StateVector& x, const Vec3& gyro, double dt);

/// Partials of the unnormalized (c13, c23, c11, c12) with respect to q; bias columns are zero.
ObservationJacobian observation_jacobian(const StateVector& x);

/// Textbook EKF steps, generic over the state/observation dimensions.
template <int N>
GaussianEstimate<N> ekf_predict(const GaussianEstimate<N>& prior, const Eigen::Matrix<double, N, 1>& x_next,
                                const Eigen::Matrix<double, N, N>& F, const Eigen::Matrix<double, N, N>& Q) {
  return {x_next, symmetrized<N>(F * prior.P * F.transpose() + Q)};
}

template <int N, int M>
UpdateResult<N> ekf_update(const GaussianEstimate<N>& prior, const Eigen::Matrix<double, M, 1>& y,
                           const Eigen::Matrix<double, M, 1>& y_pred, const Eigen::Matrix<double, M, N>& H,
                           const Eigen::Matrix<double, M, M>& R) {
  UpdateResult<N> out;
  const Eigen::Matrix<double, M, M> S = symmetrized<M>(H * prior.P * H.transpose() + R);
  if (!innovation_invertible<M>(S)) {
    out.estimate = prior;
    out.status = UpdateStatus::SingularInnovation;
    return out;
  }
  const Eigen::Matrix<double, N, M> PHt = prior.P * H.transpose();
  const Eigen::Matrix<double, N, M> K = S.ldlt().solve(PHt.transpose()).transpose();
  out.estimate.x = prior.x + K * (y - y_pred);
  out.estimate.P = symmetrized<N>(prior.P - K * S * K.transpose());
  return out;
}

namespace ekf {

FilterState propagate(const FilterState& state, const Vec3& gyro, double dt,
                      const StateCovariance& process_noise);

CorrectionResult correct(const FilterState& prior, const ObservationVector& y,
                         const ObsCovariance& measurement_noise);

}  // namespace ekf

}  // namespace ahrs
