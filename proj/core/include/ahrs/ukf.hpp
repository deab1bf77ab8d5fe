#pragma once

#include <Eigen/Core>

#include "ahrs/attitude_math.hpp"
#include "ahrs/triad.hpp"
#include "ahrs/unscented.hpp"

namespace ahrs {

inline constexpr int kStateDim = 7;
inline constexpr int kObsDim = 4;

using StateVector = Eigen::Matrix<double, kStateDim, 1>;
using StateCovariance = Eigen::Matrix<double, kStateDim, kStateDim>;
using ObsVector = Eigen::Matrix<double, kObsDim, 1>;
using ObsCovariance = Eigen::Matrix<double, kObsDim, kObsDim>;

/// x = [q0 q1 q2 q3 bx by bz] (biases in rad/s) with its covariance.
struct FilterState {
  StateVector x = StateVector::Zero();
  StateCovariance P = StateCovariance::Zero();

  Quaternion attitude() const { return Quaternion::from_vector(x.head<4>()); }
  Vec3 gyro_bias() const { return x.tail<3>(); }
};

struct NoiseCovariances {
  StateCovariance process = StateCovariance::Zero();
  ObsCovariance measurement = ObsCovariance::Zero();

  /// Q = blockdiag(q_quat * I4, q_bias * I3), R = r_obs * I4.
  static NoiseCovariances diagonal(double q_quat, double q_bias, double r_obs);
  /// Q_q = 1e-6 I, Q_b = 0, R = 2.5e-3 I.
  static NoiseCovariances defaults() { return diagonal(1e-6, 0.0, 2.5e-3); }
};

/// x0 = [q, 0, 0, 0], P0 = diag(p_quat x4, p_bias x3).
FilterState initial_state(const Quaternion& q, double p_quat = 1e-2,
                          double p_bias = (5.0 * kDegToRad) * (5.0 * kDegToRad));

/// Process map for one state: bias held, quaternion advanced by exp(Omega(w_s - b) dt).
/// The quaternion block is not renormalized (the map stays linear in q).
StateVector process_model(const StateVector& x, const Vec3& gyro, double dt);

/// (c13, c23, c11, c12) of the state's quaternion, renormalized first.
ObsVector observation_model(const StateVector& x);

enum class CorrectionStatus { Applied, SingularInnovation };

struct CorrectionResult {
  FilterState state;
  CorrectionStatus status = CorrectionStatus::Applied;
  bool repaired = false;
};

namespace ukf {

/// Sigma-point time update. Throws CholeskyFailure on an unrecoverable covariance.
FilterState propagate(const FilterState& state, const Vec3& gyro, double dt, const UkfParams& params,
                      const StateCovariance& process_noise, bool* repaired = nullptr);

/// Redraws sigma points from the prior and applies the TRIAD observation. On a singular
/// innovation covariance the prior is returned unchanged with status SingularInnovation.
CorrectionResult correct(const FilterState& prior, const ObservationVector& y, const UkfParams& params,
                         const ObsCovariance& measurement_noise);

}  // namespace ukf

/// Renormalizes the quaternion block and symmetrizes P.
FilterState finalize_state(FilterState state);

}  // namespace ahrs
