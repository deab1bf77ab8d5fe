#include "ahrs/ukf.hpp"

namespace ahrs {

NoiseCovariances NoiseCovariances::diagonal(double q_quat, double q_bias, double r_obs) {
  NoiseCovariances n;
  n.process.diagonal() << q_quat, q_quat, q_quat, q_quat, q_bias, q_bias, q_bias;
  n.measurement = ObsCovariance::Identity() * r_obs;
  return n;
}

FilterState initial_state(const Quaternion& q, double p_quat, double p_bias) {
  FilterState s;
  s.x.head<4>() = q.normalized().vector();
  s.P.diagonal() << p_quat, p_quat, p_quat, p_quat, p_bias, p_bias, p_bias;
  return s;
}

StateVector process_model(const StateVector& x, const Vec3& gyro, double dt) {
  StateVector out = x;
  const Vec3 omega = correct_rates(gyro, x.tail<3>());
  out.head<4>() = quaternion_transition(omega, dt) * x.head<4>();
  return out;
}

ObsVector observation_model(const StateVector& x) {
  const Quaternion q = Quaternion::from_vector(x.head<4>()).normalized();
  return observe(quaternion_to_dcm(q)).vector();
}

FilterState finalize_state(FilterState state) {
  state.x.head<4>().normalize();
  state.P = symmetrized<kStateDim>(state.P);
  return state;
}

namespace ukf {

FilterState propagate(const FilterState& state, const Vec3& gyro, double dt, const UkfParams& params,
                      const StateCovariance& process_noise, bool* repaired) {
  const GaussianEstimate<kStateDim> prior{state.x, state.P};
  const auto predicted = unscented_predict<kStateDim>(
      prior, [&](const StateVector& x) { return process_model(x, gyro, dt); }, params, process_noise,
      repaired);
  return finalize_state({predicted.x, predicted.P});
}

CorrectionResult correct(const FilterState& prior, const ObservationVector& y, const UkfParams& params,
                         const ObsCovariance& measurement_noise) {
  const auto update = unscented_update<kStateDim, kObsDim>(
      GaussianEstimate<kStateDim>{prior.x, prior.P}, y.vector(),
      [](const StateVector& x) { return observation_model(x); }, params, measurement_noise);

  CorrectionResult out;
  out.repaired = update.repaired;
  if (update.status == UpdateStatus::SingularInnovation) {
    out.state = prior;
    out.status = CorrectionStatus::SingularInnovation;
    return out;
  }
  out.state = finalize_state({update.estimate.x, update.estimate.P});
  return out;
}

}  // namespace ukf

}  // namespace ahrs
