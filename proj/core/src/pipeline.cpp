#include "ahrs/pipeline.hpp"

#include "ahrs/ekf.hpp"

namespace ahrs {

std::string_view to_string(EstimatorKind kind) { return kind == EstimatorKind::Ukf ? "ukf" : "ekf"; }

std::optional<EstimatorKind> parse_estimator(std::string_view name) {
  if (name == "ukf") return EstimatorKind::Ukf;
  if (name == "ekf") return EstimatorKind::Ekf;
  return std::nullopt;
}

std::string_view to_string(SkipReason reason) {
  switch (reason) {
    case SkipReason::None: return "";
    case SkipReason::MagUnreliable: return "mag_unreliable";
    case SkipReason::Acrobatic: return "acrobatic";
    case SkipReason::DegeneratePair: return "degenerate_pair";
    case SkipReason::SingularInnovation: return "singular_innovation";
  }
  return "";
}

StepScheduler::StepScheduler(SchedulerConfig config)
    : config_{std::move(config)}, mag_ref_{config_.mag_ref_ned} {
  if (!(mag_ref_.field_ned.norm() > 0.0)) throw std::invalid_argument("magnetic reference must be nonzero");
  if (!(config_.propagate_rate_hz > 0.0)) throw std::invalid_argument("propagation rate must be positive");
  // Validates the cutoff against the sample rate up front.
  lowpass_accel(Vec3::Zero(), {}, config_.accel_cutoff_hz, config_.propagate_rate_hz);
}

std::optional<ScheduledAction> StepScheduler::schedule(const SensorFrame& frame, const Vec3& bias,
                                                       std::optional<double> next_t) {
  if (last_t_ && !(frame.t > *last_t_)) return std::nullopt;
  if (!last_t_) {
    lowpass_.output = frame.accel;
    rate_lowpass_.output = frame.gyro;
  }
  last_t_ = frame.t;
  lowpass_ = lowpass_accel(frame.accel, lowpass_, config_.accel_cutoff_hz, config_.propagate_rate_hz);
  rate_lowpass_ = lowpass_accel(frame.gyro, rate_lowpass_, config_.accel_cutoff_hz, config_.propagate_rate_hz);

  ScheduledAction action;
  action.dt = (next_t && *next_t > frame.t) ? *next_t - frame.t : 1.0 / config_.propagate_rate_hz;

  const bool gps_fresh = frame.gps_speed.has_value() && frame.gps_age < config_.gps_fresh_s;
  if (!gps_fresh) return action;

  // The rates in the centripetal term go through the same filter as the accelerometer so
  // both sides of the subtraction share one bandwidth and gyro noise is not injected raw.
  const Vec3 omega = correct_rates(rate_lowpass_.output, bias);
  const Vec3 accel = subtract_centrifugal(lowpass_.output, omega, *frame.gps_speed);
  // The criteria judge the load factor the airframe is pulling, so they see the filtered
  // specific force before compensation; a coordinated turn would otherwise always read 1 g.
  // The compensated vector is what TRIAD observes.
  const PairSelection selection = select_pairs(lowpass_.output, frame.mag, mag_ref_, config_.gravity);
  action.selection = selection;

  if (is_skip(selection)) {
    action.kind = ActionKind::PropagateSkipCorrection;
    action.reason = selection == PairSelection::SkipMagUnreliable ? SkipReason::MagUnreliable
                                                                  : SkipReason::Acrobatic;
    return action;
  }
  const auto pairs = build_pairs(selection, accel, frame.mag, mag_ref_);
  const std::optional<Dcm> dcm = pairs ? triad_dcm(pairs->first, pairs->second) : std::nullopt;
  if (!dcm) {
    action.kind = ActionKind::PropagateSkipCorrection;
    action.reason = SkipReason::DegeneratePair;
    return action;
  }
  action.kind = ActionKind::PropagateAndCorrect;
  action.observation = observe(*dcm);
  return action;
}

std::optional<Dcm> StepScheduler::alignment_fix(const SensorFrame& frame) const {
  const Vec3 accel = subtract_centrifugal(frame.accel, frame.gyro, frame.gps_speed.value_or(0.0));
  PairSelection selection = select_pairs(frame.accel, frame.mag, mag_ref_, config_.gravity);
  if (is_skip(selection)) selection = PairSelection::AccelPrimary;
  const auto pairs = build_pairs(selection, accel, frame.mag, mag_ref_);
  if (!pairs) return std::nullopt;
  return triad_dcm(pairs->first, pairs->second);
}

AttitudeEstimator::AttitudeEstimator(EstimatorConfig config)
    : config_{std::move(config)}, scheduler_{config_.scheduler} {
  make_weights<kStateDim>(config_.ukf);  // throws InvalidParams early
}

FilterState AttitudeEstimator::reset_covariance(FilterState s) const {
  const FilterState fresh = initial_state(s.attitude(), config_.p0_quat, config_.p0_bias);
  s.P = fresh.P;
  return s;
}

FilterState AttitudeEstimator::propagate(const FilterState& s, const Vec3& gyro, double dt) {
  try {
    if (config_.kind == EstimatorKind::Ukf) {
      return ukf::propagate(s, gyro, dt, config_.ukf, config_.noise.process);
    }
    return ekf::propagate(s, gyro, dt, config_.noise.process);
  } catch (const CholeskyFailure& e) {
    if (++covariance_failures_ >= 2) throw EstimatorDiverged(e.what());
    return propagate(reset_covariance(s), gyro, dt);
  }
}

CorrectionResult AttitudeEstimator::correct(const FilterState& s, const ObservationVector& y) {
  try {
    if (config_.kind == EstimatorKind::Ukf) return ukf::correct(s, y, config_.ukf, config_.noise.measurement);
    return ekf::correct(s, y, config_.noise.measurement);
  } catch (const CholeskyFailure& e) {
    if (++covariance_failures_ >= 2) throw EstimatorDiverged(e.what());
    return correct(reset_covariance(s), y);
  }
}

std::optional<StepOutput> AttitudeEstimator::step(const SensorFrame& frame, std::optional<double> next_t) {
  const bool first = !state_.has_value();
  if (first) {
    const std::optional<Dcm> fix = scheduler_.alignment_fix(frame);
    const Quaternion q0 = fix ? dcm_to_quaternion(*fix) : Quaternion::identity();
    state_ = initial_state(q0, config_.p0_quat, config_.p0_bias);
  }

  std::optional<ScheduledAction> action = scheduler_.schedule(frame, state_->gyro_bias(), next_t);
  if (!action) return std::nullopt;

  StepOutput out;
  out.t = frame.t;
  if (first && action->kind != ActionKind::Propagate) {
    // The alignment fix already used this frame's vectors.
    action->kind = ActionKind::Propagate;
    action->reason = SkipReason::None;
    action->observation.reset();
  }
  if (action->kind == ActionKind::PropagateAndCorrect) {
    const CorrectionResult result = correct(*state_, *action->observation);
    if (result.status == CorrectionStatus::SingularInnovation) {
      action->kind = ActionKind::PropagateSkipCorrection;
      action->reason = SkipReason::SingularInnovation;
    } else {
      out.correction_applied = true;
    }
    state_ = result.state;
  }
  out.state = *state_;
  out.action = *action;

  state_ = propagate(*state_, frame.gyro, action->dt);
  return out;
}

}  // namespace ahrs
