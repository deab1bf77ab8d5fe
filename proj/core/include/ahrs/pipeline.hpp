#pragma once

#include <optional>
#include <string_view>

#include "ahrs/triad.hpp"
#include "ahrs/ukf.hpp"

namespace ahrs {

/// One timestamped sensor record. `gps_speed` is set only on the frame where a GPS sample
/// is delivered; `gps_age` is the time since the latest delivery (0 on delivery frames).
struct SensorFrame {
  double t = 0.0;
  Vec3 gyro = Vec3::Zero();   // rad/s
  Vec3 accel = Vec3::Zero();  // m/s^2, specific force
  Vec3 mag = Vec3::Zero();    // gauss
  std::optional<double> gps_speed;  // m/s
  double gps_age = 0.0;
};

enum class EstimatorKind { Ukf, Ekf };

std::string_view to_string(EstimatorKind kind);
std::optional<EstimatorKind> parse_estimator(std::string_view name);

enum class ActionKind { Propagate, PropagateAndCorrect, PropagateSkipCorrection };

enum class SkipReason { None, MagUnreliable, Acrobatic, DegeneratePair, SingularInnovation };

/// Stable strings used in output logs: "", "mag_unreliable", "acrobatic",
/// "degenerate_pair", "singular_innovation".
std::string_view to_string(SkipReason reason);

struct ScheduledAction {
  ActionKind kind = ActionKind::Propagate;
  SkipReason reason = SkipReason::None;
  std::optional<PairSelection> selection;
  std::optional<ObservationVector> observation;
  double dt = 0.0;  // propagation interval following this frame
};

struct SchedulerConfig {
  Vec3 mag_ref_ned{0.26, 0.0, 0.36};   // gauss
  double gravity = 9.80665;            // m/s^2
  double accel_cutoff_hz = 10.0;
  double propagate_rate_hz = 100.0;
  double gps_fresh_s = 1.0;            // a correction needs a GPS sample younger than this
};

/// Turns the frame stream into propagate / correct actions: low-passes the accelerometer
/// (and the rates used for centripetal compensation) every frame, and on frames carrying a fresh GPS sample removes the centripetal term,
/// evaluates the pair criteria and runs TRIAD.
class StepScheduler {
 public:
  explicit StepScheduler(SchedulerConfig config);

  /// Returns nullopt (frame rejected) when frame.t is not strictly after the previous
  /// accepted frame. `next_t`, when known, sets the propagation interval; otherwise the
  /// nominal period is used. `bias` is the current gyro-bias estimate.
  std::optional<ScheduledAction> schedule(const SensorFrame& frame, const Vec3& bias,
                                          std::optional<double> next_t = std::nullopt);

  /// TRIAD attitude fix from a single frame, used for static alignment. Falls back to
  /// accel-primary pairing when the criteria would skip; nullopt if the pair is degenerate.
  std::optional<Dcm> alignment_fix(const SensorFrame& frame) const;

  const SchedulerConfig& config() const { return config_; }
  const Vec3& filtered_accel() const { return lowpass_.output; }

 private:
  SchedulerConfig config_;
  MagneticReference mag_ref_;
  LowPassState lowpass_;
  LowPassState rate_lowpass_;
  std::optional<double> last_t_;
};

struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::Ukf;
  UkfParams ukf;
  NoiseCovariances noise = NoiseCovariances::defaults();
  double p0_quat = 1e-2;
  double p0_bias = (5.0 * kDegToRad) * (5.0 * kDegToRad);
  SchedulerConfig scheduler;
};

struct StepOutput {
  double t = 0.0;
  FilterState state;  // estimate at t, after any correction and before propagation
  ScheduledAction action;
  bool correction_applied = false;
};

/// Raised when the covariance cannot be repaired twice in one run.
class EstimatorDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Full attitude pipeline for one flight: alignment on the first frame, then scheduled
/// propagation and TRIAD corrections with the configured estimator.
class AttitudeEstimator {
 public:
  explicit AttitudeEstimator(EstimatorConfig config);

  /// Processes one frame. Returns nullopt for rejected (non-monotonic) frames.
  /// Throws EstimatorDiverged after the second unrecoverable covariance failure.
  std::optional<StepOutput> step(const SensorFrame& frame, std::optional<double> next_t = std::nullopt);

  bool initialized() const { return state_.has_value(); }
  const FilterState& state() const { return *state_; }
  int covariance_failures() const { return covariance_failures_; }

 private:
  FilterState propagate(const FilterState& s, const Vec3& gyro, double dt);
  CorrectionResult correct(const FilterState& s, const ObservationVector& y);
  FilterState reset_covariance(FilterState s) const;

  EstimatorConfig config_;
  StepScheduler scheduler_;
  std::optional<FilterState> state_;
  int covariance_failures_ = 0;
};

}  // namespace ahrs
