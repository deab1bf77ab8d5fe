#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ahrs/corruption.hpp"
#include "ahrs/pipeline.hpp"
#include "ahrs/trajectory.hpp"

namespace ahrs::sim {

/// Accuracy requirement on the estimated Euler angles, degrees.
struct PassCriterion {
  double max_roll_deg = 1.0;
  double max_pitch_deg = 1.0;
  double max_yaw_deg = 4.0;
};

struct TrialOptions {
  /// Errors before this time (alignment and bias convergence) are not scored.
  double settle_time_s = 120.0;
  /// Any error above this, at any time, marks the run diverged.
  double divergence_deg = 45.0;
  /// When set, the replay stops at the first scored sample that violates the criterion.
  std::optional<PassCriterion> stop_on_violation;
};

struct ErrorReport {
  std::array<double, 3> max_error_deg{};  // roll, pitch, yaw
  std::array<double, 3> rms_error_deg{};
  std::size_t scored_samples = 0;
  std::size_t corrections = 0;
  std::array<std::size_t, 4> selections{};  // indexed by PairSelection
  std::size_t skipped_mag_unreliable = 0;
  std::size_t skipped_acrobatic = 0;
  std::size_t skipped_other = 0;  // degenerate pair or singular innovation
  bool diverged = false;
  bool stopped_early = false;
  std::string failure;

  bool passes(const PassCriterion& c) const;
};

/// Estimate-minus-truth Euler errors in radians, yaw taken as the shortest angular distance.
std::array<double, 3> euler_errors(const EulerAngles& estimate, const EulerAngles& truth);

/// Replays the corrupted truth stream through the configured estimator and scores it.
/// Estimator failures are recorded in the report, never thrown.
ErrorReport run_trial(const std::vector<TruthSample>& truth, const CorruptionConfig& corruption,
                      const EstimatorConfig& estimator, const TrialOptions& options, double dt);

enum class SweepChannel { GyroP, GyroQ, GyroR, Accel, Mag, GpsSpeed };
enum class SweepKind { Bias, Noise };

struct SweepParameter {
  SweepChannel channel = SweepChannel::GyroR;
  SweepKind kind = SweepKind::Bias;
};

/// Names such as "gyro_r_bias", "accel_noise", "gps_speed_bias".
std::string to_string(SweepParameter p);
std::optional<SweepParameter> parse_sweep_parameter(std::string_view name);
/// Unit of the swept magnitude: "deg/s", "m/s^2", "mG" or "m/s".
std::string_view sweep_unit(SweepChannel channel);
/// Default search interval upper bound for a parameter.
double default_sweep_upper(SweepParameter p);

/// Applies magnitude m of parameter p on top of `cfg`. Bias components get a random sign.
CorruptionConfig apply_sweep_magnitude(CorruptionConfig cfg, SweepParameter p, double magnitude,
                                       std::uint64_t trial_seed);

struct ToleranceSweepSpec {
  SweepParameter parameter;
  double lower = 0.0;
  double upper = 1.0;
  double resolution = 0.0;  // <= 0 selects (upper - lower) / 64
  int trials = 10;
  double pass_fraction = 0.9;
  PassCriterion criterion;
  std::uint64_t seed = 1;
  int verify_points = 0;  // extra evenly spaced magnitudes checked for monotonicity

  void validate() const;
};

struct SweepPoint {
  double magnitude = 0.0;
  int passed = 0;
  int trials = 0;
  double pass_fraction() const { return trials ? static_cast<double>(passed) / trials : 0.0; }
};

struct SweepResult {
  SweepParameter parameter;
  EstimatorKind estimator = EstimatorKind::Ukf;
  double tolerance = 0.0;
  int trials = 0;
  double pass_fraction_at_tolerance = 0.0;
  bool non_monotone = false;
  std::vector<SweepPoint> evaluated;  // in evaluation order
};

/// Shared inputs of every trial in a sweep. `base` supplies the non-swept settings
/// (GPS delay and rate, accel noise corner); its biases and sigmas are zeroed.
struct SweepContext {
  const std::vector<TruthSample>* truth = nullptr;
  double dt = 0.01;
  CorruptionConfig base;
  EstimatorConfig estimator;
  TrialOptions options;
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// Bisection for the largest magnitude at which at least pass_fraction of the trials meet
/// the criterion, other error sources at zero. Deterministic for a given spec.seed.
SweepResult tolerance_sweep(const ToleranceSweepSpec& spec, const SweepContext& context);

/// Per-trial seed derived from the sweep seed and trial index.
std::uint64_t trial_seed(std::uint64_t sweep_seed, int trial);

}  // namespace ahrs::sim
