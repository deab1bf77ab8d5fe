#pragma once

// Text configuration files for the harness.
//
// Run config: INI sections with unit-suffixed keys. Every key is optional and defaults to
// the values documented in README.md; an unknown section or key is an error.
//
// Maneuver script: one maneuver per line, `kind key=value ...`, '#' starts a comment.
//   steady  duration_s=150 speed_mps=20
//   turn    duration_s=30 bank_deg=-30 [yaw_rate_dps=..] [roll_time_s=3]
//   doublet duration_s=6 amplitude_dps=17.2
//   gust    duration_s=20 rms_deg=2 [seed=11]
//   canonical                      (expands to the built-in reference flight)
// Any maneuver line may add mag_disturbance_gauss=x,y,z, optionally limited to a window
// with mag_disturbance_start_s= and mag_disturbance_end_s= (seconds into the maneuver).
//
// Sweep spec: INI with [sweep] (parameters, estimators, trials, pass_fraction, seed,
// verify_points, script), [criterion] (max_roll_deg, max_pitch_deg, max_yaw_deg) and
// optional [bounds.<parameter>] sections (lower, upper, resolution).

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "ahrs/corruption.hpp"
#include "ahrs/pipeline.hpp"
#include "ahrs/trajectory.hpp"
#include "ahrs/trial.hpp"

namespace ahrs {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  EstimatorConfig estimator;
  sim::CorruptionConfig corruption = sim::CorruptionConfig::typical_mems();
  sim::TrialOptions evaluation;
  sim::PassCriterion criterion;
  std::uint64_t seed = 1;

  double dt() const { return 1.0 / estimator.scheduler.propagate_rate_hz; }
  sim::TrajectoryEnvironment environment() const;
};

/// Parses and validates a run config. Throws ConfigError naming the offending key.
RunConfig parse_run_config(std::istream& in, const std::string& source_name);
RunConfig load_run_config(const std::string& path);

/// Throws ConfigError naming the line of an invalid maneuver.
std::vector<sim::Maneuver> parse_maneuver_script(std::istream& in, const std::string& source_name);
std::vector<sim::Maneuver> load_maneuver_script(const std::string& path);

struct SweepPlan {
  std::vector<sim::ToleranceSweepSpec> sweeps;
  std::vector<EstimatorKind> estimators;
  std::string script;  // "canonical" or a script path
};

SweepPlan parse_sweep_plan(std::istream& in, const std::string& source_name);
SweepPlan load_sweep_plan(const std::string& path);

}  // namespace ahrs
