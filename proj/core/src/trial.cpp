#include "ahrs/trial.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

namespace ahrs::sim {

namespace {

constexpr std::array<std::pair<SweepChannel, std::string_view>, 6> kChannelNames{{
    {SweepChannel::GyroP, "gyro_p"},
    {SweepChannel::GyroQ, "gyro_q"},
    {SweepChannel::GyroR, "gyro_r"},
    {SweepChannel::Accel, "accel"},
    {SweepChannel::Mag, "mag"},
    {SweepChannel::GpsSpeed, "gps_speed"},
}};

double random_sign(std::mt19937_64& rng) { return (rng() & 1U) ? 1.0 : -1.0; }

Vec3 signed_vector(double magnitude, std::mt19937_64& rng) {
  return {magnitude * random_sign(rng), magnitude * random_sign(rng), magnitude * random_sign(rng)};
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers.
template <typename Fn>
void parallel_for(int n, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(n));
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

bool ErrorReport::passes(const PassCriterion& c) const {
  return !diverged && max_error_deg[0] <= c.max_roll_deg && max_error_deg[1] <= c.max_pitch_deg &&
         max_error_deg[2] <= c.max_yaw_deg;
}

std::array<double, 3> euler_errors(const EulerAngles& estimate, const EulerAngles& truth) {
  return {wrap_angle(estimate.roll - truth.roll), estimate.pitch - truth.pitch,
          wrap_angle(estimate.yaw - truth.yaw)};
}

ErrorReport run_trial(const std::vector<TruthSample>& truth, const CorruptionConfig& corruption,
                      const EstimatorConfig& estimator, const TrialOptions& options, double dt) {
  ErrorReport report;
  const std::vector<SensorFrame> frames = corrupt(truth, corruption, dt);
  AttitudeEstimator filter(estimator);
  std::array<double, 3> sum_sq{};

  for (std::size_t k = 0; k < frames.size(); ++k) {
    const std::optional<double> next_t =
        k + 1 < frames.size() ? std::optional<double>{frames[k + 1].t} : std::nullopt;
    std::optional<StepOutput> out;
    try {
      out = filter.step(frames[k], next_t);
    } catch (const std::exception& e) {
      report.diverged = true;
      report.failure = e.what();
      break;
    }
    if (!out) continue;

    const ScheduledAction& a = out->action;
    if (a.selection) ++report.selections[static_cast<std::size_t>(*a.selection)];
    if (out->correction_applied) ++report.corrections;
    switch (a.reason) {
      case SkipReason::MagUnreliable: ++report.skipped_mag_unreliable; break;
      case SkipReason::Acrobatic: ++report.skipped_acrobatic; break;
      case SkipReason::DegeneratePair:
      case SkipReason::SingularInnovation: ++report.skipped_other; break;
      case SkipReason::None: break;
    }

    const auto err = euler_errors(quaternion_to_euler(out->state.attitude()), truth[k].euler);
    std::array<double, 3> err_deg{};
    for (int i = 0; i < 3; ++i) err_deg[i] = std::abs(err[i]) * kRadToDeg;
    if (*std::max_element(err_deg.begin(), err_deg.end()) > options.divergence_deg ||
        !std::isfinite(err_deg[0] + err_deg[1] + err_deg[2])) {
      report.diverged = true;
      report.failure = "attitude error exceeded divergence threshold";
      break;
    }
    if (frames[k].t < options.settle_time_s) continue;

    ++report.scored_samples;
    for (int i = 0; i < 3; ++i) {
      report.max_error_deg[i] = std::max(report.max_error_deg[i], err_deg[i]);
      sum_sq[i] += err_deg[i] * err_deg[i];
    }
    if (options.stop_on_violation && !report.passes(*options.stop_on_violation)) {
      report.stopped_early = true;
      break;
    }
  }
  if (report.scored_samples > 0) {
    for (int i = 0; i < 3; ++i) {
      report.rms_error_deg[i] = std::sqrt(sum_sq[i] / static_cast<double>(report.scored_samples));
    }
  }
  return report;
}

std::string to_string(SweepParameter p) {
  std::string name;
  for (const auto& [channel, label] : kChannelNames) {
    if (channel == p.channel) name = label;
  }
  return name + (p.kind == SweepKind::Bias ? "_bias" : "_noise");
}

std::optional<SweepParameter> parse_sweep_parameter(std::string_view name) {
  for (const auto& [channel, label] : kChannelNames) {
    for (const SweepKind kind : {SweepKind::Bias, SweepKind::Noise}) {
      const SweepParameter p{channel, kind};
      if (to_string(p) == name) return p;
    }
  }
  return std::nullopt;
}

std::string_view sweep_unit(SweepChannel channel) {
  switch (channel) {
    case SweepChannel::GyroP:
    case SweepChannel::GyroQ:
    case SweepChannel::GyroR: return "deg/s";
    case SweepChannel::Accel: return "m/s^2";
    case SweepChannel::Mag: return "mG";
    case SweepChannel::GpsSpeed: return "m/s";
  }
  return "";
}

double default_sweep_upper(SweepParameter p) {
  switch (p.channel) {
    case SweepChannel::GyroP:
    case SweepChannel::GyroQ:
    case SweepChannel::GyroR: return 20.0;
    case SweepChannel::Accel: return 2.0;
    case SweepChannel::Mag: return 100.0;
    case SweepChannel::GpsSpeed: return 10.0;
  }
  return 1.0;
}

CorruptionConfig apply_sweep_magnitude(CorruptionConfig cfg, SweepParameter p, double magnitude,
                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const bool bias = p.kind == SweepKind::Bias;
  auto gyro_axis = [&](int axis) {
    const double value = bias ? magnitude * random_sign(rng) : magnitude;
    (bias ? cfg.gyro_bias_dps : cfg.gyro_noise_dps)[axis] = value;
  };
  switch (p.channel) {
    case SweepChannel::GyroP: gyro_axis(0); break;
    case SweepChannel::GyroQ: gyro_axis(1); break;
    case SweepChannel::GyroR: gyro_axis(2); break;
    case SweepChannel::Accel:
      if (bias) cfg.accel_bias_mps2 = signed_vector(magnitude, rng);
      else cfg.accel_noise_mps2 = Vec3::Constant(magnitude);
      break;
    case SweepChannel::Mag:
      if (bias) cfg.mag_bias_mgauss = signed_vector(magnitude, rng);
      else cfg.mag_noise_mgauss = Vec3::Constant(magnitude);
      break;
    case SweepChannel::GpsSpeed:
      if (bias) cfg.gps_speed_bias_mps = magnitude * random_sign(rng);
      else cfg.gps_speed_noise_mps = magnitude;
      break;
  }
  cfg.seed = seed;
  return cfg;
}

void ToleranceSweepSpec::validate() const {
  if (trials < 1) throw std::invalid_argument("sweep needs at least one trial per point");
  if (!(upper > lower) || lower < 0.0) throw std::invalid_argument("sweep bounds must satisfy 0 <= lower < upper");
  if (!(pass_fraction > 0.0 && pass_fraction <= 1.0)) throw std::invalid_argument("pass fraction must be in (0, 1]");
  if (verify_points < 0) throw std::invalid_argument("verify_points must be non-negative");
}

std::uint64_t trial_seed(std::uint64_t sweep_seed, int trial) {
  // splitmix64 finalizer over (seed, trial).
  std::uint64_t z = sweep_seed * 0x100000001b3ULL + static_cast<std::uint64_t>(trial) + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

SweepResult tolerance_sweep(const ToleranceSweepSpec& spec, const SweepContext& context) {
  spec.validate();
  if (!context.truth || context.truth->empty()) throw std::invalid_argument("sweep needs a truth trajectory");

  CorruptionConfig zeroed = CorruptionConfig::clean();
  zeroed.gps_delay_s = context.base.gps_delay_s;
  zeroed.gps_rate_hz = context.base.gps_rate_hz;
  zeroed.accel_noise_corner_hz = context.base.accel_noise_corner_hz;

  TrialOptions options = context.options;
  options.stop_on_violation = spec.criterion;

  SweepResult result;
  result.parameter = spec.parameter;
  result.estimator = context.estimator.kind;
  result.trials = spec.trials;

  auto evaluate = [&](double magnitude) {
    std::vector<char> passed(static_cast<std::size_t>(spec.trials), 0);
    parallel_for(spec.trials, context.threads, [&](int i) {
      const CorruptionConfig cfg =
          apply_sweep_magnitude(zeroed, spec.parameter, magnitude, trial_seed(spec.seed, i));
      const ErrorReport r = run_trial(*context.truth, cfg, context.estimator, options, context.dt);
      passed[static_cast<std::size_t>(i)] = r.passes(spec.criterion) ? 1 : 0;
    });
    SweepPoint point{magnitude, 0, spec.trials};
    for (char p : passed) point.passed += p;
    result.evaluated.push_back(point);
    return point;
  };
  auto ok = [&](const SweepPoint& p) { return p.pass_fraction() >= spec.pass_fraction - 1e-12; };

  const double resolution = spec.resolution > 0.0 ? spec.resolution : (spec.upper - spec.lower) / 64.0;
  const SweepPoint at_lower = evaluate(spec.lower);
  const SweepPoint at_upper = evaluate(spec.upper);

  if (ok(at_upper)) {
    result.tolerance = spec.upper;
    result.pass_fraction_at_tolerance = at_upper.pass_fraction();
    result.non_monotone = !ok(at_lower);
  } else if (!ok(at_lower)) {
    result.tolerance = spec.lower;
    result.pass_fraction_at_tolerance = at_lower.pass_fraction();
  } else {
    SweepPoint good = at_lower;
    double bad = spec.upper;
    while (bad - good.magnitude > resolution) {
      const SweepPoint mid = evaluate(0.5 * (good.magnitude + bad));
      if (ok(mid)) good = mid;
      else bad = mid.magnitude;
    }
    result.tolerance = good.magnitude;
    result.pass_fraction_at_tolerance = good.pass_fraction();
  }

  for (int i = 1; i <= spec.verify_points; ++i) {
    evaluate(spec.lower + (spec.upper - spec.lower) * i / (spec.verify_points + 1));
  }
  // Monotone means every passing magnitude lies below every failing one.
  double lowest_fail = std::numeric_limits<double>::infinity();
  double highest_pass = -std::numeric_limits<double>::infinity();
  for (const SweepPoint& p : result.evaluated) {
    if (ok(p)) highest_pass = std::max(highest_pass, p.magnitude);
    else lowest_fail = std::min(lowest_fail, p.magnitude);
  }
  if (highest_pass > lowest_fail) result.non_monotone = true;
  return result;
}

}  // namespace ahrs::sim
