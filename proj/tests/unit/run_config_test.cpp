#include <gtest/gtest.h>

#include <sstream>

#include "ahrs/run_config.hpp"

namespace ahrs {
namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_run_config(in, "test.ini");
}

std::vector<sim::Maneuver> script(const std::string& text) {
  std::istringstream in(text);
  return parse_maneuver_script(in, "test.script");
}

std::string error_of(auto&& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(RunConfig, EmptyFileGivesDefaults) {
  const RunConfig cfg = parse("");
  EXPECT_EQ(cfg.estimator.kind, EstimatorKind::Ukf);
  EXPECT_DOUBLE_EQ(cfg.estimator.ukf.alpha, 1e-3);
  EXPECT_DOUBLE_EQ(cfg.estimator.ukf.beta, 2.0);
  EXPECT_DOUBLE_EQ(cfg.estimator.noise.process(0, 0), 1e-6);
  EXPECT_DOUBLE_EQ(cfg.estimator.noise.process(6, 6), 0.0);
  EXPECT_DOUBLE_EQ(cfg.estimator.noise.measurement(0, 0), 2.5e-3);
  EXPECT_DOUBLE_EQ(cfg.estimator.scheduler.accel_cutoff_hz, 10.0);
  EXPECT_DOUBLE_EQ(cfg.dt(), 0.01);
  EXPECT_EQ(cfg.corruption.gyro_bias_dps, Vec3::Constant(3.0));
  EXPECT_DOUBLE_EQ(cfg.corruption.gps_delay_s, 1.0);
  EXPECT_DOUBLE_EQ(cfg.criterion.max_yaw_deg, 4.0);
}

TEST(RunConfig, ReadsEverySection) {
  const RunConfig cfg = parse(R"([estimator]
type = ekf
alpha = 0.5
measurement_noise = 0.01
p0_bias_dps = 2
[environment]
mag_ref_gauss = 0.2, 0.01, 0.4
gravity_mps2 = 9.81
[preprocess]
accel_cutoff_hz = 5
[schedule]
propagate_rate_hz = 50
gps_fresh_s = 0.5
[sensors]
gyro_bias_dps = 1, 2, 3
gyro_noise_dps = 0.5
gps_delay_s = 0
[evaluation]
settle_time_s = 60
max_yaw_deg = 5
[run]
seed = 99
)");
  EXPECT_EQ(cfg.estimator.kind, EstimatorKind::Ekf);
  EXPECT_DOUBLE_EQ(cfg.estimator.ukf.alpha, 0.5);
  EXPECT_DOUBLE_EQ(cfg.estimator.noise.measurement(3, 3), 0.01);
  EXPECT_NEAR(cfg.estimator.p0_bias, std::pow(2.0 * kDegToRad, 2), 1e-18);
  EXPECT_EQ(cfg.estimator.scheduler.mag_ref_ned, Vec3(0.2, 0.01, 0.4));
  EXPECT_DOUBLE_EQ(cfg.estimator.scheduler.gravity, 9.81);
  EXPECT_DOUBLE_EQ(cfg.estimator.scheduler.accel_cutoff_hz, 5.0);
  EXPECT_DOUBLE_EQ(cfg.dt(), 0.02);
  EXPECT_DOUBLE_EQ(cfg.estimator.scheduler.gps_fresh_s, 0.5);
  EXPECT_EQ(cfg.corruption.gyro_bias_dps, Vec3(1, 2, 3));
  EXPECT_EQ(cfg.corruption.gyro_noise_dps, Vec3::Constant(0.5));
  EXPECT_DOUBLE_EQ(cfg.corruption.gps_delay_s, 0.0);
  EXPECT_DOUBLE_EQ(cfg.evaluation.settle_time_s, 60.0);
  EXPECT_DOUBLE_EQ(cfg.criterion.max_yaw_deg, 5.0);
  EXPECT_EQ(cfg.seed, 99u);
  EXPECT_EQ(cfg.corruption.seed, 99u);
  EXPECT_DOUBLE_EQ(cfg.environment().gravity, 9.81);
}

TEST(RunConfig, UnknownKeyIsAnError) {
  const std::string msg = error_of([] { parse("[sensors]\ngyro_bias = 3\n"); });
  EXPECT_NE(msg.find("unknown key 'gyro_bias'"), std::string::npos) << msg;
  EXPECT_NE(msg.find("[sensors]"), std::string::npos) << msg;
}

TEST(RunConfig, UnknownSectionIsAnError) {
  EXPECT_THROW(parse("[filter]\nalpha = 1\n"), ConfigError);
}

TEST(RunConfig, InvalidValuesAreErrors) {
  EXPECT_THROW(parse("[estimator]\ntype = particle\n"), ConfigError);
  EXPECT_THROW(parse("[estimator]\nalpha = 0\n"), ConfigError);
  EXPECT_THROW(parse("[estimator]\nalpha = abc\n"), ConfigError);
  EXPECT_THROW(parse("[estimator]\nmeasurement_noise = 0\n"), ConfigError);
  EXPECT_THROW(parse("[preprocess]\naccel_cutoff_hz = 80\n"), ConfigError);
  EXPECT_THROW(parse("[sensors]\ngyro_noise_dps = -1\n"), ConfigError);
  EXPECT_THROW(parse("[sensors]\ngyro_bias_dps = 1, 2\n"), ConfigError);
  EXPECT_THROW(parse("[run]\nseed = -4\n"), ConfigError);
  EXPECT_THROW(parse("[environment]\nmag_ref_gauss = 0\n"), ConfigError);
}

TEST(RunConfig, SyntaxErrorNamesLine) {
  const std::string msg = error_of([] { parse("[estimator]\nalpha = 1\n[broken\n"); });
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
}

TEST(ManeuverScript, ParsesEveryKind) {
  const auto s = script(R"(# reference flight
steady duration_s=10 speed_mps=25
turn duration_s=30 bank_deg=-30 roll_time_s=4
turn duration_s=20 bank_deg=0 yaw_rate_dps=5
doublet duration_s=6 amplitude_dps=17.2 mag_disturbance_gauss=0.1,0,0 mag_disturbance_start_s=1 mag_disturbance_end_s=2
gust duration_s=20 rms_deg=2 seed=7   # trailing comment
)");
  ASSERT_EQ(s.size(), 5u);
  EXPECT_DOUBLE_EQ(std::get<sim::SteadyFlight>(s[0].kind).speed, 25.0);
  const auto& turn = std::get<sim::CoordinatedTurn>(s[1].kind);
  EXPECT_NEAR(turn.bank, -30.0 * kDegToRad, 1e-15);
  EXPECT_DOUBLE_EQ(turn.roll_time, 4.0);
  EXPECT_FALSE(turn.yaw_rate.has_value());
  EXPECT_NEAR(*std::get<sim::CoordinatedTurn>(s[2].kind).yaw_rate, 5.0 * kDegToRad, 1e-15);
  EXPECT_NEAR(std::get<sim::PitchDoublet>(s[3].kind).amplitude, 17.2 * kDegToRad, 1e-15);
  EXPECT_EQ(s[3].mag_disturbance, Vec3(0.1, 0, 0));
  EXPECT_DOUBLE_EQ(s[3].mag_disturbance_start, 1.0);
  EXPECT_DOUBLE_EQ(*s[3].mag_disturbance_end, 2.0);
  EXPECT_EQ(std::get<sim::Gust>(s[4].kind).seed, 7u);
}

TEST(ManeuverScript, CanonicalExpands) {
  EXPECT_EQ(script("canonical\n").size(), sim::canonical_script().size());
}

TEST(ManeuverScript, EmptyScriptIsAnError) {
  const std::string msg = error_of([] { script("# nothing here\n\n"); });
  EXPECT_NE(msg.find("empty"), std::string::npos) << msg;
}

TEST(ManeuverScript, ErrorsNameTheLine) {
  for (const std::string bad : {"loop duration_s=3\n", "steady speed_mps=20\n", "steady duration_s=x\n",
                                "steady duration_s=1 colour=red\n", "steady duration_s\n"}) {
    const std::string msg = error_of([&] { script("steady duration_s=1\n" + bad); });
    EXPECT_NE(msg.find("line 2"), std::string::npos) << bad << " -> " << msg;
  }
}

TEST(SweepPlan, ReadsParametersBoundsAndCriterion) {
  std::istringstream in(R"([sweep]
parameters = gyro_r_bias, mag_noise
estimators = ukf, ekf
trials = 5
pass_fraction = 0.8
seed = 3
[criterion]
max_yaw_deg = 6
[bounds.gyro_r_bias]
upper = 12
resolution = 0.25
)");
  const SweepPlan plan = parse_sweep_plan(in, "plan.ini");
  ASSERT_EQ(plan.sweeps.size(), 2u);
  EXPECT_EQ(plan.estimators.size(), 2u);
  EXPECT_EQ(plan.script, "canonical");
  EXPECT_DOUBLE_EQ(plan.sweeps[0].upper, 12.0);
  EXPECT_DOUBLE_EQ(plan.sweeps[0].resolution, 0.25);
  EXPECT_EQ(plan.sweeps[0].trials, 5);
  EXPECT_DOUBLE_EQ(plan.sweeps[0].pass_fraction, 0.8);
  EXPECT_EQ(plan.sweeps[0].seed, 3u);
  EXPECT_DOUBLE_EQ(plan.sweeps[0].criterion.max_yaw_deg, 6.0);
  EXPECT_DOUBLE_EQ(plan.sweeps[1].upper, sim::default_sweep_upper(plan.sweeps[1].parameter));
}

TEST(SweepPlan, RejectsBadSpecs) {
  auto plan = [](const std::string& text) {
    std::istringstream in(text);
    return parse_sweep_plan(in, "plan.ini");
  };
  EXPECT_THROW(plan(""), ConfigError);
  EXPECT_THROW(plan("[sweep]\nparameters = gyro_bias\n"), ConfigError);
  EXPECT_THROW(plan("[sweep]\nparameters = gyro_r_bias\ntrials = 0\n"), ConfigError);
  EXPECT_THROW(plan("[sweep]\nparameters = gyro_r_bias\nestimators = kf\n"), ConfigError);
  EXPECT_THROW(plan("[sweep]\nparameters = gyro_r_bias\n[bounds.gyro_r_bias]\nupper = -1\n"), ConfigError);
  EXPECT_THROW(plan("[sweep]\nparameters = gyro_r_bias\n[bounds.mag_bias]\nupper = 5\n"), ConfigError);
}

}  // namespace
}  // namespace ahrs
