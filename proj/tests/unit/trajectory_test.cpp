#include <gtest/gtest.h>

#include <cmath>

#include "ahrs/trajectory.hpp"
#include "ahrs/triad.hpp"

namespace ahrs::sim {
namespace {

constexpr double kDt = 0.01;

Maneuver make(decltype(Maneuver::kind) kind) {
  Maneuver m;
  m.kind = kind;
  return m;
}

TEST(GenerateTrajectory, LevelSteadyFlight) {
  const TrajectoryEnvironment env;
  const auto truth = generate_trajectory({make(SteadyFlight{10.0, 20.0})}, kDt, env);
  ASSERT_EQ(truth.size(), 1000u);
  for (const TruthSample& s : truth) {
    EXPECT_LT((s.attitude.vector() - Vec4(1, 0, 0, 0)).norm(), 1e-15);
    EXPECT_LT((s.accel_body - Vec3(0, 0, -env.gravity)).norm(), 1e-12);
    EXPECT_LT((s.mag_body - env.mag_ref_ned).norm(), 1e-15);
    EXPECT_DOUBLE_EQ(s.speed, 20.0);
  }
  EXPECT_DOUBLE_EQ(truth.back().t, 9.99);
}

TEST(GenerateTrajectory, FlatTurnAtTenthRadianPerSecondSweepsFullCircle) {
  CoordinatedTurn turn{62.8, 0.0, 0.1, 0.0};
  const auto truth = generate_trajectory({make(turn)}, kDt);
  double swept = 0.0;
  for (std::size_t k = 1; k < truth.size(); ++k) swept += wrap_angle(truth[k].euler.yaw - truth[k - 1].euler.yaw);
  // Plus the final held interval after the last sample.
  swept += 0.1 * kDt;
  EXPECT_NEAR(swept, 6.28, 1e-9);
  // 62.8 s is 2 pi / 0.1 rounded to 0.1 s, short of a full circle by 0.18 deg.
  EXPECT_NEAR(swept * kRadToDeg, 360.0, 0.2);
}

TEST(GenerateTrajectory, CoordinatedTurnLoadFactor) {
  const TrajectoryEnvironment env;
  const double bank = 30.0 * kDegToRad;
  const auto truth = generate_trajectory({make(CoordinatedTurn{30.0, bank, std::nullopt, 5.0})}, kDt, env);
  const TruthSample& held = truth[1500];
  EXPECT_NEAR(held.euler.roll, bank, 1e-4);
  EXPECT_NEAR(held.accel_body.norm() / env.gravity, 1.0 / std::cos(bank), 1e-4);
  EXPECT_NEAR(held.accel_body.norm() / env.gravity, 1.155, 1e-3);
  // Coordinated: no lateral specific force.
  EXPECT_NEAR(held.accel_body.y(), 0.0, 1e-3);
  EXPECT_EQ(select_pairs(held.accel_body, held.mag_body, MagneticReference{env.mag_ref_ned}, env.gravity),
            PairSelection::MagPrimary);
  // Rolls back out to wings level.
  EXPECT_NEAR(truth.back().euler.roll, 0.0, 1e-3);
}

TEST(GenerateTrajectory, AttitudeIsExactIntegralOfRates) {
  const auto truth = generate_trajectory(canonical_script(), kDt);
  for (std::size_t k = 1; k < truth.size(); k += 97) {
    const Quaternion next = propagate_quaternion(truth[k - 1].attitude, truth[k - 1].omega, kDt);
    EXPECT_LT((next.vector() - truth[k].attitude.vector()).norm(), 1e-14);
  }
}

TEST(GenerateTrajectory, MagneticDisturbanceRespectsWindow) {
  Maneuver m = make(SteadyFlight{5.0, 20.0});
  m.mag_disturbance = Vec3(0.1, 0.0, 0.0);
  m.mag_disturbance_start = 1.0;
  m.mag_disturbance_end = 2.0;
  const TrajectoryEnvironment env;
  const auto truth = generate_trajectory({m}, kDt, env);
  EXPECT_LT((truth[50].mag_body - env.mag_ref_ned).norm(), 1e-15);
  EXPECT_LT((truth[150].mag_body - env.mag_ref_ned - m.mag_disturbance).norm(), 1e-15);
  EXPECT_LT((truth[250].mag_body - env.mag_ref_ned).norm(), 1e-15);
}

TEST(GenerateTrajectory, PitchDoubletReturnsToLevel) {
  const auto truth = generate_trajectory({make(PitchDoublet{6.0, 0.3}), make(SteadyFlight{1.0, 20.0})}, kDt);
  double peak = 0.0;
  for (const auto& s : truth) peak = std::max(peak, s.euler.pitch);
  EXPECT_NEAR(peak, 2.0 * 0.3 * 6.0 / (2.0 * kPi), 1e-3);
  EXPECT_NEAR(truth.back().euler.pitch, 0.0, 1e-6);
}

TEST(GenerateTrajectory, EmptyScriptThrows) {
  EXPECT_THROW(generate_trajectory({}, kDt), EmptyScript);
}

TEST(GenerateTrajectory, RejectsNonPositiveDurations) {
  EXPECT_THROW(generate_trajectory({make(SteadyFlight{0.0, 20.0})}, kDt), std::invalid_argument);
  EXPECT_THROW(generate_trajectory({make(SteadyFlight{1.0, 20.0})}, 0.0), std::invalid_argument);
}

TEST(CanonicalScript, FourPhasesLongerThanTenMinutes) {
  const auto script = canonical_script();
  double total = 0.0;
  std::vector<double> banks;
  for (const auto& m : script) {
    total += duration(m);
    if (const auto* t = std::get_if<CoordinatedTurn>(&m.kind)) banks.push_back(t->bank);
  }
  EXPECT_GE(total, 600.0);
  ASSERT_EQ(banks.size(), 2u);
  EXPECT_LT(banks[0], 0.0);  // left turn first
  EXPECT_GT(banks[1], 0.0);
}

}  // namespace
}  // namespace ahrs::sim
