// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "ahrs/corruption.hpp"
#include "ahrs/ekf.hpp"
#include "ahrs/pipeline.hpp"
#include "ahrs/trajectory.hpp"
#include "ahrs/trial.hpp"
#include "ahrs/triad.hpp"
#include "ahrs/ukf.hpp"
#include "ahrs/unscented.hpp"
#include "ahrs_cli/commands.hpp"
#include "linear_kf.hpp"
#include "test_support.hpp"

namespace ahrs {
namespace {

namespace fs = std::filesystem;
using testing::Random;

constexpr double kDt = 0.01;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

const std::vector<sim::TruthSample>& canonical_truth() {
  static const std::vector<sim::TruthSample> truth = sim::generate_trajectory(sim::canonical_script(), kDt);
  return truth;
}

// 1. Quaternion kinematics: norm preservation, conversions, exact constant-rate rotation.
Outcome quaternion_suite() {
  const auto start = std::chrono::steady_clock::now();
  Random rng(1);

  double norm_drift = 0.0;
  Quaternion q = rng.unit_quaternion();
  for (int k = 0; k < 10000; ++k) {
    q = propagate_quaternion(q, rng.vector(3.0), kDt);
    norm_drift = std::max(norm_drift, std::abs(q.vector().norm() - 1.0));
  }

  double round_trip = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const EulerAngles e = rng.euler(85.0 * kDegToRad);
    const Quaternion qe = euler_to_quaternion(e);
    const EulerAngles back = dcm_to_euler(quaternion_to_dcm(qe));
    const auto err = sim::euler_errors(back, e);
    for (double v : err) round_trip = std::max(round_trip, std::abs(v));
    round_trip = std::max(round_trip, testing::quaternion_distance(dcm_to_quaternion(quaternion_to_dcm(qe)), qe));
    round_trip = std::max(round_trip, (quaternion_to_dcm(qe) - testing::reference_dcm(e)).cwiseAbs().maxCoeff());
  }

  double axis_angle = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Quaternion q0 = rng.unit_quaternion();
    const Vec3 omega = rng.vector(5.0);
    const double dt = rng.uniform(0.001, 0.5);
    axis_angle = std::max(axis_angle, testing::quaternion_distance(propagate_quaternion(q0, omega, dt),
                                                                   testing::reference_rotation(q0, omega, dt)));
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  return {norm_drift <= 1e-9 && round_trip <= 1e-9 && axis_angle <= 1e-10 && seconds < 5.0,
          "norm drift " + fmt(norm_drift) + ", round trip " + fmt(round_trip) + ", axis-angle " + fmt(axis_angle) +
              ", " + fmt(seconds) + " s"};
}

// 2. TRIAD recovers random rotations and rejects parallel pairs.
Outcome triad_suite() {
  Random rng(2);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Dcm truth = quaternion_to_dcm(rng.unit_quaternion());
    const Vec3 r1 = rng.unit_vector();
    Vec3 r2;
    do {
      r2 = rng.unit_vector();
    } while (r1.cross(r2).norm() < 0.1);
    const auto dcm = triad_dcm({truth * r1, r1}, {truth * r2, r2});
    if (!dcm) return {false, "rotation " + std::to_string(i) + " rejected"};
    worst = std::max(worst, (*dcm - truth).cwiseAbs().maxCoeff());
  }
  int rejected = 0;
  for (int i = 0; i < 100; ++i) {
    const Vec3 v = rng.unit_vector();
    const Vec3 w = rng.unit_vector();
    if (!triad_dcm({v, w}, {-v * 2.0, w})) ++rejected;          // parallel observations
    if (!triad_dcm({v, w}, {v, w + 1e-9 * rng.unit_vector()})) ++rejected;  // parallel references
  }
  return {worst <= 1e-10 && rejected == 200,
          "max element error " + fmt(worst) + ", degenerate pairs rejected " + std::to_string(rejected) + "/200"};
}

template <int Rows, typename F>
Eigen::Matrix<double, Rows, kStateDim> central_difference(F&& f, const StateVector& x, double h) {
  Eigen::Matrix<double, Rows, kStateDim> J;
  for (int j = 0; j < kStateDim; ++j) {
    StateVector plus = x, minus = x;
    plus[j] += h;
    minus[j] -= h;
    J.col(j) = (f(plus) - f(minus)) / (2.0 * h);
  }
  return J;
}

template <typename A, typename B>
double max_relative_error(const A& actual, const B& expected) {
  return ((actual - expected).cwiseAbs().array() / expected.cwiseAbs().array().max(1.0)).maxCoeff();
}

// 3. Analytic Jacobians against central differences.
Outcome jacobian_suite() {
  Random rng(3);
  double worst_f = 0.0, worst_h = 0.0;
  for (int i = 0; i < 1000; ++i) {
    StateVector x;
    x.head<4>() = rng.unit_quaternion().vector();
    x.tail<3>() = rng.vector(0.1);
    const Vec3 gyro = rng.vector(2.0);
    const double dt = rng.uniform(0.001, 0.1);
    const auto fd_f = central_difference<kStateDim>([&](const StateVector& s) { return process_model(s, gyro, dt); },
                                                    x, 1e-6);
    worst_f = std::max(worst_f, max_relative_error(process_jacobian(x, gyro, dt), fd_f));
    const auto fd_h = central_difference<kObsDim>(
        [](const StateVector& s) {
          return ObsVector(observe(quaternion_to_dcm(Quaternion::from_vector(s.head<4>()))).vector());
        },
        x, 1e-6);
    worst_h = std::max(worst_h, max_relative_error(observation_jacobian(x), fd_h));
  }
  return {worst_f <= 1e-5 && worst_h <= 1e-5,
          "process " + fmt(worst_f) + ", observation " + fmt(worst_h) + " (relative)"};
}

// 4. On a linear system both filters reproduce the textbook Kalman filter.
Outcome linear_equivalence() {
  constexpr int N = 7, M = 4;
  using VecN = Eigen::Matrix<double, N, 1>;
  using VecM = Eigen::Matrix<double, M, 1>;
  std::mt19937_64 rng(4);
  const auto sys = testing::random_linear_system<N, M>(rng);
  std::normal_distribution<double> n(0.0, 1.0);
  const Eigen::LLT<Eigen::Matrix<double, N, N>> q_chol(sys.Q);
  const Eigen::LLT<Eigen::Matrix<double, M, M>> r_chol(sys.R);

  VecN truth = VecN::Zero();
  testing::ReferenceEstimate<N> ref{VecN::Zero(), Eigen::Matrix<double, N, N>::Identity()};
  GaussianEstimate<N> ukf{ref.x, ref.P};
  GaussianEstimate<N> ekf{ref.x, ref.P};
  const UkfParams params;
  double ukf_worst = 0.0, ekf_worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    VecN w;
    for (int i = 0; i < N; ++i) w[i] = n(rng);
    VecM v;
    for (int i = 0; i < M; ++i) v[i] = n(rng);
    truth = sys.F * truth + q_chol.matrixL() * w;
    const VecM y = sys.H * truth + r_chol.matrixL() * v;

    ref = testing::reference_update<N, M>(testing::reference_predict<N, M>(ref, sys), y, sys);
    ukf = unscented_predict<N>(ukf, [&](const VecN& x) { return VecN(sys.F * x); }, params, sys.Q);
    ukf = unscented_update<N, M>(ukf, y, [&](const VecN& x) { return VecM(sys.H * x); }, params, sys.R).estimate;
    ekf = ekf_predict<N>(ekf, VecN(sys.F * ekf.x), sys.F, sys.Q);
    ekf = ekf_update<N, M>(ekf, y, VecM(sys.H * ekf.x), sys.H, sys.R).estimate;
    ukf_worst = std::max({ukf_worst, (ukf.x - ref.x).cwiseAbs().maxCoeff(), (ukf.P - ref.P).cwiseAbs().maxCoeff()});
    ekf_worst = std::max({ekf_worst, (ekf.x - ref.x).cwiseAbs().maxCoeff(), (ekf.P - ref.P).cwiseAbs().maxCoeff()});
  }
  return {ukf_worst <= 1e-8 && ekf_worst <= 1e-8,
          "max deviation ukf " + fmt(ukf_worst) + ", ekf " + fmt(ekf_worst) + " over 1000 steps"};
}

std::string errors_text(const sim::ErrorReport& r) {
  if (r.diverged) return "diverged (" + r.failure + ")";
  return fmt(r.max_error_deg[0]) + "/" + fmt(r.max_error_deg[1]) + "/" + fmt(r.max_error_deg[2]) + " deg";
}

// 5. Typical MEMS errors on the reference flight: the UKF meets 1/1/4 deg, the EKF does not.
Outcome reference_flight_accuracy() {
  const sim::PassCriterion criterion;
  sim::CorruptionConfig corruption = sim::CorruptionConfig::typical_mems();
  std::array<sim::ErrorReport, 2> reports;
  for (EstimatorKind kind : {EstimatorKind::Ukf, EstimatorKind::Ekf}) {
    EstimatorConfig est;
    est.kind = kind;
    reports[static_cast<int>(kind)] = sim::run_trial(canonical_truth(), corruption, est, sim::TrialOptions{}, kDt);
  }
  const auto& ukf = reports[0];
  const auto& ekf = reports[1];
  return {ukf.passes(criterion) && !ekf.passes(criterion),
          "max roll/pitch/yaw error ukf " + errors_text(ukf) + ", ekf " + errors_text(ekf)};
}

// 6. Per-channel bias tolerance: the UKF tolerates at least as much as the EKF.
Outcome tolerance_ordering() {
  const std::array<sim::SweepChannel, 6> channels{sim::SweepChannel::GyroP, sim::SweepChannel::GyroQ,
                                                  sim::SweepChannel::GyroR, sim::SweepChannel::Accel,
                                                  sim::SweepChannel::Mag,   sim::SweepChannel::GpsSpeed};
  bool ordered = true;
  std::string detail;
  for (sim::SweepChannel channel : channels) {
    const sim::SweepParameter parameter{channel, sim::SweepKind::Bias};
    sim::ToleranceSweepSpec spec;
    spec.parameter = parameter;
    spec.upper = sim::default_sweep_upper(parameter);
    spec.trials = 10;
    spec.pass_fraction = 0.9;
    std::array<double, 2> tolerance{};
    for (EstimatorKind kind : {EstimatorKind::Ukf, EstimatorKind::Ekf}) {
      sim::SweepContext ctx;
      ctx.truth = &canonical_truth();
      ctx.dt = kDt;
      ctx.base = sim::CorruptionConfig::typical_mems();
      ctx.estimator.kind = kind;
      tolerance[static_cast<int>(kind)] = sim::tolerance_sweep(spec, ctx).tolerance;
    }
    ordered = ordered && tolerance[0] >= tolerance[1];
    if (!detail.empty()) detail += "; ";
    detail += sim::to_string(parameter) + " ukf " + fmt(tolerance[0]) + " ekf " + fmt(tolerance[1]) + " " +
              std::string(sim::sweep_unit(channel));
  }
  return {ordered, detail};
}

// 7. A 3 deg/s yaw-gyro bias is learned to within 0.3 deg/s inside 120 s.
Outcome yaw_bias_convergence() {
  sim::CorruptionConfig corruption = sim::CorruptionConfig::clean();
  corruption.gyro_bias_dps = Vec3(0.0, 0.0, 3.0);
  const auto frames = sim::corrupt(canonical_truth(), corruption, kDt);
  AttitudeEstimator estimator{EstimatorConfig{}};
  double last_outside = 0.0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto next = i + 1 < frames.size() ? std::optional<double>(frames[i + 1].t) : std::nullopt;
    const auto out = estimator.step(frames[i], next);
    if (!out) continue;
    const double error_dps = std::abs(out->state.gyro_bias().z() * kRadToDeg - 3.0);
    if (error_dps > 0.3) last_outside = out->t;
  }
  const double settled_at = last_outside - frames.front().t;
  return {settled_at <= 120.0, "bias within 0.3 deg/s from t = " + fmt(settled_at) + " s onward"};
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ahrs_cli");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct Workspace {
  fs::path dir;
  Workspace() : dir{fs::temp_directory_path() / ("ahrs_acceptance_" + std::to_string(::getpid()))} {
    fs::create_directories(dir);
    std::ofstream(dir / "canonical.script") << "canonical\n";
    std::ofstream(dir / "sweep.ini") << "[sweep]\nparameters = accel_bias\nestimators = ukf, ekf\ntrials = 2\n"
                                        "seed = 3\nscript = canonical\n[bounds.accel_bias]\nlower = 0\n"
                                        "upper = 2\nresolution = 0.5\n";
  }
  ~Workspace() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

// 8. A replayed simulated flight exercises all four pair-selection branches.
Outcome branch_coverage(const Workspace& ws) {
  if (cli({"simulate", ws.path("canonical.script"), "--seed", "8", "--out", ws.path("branches.csv")}) != 0 ||
      cli({"replay", ws.path("branches.csv"), "--out", ws.path("branches_est.csv")}) != 0) {
    return {false, "simulate/replay failed"};
  }
  std::ifstream in(ws.path("branches_est.csv"));
  std::string line;
  std::getline(in, line);
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    const std::string selection = line.substr(line.rfind(',') + 1);
    if (!selection.empty()) seen.insert(selection);
  }
  std::string detail;
  for (const auto& s : seen) detail += (detail.empty() ? "" : ", ") + s;
  const bool all = seen.count("accel_primary") && seen.count("mag_primary") && seen.count("mag_unreliable") &&
                   seen.count("acrobatic");
  return {all, "branches in replay log: " + detail};
}

// 9. Repeated runs with the same seed produce byte-identical files.
Outcome determinism(const Workspace& ws) {
  for (const char* run : {"a", "b"}) {
    const std::string r = run;
    if (cli({"simulate", ws.path("canonical.script"), "--seed", "9", "--out", ws.path("sim_" + r + ".csv")}) != 0 ||
        cli({"replay", ws.path("sim_" + r + ".csv"), "--out", ws.path("est_" + r + ".csv")}) != 0 ||
        cli({"sweep", ws.path("sweep.ini"), "--out", ws.path("sweep_" + r + ".txt")}) != 0) {
      return {false, "command failed"};
    }
  }
  std::string detail;
  bool same = true;
  for (const char* stem : {"sim_", "est_", "sweep_"}) {
    const std::string ext = std::string(stem) == "sweep_" ? ".txt" : ".csv";
    const std::string a = slurp(ws.dir / (stem + std::string("a") + ext));
    const std::string b = slurp(ws.dir / (stem + std::string("b") + ext));
    const bool equal = !a.empty() && a == b;
    same = same && equal;
    detail += std::string(detail.empty() ? "" : ", ") + stem + ext.substr(1) + (equal ? " identical" : " differ");
  }
  return {same, detail};
}

}  // namespace
}  // namespace ahrs

int main() {
  using namespace ahrs;
  const Workspace ws;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"quaternion and DCM math", quaternion_suite},
      {"TRIAD attitude recovery", triad_suite},
      {"EKF Jacobians vs finite differences", jacobian_suite},
      {"UKF/EKF linear equivalence with Kalman filter", linear_equivalence},
      {"reference flight accuracy, UKF meets 1/1/4 deg and EKF does not", reference_flight_accuracy},
      {"bias tolerance UKF >= EKF on all six channels", tolerance_ordering},
      {"3 deg/s yaw gyro bias estimated within 120 s", yaw_bias_convergence},
      {"all four pair-selection branches in replay log", [&] { return branch_coverage(ws); }},
      {"byte-identical outputs for a fixed seed", [&] { return determinism(ws); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::cout << (outcome.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first << " -- "
              << outcome.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
