#include <benchmark/benchmark.h>

#include "ahrs/ekf.hpp"
#include "ahrs/triad.hpp"
#include "ahrs/ukf.hpp"

namespace {

using namespace ahrs;

const Vec3 kGyro{0.01, -0.02, 0.05};
const ObservationVector kObservation = observe(quaternion_to_dcm(euler_to_quaternion({0.1, -0.05, 0.7})));

void BM_UkfPropagate(benchmark::State& state) {
  const NoiseCovariances noise = NoiseCovariances::defaults();
  FilterState s = initial_state(Quaternion::identity());
  for (auto _ : state) {
    s = ukf::propagate(s, kGyro, 0.01, UkfParams{}, noise.process);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_UkfPropagate);

void BM_UkfCorrect(benchmark::State& state) {
  const NoiseCovariances noise = NoiseCovariances::defaults();
  const FilterState s = initial_state(Quaternion::identity());
  for (auto _ : state) benchmark::DoNotOptimize(ukf::correct(s, kObservation, UkfParams{}, noise.measurement));
}
BENCHMARK(BM_UkfCorrect);

void BM_EkfPropagate(benchmark::State& state) {
  const NoiseCovariances noise = NoiseCovariances::defaults();
  FilterState s = initial_state(Quaternion::identity());
  for (auto _ : state) {
    s = ekf::propagate(s, kGyro, 0.01, noise.process);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_EkfPropagate);

void BM_EkfCorrect(benchmark::State& state) {
  const NoiseCovariances noise = NoiseCovariances::defaults();
  const FilterState s = initial_state(Quaternion::identity());
  for (auto _ : state) benchmark::DoNotOptimize(ekf::correct(s, kObservation, noise.measurement));
}
BENCHMARK(BM_EkfCorrect);

void BM_Triad(benchmark::State& state) {
  const Dcm truth = quaternion_to_dcm(euler_to_quaternion({0.2, 0.1, -1.0}));
  const Vec3 r1{0.0, 0.0, 1.0};
  const Vec3 r2 = Vec3{0.26, 0.0, 0.36}.normalized();
  const TriadPair first{truth * r1, r1};
  const TriadPair second{truth * r2, r2};
  for (auto _ : state) benchmark::DoNotOptimize(triad_dcm(first, second));
}
BENCHMARK(BM_Triad);

}  // namespace

BENCHMARK_MAIN();
