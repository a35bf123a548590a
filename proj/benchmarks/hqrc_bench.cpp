// Microbenchmarks for the hot paths of one reservoir time step.

#include <benchmark/benchmark.h>

#include <cmath>

#include "hqrc/config.hpp"
#include "hqrc/experiment.hpp"
#include "hqrc/measurement.hpp"
#include "hqrc/readout.hpp"
#include "hqrc/statevector.hpp"

namespace {

using namespace hqrc;

StateVector scrambled(unsigned n) {
  StateVector psi(n);
  for (unsigned q = 0; q < n; ++q) {
    psi.apply(GateOp::u3(q, 0.3 + q, 1.1 * q + 0.2, 0.7));
    psi.apply(GateOp::cx(q, (q + 1) % n));
  }
  return psi;
}

void BM_RotationGate(benchmark::State& st) {
  const auto n = static_cast<unsigned>(st.range(0));
  auto psi = scrambled(n);
  unsigned q = 0;
  for (auto _ : st) {
    psi.apply(GateOp::rx(q, 0.37));
    q = (q + 1) % n;
    benchmark::DoNotOptimize(psi.amplitudes().data());
  }
}
BENCHMARK(BM_RotationGate)->DenseRange(4, 12, 4);

void BM_CxGate(benchmark::State& st) {
  const auto n = static_cast<unsigned>(st.range(0));
  auto psi = scrambled(n);
  for (auto _ : st) {
    psi.apply(GateOp::cx(0, n - 1));
    benchmark::DoNotOptimize(psi.amplitudes().data());
  }
}
BENCHMARK(BM_CxGate)->DenseRange(4, 12, 4);

void BM_MeasureExact(benchmark::State& st) {
  const auto n = static_cast<unsigned>(st.range(0));
  MeasurementScheme scheme;
  scheme.max_order = static_cast<unsigned>(st.range(1));
  const ObservableSet obs(n, scheme);
  const auto psi = scrambled(n);
  Rng rng(0);
  for (auto _ : st) benchmark::DoNotOptimize(obs.measure(psi, ShotConfig{}, rng));
  st.counters["observables"] = static_cast<double>(obs.size());
}
BENCHMARK(BM_MeasureExact)->Args({8, 2})->Args({8, 3})->Args({12, 2});

void BM_MeasureShots(benchmark::State& st) {
  MeasurementScheme scheme;
  const ObservableSet obs(8, scheme);
  const auto psi = scrambled(8);
  ShotConfig shots;
  shots.shots = static_cast<std::uint64_t>(st.range(0));
  Rng rng(0);
  for (auto _ : st) benchmark::DoNotOptimize(obs.measure(psi, shots, rng));
}
BENCHMARK(BM_MeasureShots)->Arg(1000)->Arg(100000);

void BM_ReservoirStep(benchmark::State& st) {
  ExperimentConfig cfg;
  if (st.range(0) == 1) cfg.mode = Mode::ClassicalEsn;
  auto driver = make_driver(cfg, 0);
  Eigen::VectorXd x(3);
  double t = 0;
  for (auto _ : st) {
    x << std::sin(t), std::cos(0.7 * t), std::sin(1.3 * t);
    t += 0.01;
    benchmark::DoNotOptimize(driver->advance(x));
  }
  st.SetLabel(st.range(0) == 1 ? "esn" : "hqrc");
}
BENCHMARK(BM_ReservoirStep)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
