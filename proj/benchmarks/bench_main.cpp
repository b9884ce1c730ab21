#include <benchmark/benchmark.h>

#include "invobs/car.hpp"
#include "invobs/ins.hpp"
#include "invobs/reactor.hpp"
#include "invobs/scenario.hpp"
#include "invobs/simulate.hpp"
#include "invobs/vtol.hpp"

using namespace invobs;

static void BM_CarObserverRhs(benchmark::State& st) {
  const car::Car sys;
  const auto g = car::gain({});
  const car::Car::State xh(1, 2, 0.3);
  for (auto _ : st) benchmark::DoNotOptimize(observer_rhs(sys, g, xh, {1.0, 0.2}, {0.9, 2.1}));
}
BENCHMARK(BM_CarObserverRhs);

static void BM_ReactorObserverGlobal(benchmark::State& st) {
  const reactor::Reactor sys;
  const reactor::Reactor::State xh(1.2, 0.4, 290);
  const reactor::Reactor::Input u(2.16e12, 0.0033, 270, 0);
  for (auto _ : st) benchmark::DoNotOptimize(reactor::observer_rhs_global(sys, xh, u, 286.0, {}));
}
BENCHMARK(BM_ReactorObserverGlobal);

static void BM_InsObserverGeneric(benchmark::State& st) {
  const ins::Environment env;
  const ins::Ins sys(env);
  const auto g = constant_gain<ins::Ins>(ins::frame_gain({}, env));
  Rng rng(1);
  const auto s = sys.sample_state(rng);
  const auto u = sys.sample_input(rng);
  const auto y = sys.sample_output(rng);
  for (auto _ : st) benchmark::DoNotOptimize(observer_rhs(sys, g, s, u, y));
}
BENCHMARK(BM_InsObserverGeneric);

static void BM_InsObserverDirect(benchmark::State& st) {
  const ins::Ins sys;
  Rng rng(1);
  const auto s = sys.sample_state(rng);
  const auto u = sys.sample_input(rng);
  const auto y = sys.sample_output(rng);
  for (auto _ : st) benchmark::DoNotOptimize(ins::observer_rhs_direct(sys, {}, s, u, y));
}
BENCHMARK(BM_InsObserverDirect);

static void BM_VtolReference(benchmark::State& st) {
  const VtolTrajectorySpec spec;
  const ins::Environment env;
  double t = 0.0;
  for (auto _ : st) {
    benchmark::DoNotOptimize(vtol_reference(spec, t, env));
    t = t > 6.0 ? 0.0 : t + 1e-3;
  }
}
BENCHMARK(BM_VtolReference);

static void BM_Scenario(benchmark::State& st, const char* preset) {
  const auto cfg = scenario::preset(preset);
  for (auto _ : st) benchmark::DoNotOptimize(scenario::run_scenario(cfg).csv.size());
}
BENCHMARK_CAPTURE(BM_Scenario, car_default, "car-default")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Scenario, ins_paper, "ins-paper")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Scenario, reactor_default, "reactor-default")->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
