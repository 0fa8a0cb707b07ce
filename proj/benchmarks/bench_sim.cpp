#include <benchmark/benchmark.h>

#include "storetwin/control.hpp"
#include "storetwin/env_sim.hpp"
#include "storetwin/runner.hpp"
#include "storetwin/scenario.hpp"

using namespace storetwin;

namespace {

void BM_StepChamber(benchmark::State& state) {
    const env::ChamberParams params;
    env::ChamberState s{34.0, 85.0, 5.0, 10000.0, 0.0};
    const env::AmbientSample ambient{34.0, 85.0};
    const env::ActuatorInputs act{true, true, true, false};
    for (auto _ : state) {
        s = env::step_chamber(s, ambient, act, params, 1e-4, 60.0);
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_StepChamber);

void BM_ControllerTick(benchmark::State& state) {
    const control::ControllerConfig cfg;
    control::ControllerState st;
    double t = 0.0;
    for (auto _ : state) {
        const double temp = 29.0 + 2.0 * ((static_cast<long>(t) / 600) % 2);
        auto out = control::tick(st, {temp, t, true}, {76.0, t, true}, {10.0, t, true}, cfg, t);
        st = std::move(out.state);
        t += 60.0;
    }
}
BENCHMARK(BM_ControllerTick);

void BM_RunScenario(benchmark::State& state) {
    auto s = harness::preset("monsoon");
    s.duration_s = static_cast<double>(state.range(0)) * 86400.0;
    harness::RunOptions opts;
    opts.keep_log = false;
    for (auto _ : state) benchmark::DoNotOptimize(harness::run_scenario(s, opts).report);
    state.SetItemsProcessed(state.iterations() * state.range(0) * 1440);
}
BENCHMARK(BM_RunScenario)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
