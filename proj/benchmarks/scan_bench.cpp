#include <benchmark/benchmark.h>

#include "plcsim/gateway/wire.hpp"
#include "plcsim/runtime/runtime.hpp"
#include "plcsim/runtime/trace.hpp"
#include "plcsim/scenario/runner.hpp"

using namespace plcsim;

namespace {

RuntimeOptions options(std::int64_t strategy) {
  RuntimeOptions o;
  o.strategy = strategy == 0 ? StrategyKind::Procedural : StrategyKind::OO;
  return o;
}

std::unique_ptr<Runtime> executing(std::int64_t strategy) {
  auto rt = build_runtime(plant::PlantConfig{}, options(strategy));
  rt->enqueue(cmd::State{modes::StateCommand::Reset});
  rt->run(20);
  rt->enqueue(cmd::State{modes::StateCommand::Start});
  rt->run(5);
  return rt;
}

void BM_Scan(benchmark::State& state) {
  auto rt = executing(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(rt->scan().tick);
  }
  state.SetLabel(state.range(0) == 0 ? "procedural" : "oo");
}
BENCHMARK(BM_Scan)->Arg(0)->Arg(1);

void BM_Fig1Scenario(benchmark::State& state) {
  const auto s = scenario::load_scenario(std::string(PLCSIM_BENCH_SCENARIO_DIR) + "/fig1_estop_recovery.json");
  for (auto _ : state) {
    scenario::RunOptions o;
    o.runtime = options(state.range(0));
    benchmark::DoNotOptimize(scenario::run_scenario(s, o).passed());
  }
  state.SetLabel(state.range(0) == 0 ? "procedural" : "oo");
}
BENCHMARK(BM_Fig1Scenario)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_TraceLine(benchmark::State& state) {
  auto rt = executing(0);
  const Snapshot snap = rt->scan();
  for (auto _ : state) {
    benchmark::DoNotOptimize(trace_line(snap));
  }
}
BENCHMARK(BM_TraceLine);

void BM_WireStatusRoundTrip(benchmark::State& state) {
  auto rt = executing(1);
  const wire::Message m = wire::status_from(rt->scan());
  for (auto _ : state) {
    benchmark::DoNotOptimize(wire::decode_message(wire::encode(m)));
  }
}
BENCHMARK(BM_WireStatusRoundTrip);

}  // namespace

BENCHMARK_MAIN();
