#include <auvsim/dynamics.hpp>
#include <auvsim/engine.hpp>
#include <auvsim/scenario.hpp>
#include <auvsim/vehicle_params.hpp>

#include <benchmark/benchmark.h>

#include <cmath>

namespace {

using namespace auvsim;

void BM_VehicleStep(benchmark::State& state) {
  const auto params = dynamics::reference_vehicle();
  dynamics::ActuatorState a;
  a.prop_speed = params.thruster.max_prop_speed;
  a.rudder = 0.1;
  a.elevator = -0.05;
  VehicleState s;
  s.lin_vel.x() = 1.0;
  for (auto _ : state) {
    const Wrench w = dynamics::vehicle_wrench(s, params, a, Vec3::Zero());
    s = dynamics::integrate_step(s, w, params.hydro, 0.02);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_VehicleStep);

scenario::ScenarioConfig yoyo_world(std::size_t n) {
  scenario::ScenarioConfig cfg;
  scenario::VehicleSpec v;
  v.name = "auv";
  v.params = dynamics::reference_vehicle();
  v.position = Vec3(0.0, 0.0, -10.0);
  v.mission = scenario::MissionKind::Yoyo;
  v.yoyo.depth_min = 10.0;
  v.yoyo.depth_max = 30.0;
  cfg.vehicles = {v};
  cfg.physics_dt = 0.03;
  cfg.control_period = 0.21;
  cfg.stop_when_complete = false;
  return scenario::replicate(cfg, n);
}

// One simulated minute of yo-yo per iteration; range(0) = vehicle count.
void BM_YoyoMinute(benchmark::State& state) {
  const auto cfg = yoyo_world(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    state.PauseTiming();
    auto w = scenario::build_world(cfg);
    state.ResumeTiming();
    const auto r = engine::run(w, 60.0);
    benchmark::DoNotOptimize(r.ticks);
  }
  state.counters["sim_s"] = benchmark::Counter(60.0, benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_YoyoMinute)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
