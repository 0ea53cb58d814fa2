#include <auvsim/engine.hpp>
#include <auvsim/scenario.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

using namespace auvsim;
using namespace auvsim::engine;

namespace {

const std::string kScenarios = std::string(AUVSIM_CONFIG_DIR) + "/scenarios/";

Vehicle still_vehicle(VehicleId id, Vec3 pos = Vec3(0, 0, -10)) {
  Vehicle v;
  v.id = id;
  v.params = dynamics::reference_vehicle();
  v.state.position = pos;
  return v;
}

// Records the time of every step and returns a fixed command.
class ProbeMission final : public mission::Mission {
 public:
  mission::MissionOutputs step(const mission::MissionInputs& in) override {
    times.push_back(in.now);
    mission::MissionOutputs out;
    out.command.prop_speed = 5.0;
    out.command.rudder = 0.1;
    return out;
  }
  mission::Phase phase() const override { return mission::Phase::Idle; }
  bool terminal() const override { return false; }
  std::vector<double> times;
};

}  // namespace

TEST(SimClock, RejectsBadPeriods) {
  EXPECT_THROW(SimClock(0.0, 0.2), ConfigError);
  EXPECT_THROW(SimClock(0.06, 0.12), ConfigError);
  EXPECT_THROW(SimClock(0.02, 0.03), ConfigError);
  EXPECT_THROW(SimClock(0.02, 0.01), ConfigError);
  SimClock c(0.03, 0.21);
  EXPECT_EQ(c.control_every(), 7u);
  c.tick = 1000;
  EXPECT_DOUBLE_EQ(c.time(), 30.0);
}

TEST(World, SortedUniqueIds) {
  World w;
  w.add_vehicle(still_vehicle(5));
  w.add_vehicle(still_vehicle(2));
  w.add_vehicle(still_vehicle(9));
  EXPECT_EQ(w.vehicles[0].id, 2u);
  EXPECT_EQ(w.vehicles[2].id, 9u);
  EXPECT_THROW(w.add_vehicle(still_vehicle(5)), ConfigError);
  EXPECT_THROW(w.vehicle(4), Error);
}

TEST(Engine, MotionlessVehicleStaysPut) {
  World w;
  w.add_vehicle(still_vehicle(1));
  w.options.stop_when_complete = false;
  const auto res = run(w, 10.0);
  EXPECT_EQ(res.ticks, 500u);
  const auto& s = w.vehicles[0].state;
  EXPECT_LT((s.position - Vec3(0, 0, -10)).norm(), 1e-12);
  EXPECT_LT(s.lin_vel.norm(), 1e-12);
  EXPECT_EQ(s.sim_time, 500 * 0.02);
  EXPECT_EQ(w.clock.time(), s.sim_time);
}

TEST(Engine, ZeroDurationRunsNothing) {
  World w;
  w.add_vehicle(still_vehicle(1));
  const auto res = run(w, 0.0);
  EXPECT_EQ(res.ticks, 0u);
  EXPECT_FALSE(res.rtf);
}

TEST(Engine, ControlOnEveryOtherTick) {
  World w;
  w.clock = SimClock(0.02, 0.04);
  w.options.log_control_ticks = true;
  auto v = still_vehicle(1);
  auto probe = std::make_unique<ProbeMission>();
  auto* p = probe.get();
  v.mission = std::move(probe);
  w.add_vehicle(std::move(v));
  trace::MemoryTrace mem;
  w.sinks.push_back(&mem);
  for (int i = 0; i < 20; ++i) step_world(w);
  ASSERT_EQ(w.control_log.size(), 10u);
  for (std::size_t i = 0; i < w.control_log.size(); ++i) EXPECT_EQ(w.control_log[i], 2 * i);
  ASSERT_EQ(p->times.size(), 10u);
  EXPECT_DOUBLE_EQ(p->times[3], 6 * 0.02);
  // Command latched from the first control tick on.
  EXPECT_EQ(mem.rows().front().command.prop_speed, 5.0);
  EXPECT_EQ(mem.rows().front().tick, 1u);
  EXPECT_DOUBLE_EQ(mem.rows().back().time, 20 * 0.02);
}

TEST(Engine, ShifterSlewsAtBoundedRate) {
  World w;
  w.add_vehicle(still_vehicle(1));
  w.vehicles[0].command.shifter_target = 0.03;
  w.clock = SimClock(0.02, 1.0);
  w.clock.tick = 1;  // past the control tick, so the latched command stays
  for (int i = 0; i < 10; ++i) step_world(w);
  EXPECT_NEAR(w.vehicles[0].actuators.shifter_position, 10 * 0.02 * 0.01, 1e-15);
}

TEST(Engine, TimedPropellerFault) {
  World w;
  auto v = still_vehicle(1);
  v.mission = std::make_unique<ProbeMission>();
  Fault f;
  f.component = Component::Propeller;
  f.at_time = 1.0;
  v.faults.push_back(f);
  w.add_vehicle(std::move(v));
  w.options.stop_when_complete = false;
  run(w, 0.99);
  EXPECT_EQ(w.vehicles[0].command.prop_speed, 5.0);
  run(w, 0.5);
  EXPECT_EQ(w.vehicles[0].command.prop_speed, 0.0);
  EXPECT_TRUE(w.vehicles[0].faults[0].active);
  EXPECT_DOUBLE_EQ(w.vehicles[0].faults[0].activated_at, 1.0);
}

TEST(Engine, RudderFaultFreezesLastCommand) {
  World w;
  auto v = still_vehicle(1);
  v.mission = std::make_unique<ProbeMission>();
  Fault f;
  f.component = Component::Rudder;
  f.at_time = 0.5;
  v.faults.push_back(f);
  w.add_vehicle(std::move(v));
  w.options.stop_when_complete = false;
  run(w, 2.0);
  EXPECT_EQ(w.vehicles[0].command.rudder, 0.1);
}

TEST(Engine, DeterministicDigest) {
  auto once = [] {
    auto w = scenario::build_world(scenario::load_scenario(kScenarios + "hotbunk_nominal.cfg"));
    run(w, 120.0);
    return std::pair{w.digest.value(), w.digest.rows()};
  };
  const auto a = once();
  EXPECT_EQ(a, once());
  EXPECT_EQ(a.second, 2u * 6000u);
}

TEST(Engine, SeedChangesDigestWhenNoiseIsOn) {
  auto digest = [](int seed) {
    auto w = scenario::build_world(scenario::load_scenario(
        kScenarios + "hotbunk_nominal.cfg",
        {"world.seed=" + std::to_string(seed), "world.channel.sigma_azimuth=0.05", "vehicle.rv.hotbunk.waypoint=-490, 0, -20"}));
    run(w, 120.0);
    return w.digest.value();
  };
  EXPECT_NE(digest(1), digest(2));
}

TEST(Engine, FaultAfterDoneLeavesOutcome) {
  auto cfg = scenario::load_scenario(kScenarios + "hotbunk_nominal.cfg");
  auto plain = scenario::build_world(cfg);
  const auto r1 = run(plain, cfg.duration);
  const auto* rv = plain.find("rv");
  ASSERT_EQ(rv->mission->phase(), mission::Phase::Done);
  double done_at = 0;
  for (const auto& t : rv->mission->transitions())
    if (t.to == mission::Phase::Done) done_at = t.time;

  auto faulted = scenario::build_world(cfg);
  for (auto& v : faulted.vehicles) {
    for (auto c : {Component::Propeller, Component::AcousticModem}) {
      Fault f;
      f.component = c;
      f.at_time = done_at + 1.0;
      v.faults.push_back(f);
    }
  }
  run(faulted, cfg.duration);
  EXPECT_EQ(faulted.find("rv")->mission->phase(), mission::Phase::Done);
  EXPECT_EQ(faulted.find("rv")->mission->transitions().size(), rv->mission->transitions().size());
  EXPECT_EQ(r1.status, RunStatus::MissionsComplete);
}

TEST(Engine, PhaseFaultFiresOnWatchedVehicle) {
  auto w = scenario::build_world(scenario::load_scenario(kScenarios + "hotbunk_modem_fault.cfg"));
  const auto res = run(w, 3000.0);
  EXPECT_EQ(res.status, RunStatus::MissionsComplete);
  const auto* sv = w.find("sv");
  const auto* rv = w.find("rv");
  ASSERT_TRUE(sv->faults[0].active);
  EXPECT_FALSE(w.channel.modem_enabled(sv->id));
  EXPECT_EQ(rv->mission->phase(), mission::Phase::Aborted);
  EXPECT_EQ(rv->mission->abort_reason(), "handshake_timeout");
  EXPECT_TRUE(w.any_aborted());
}

TEST(Engine, PropellerFaultTimesOutMidcourse) {
  auto w = scenario::build_world(scenario::load_scenario(kScenarios + "hotbunk_propeller_fault.cfg"));
  run(w, 3000.0);
  EXPECT_EQ(w.find("rv")->mission->abort_reason(), "MidcourseGuidance");
}

namespace {

std::filesystem::path floor_tiles(const std::filesystem::path& dir, double depth) {
  std::filesystem::create_directories(dir);
  bathy::Tile t;
  t.origin_x = -1000;
  t.origin_y = -1000;
  t.rows = t.cols = 3;
  t.cell_size = 1000;
  t.depths.assign(9, static_cast<float>(depth));
  bathy::write_tile(dir / "t.bin", t);
  bathy::Manifest m;
  m.origin_x = -1000;
  m.origin_y = -1000;
  m.tile_size = 2000;
  m.tiles[{0, 0}] = "t.bin";
  bathy::write_manifest(dir / "m.tiles", m);
  return dir / "m.tiles";
}

}  // namespace

TEST(Engine, GroundingIsTerminalOrWarns) {
  const auto dir = std::filesystem::temp_directory_path() / "auvsim_engine_ground";
  const auto manifest = floor_tiles(dir, -25.0);
  for (bool terminal : {true, false}) {
    World w;
    w.bathymetry.emplace(bathy::TileSet::open(manifest));
    w.options.grounding_terminal = terminal;
    w.options.stop_when_complete = false;
    auto v = still_vehicle(1, Vec3(0, 0, -20));
    v.params.buoyancy.volume *= 0.99;  // sinks
    w.add_vehicle(std::move(v));
    const auto res = run(w, 600.0);
    if (terminal) {
      EXPECT_EQ(res.status, RunStatus::Grounded);
      EXPECT_NE(res.diagnostic.find("grounded"), std::string::npos);
      EXPECT_LT(res.ticks, 30000u);
    } else {
      EXPECT_EQ(res.status, RunStatus::DurationReached);
      EXPECT_LE(w.vehicles[0].min_altitude, 0.0);
    }
  }
  std::filesystem::remove_all(dir);
}

TEST(Engine, CurrentCarriesIdleVehicle) {
  World w;
  w.options.stop_when_complete = false;
  w.current.north = std::make_shared<env::EnvGrid>(env::EnvGrid::sample(
      "n", {0}, {-1e4, 1e4}, {-1e4, 1e4}, {-100, 0}, [](double, double, double, double) { return 0.3; }));
  w.add_vehicle(still_vehicle(1));
  run(w, 600.0);
  const auto& s = w.vehicles[0].state;
  EXPECT_NEAR((s.orientation * s.lin_vel).y(), 0.3, 0.02 * 0.3);
  EXPECT_GT(s.position.y(), 100.0);
}

TEST(Engine, LogsHaveHeaders) {
  auto w = scenario::build_world(scenario::load_scenario(kScenarios + "hotbunk_nominal.cfg"));
  run(w, 200.0);
  std::ostringstream phases, homing, rtf;
  write_phase_log(w, phases);
  write_homing_log(w, homing);
  write_rtf_csv({}, rtf);
  EXPECT_EQ(phases.str().rfind("time,vehicle,from,to,reason\n", 0), 0u);
  EXPECT_NE(phases.str().find("rv,Deployed,MidcourseGuidance"), std::string::npos);
  EXPECT_EQ(homing.str().rfind("time,vehicle,range,azimuth\n", 0), 0u);
  EXPECT_EQ(rtf.str(), "n_vehicles,physics_dt,sim_seconds,wall_seconds,rtf\n");
}

TEST(Engine, RtfSweepCoversGrid) {
  const auto base = scenario::load_scenario(kScenarios + "yoyo.cfg");
  auto make = [&](std::size_t n, double dt) {
    auto cfg = scenario::replicate(base, n);
    cfg.physics_dt = dt;
    cfg.control_period = dt * 5;
    return scenario::build_world(cfg);
  };
  const auto reports = rtf_sweep(make, {1, 3}, {0.02, 0.03}, 5.0, 1);
  ASSERT_EQ(reports.size(), 4u);
  EXPECT_EQ(reports[3].n_vehicles, 3u);
  EXPECT_EQ(reports[3].physics_dt, 0.03);
  for (const auto& r : reports) EXPECT_GT(r.rtf, 0.0);
}
