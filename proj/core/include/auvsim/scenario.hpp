#pragma once

#include "auvsim/acoustics.hpp"
#include "auvsim/config.hpp"
#include "auvsim/engine.hpp"
#include "auvsim/envgrid.hpp"
#include "auvsim/mission.hpp"
#include "auvsim/vehicle_params.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace auvsim::scenario {

enum class MissionKind { None, HotBunk, Yoyo };

struct FaultSpec {
  engine::Component component = engine::Component::Propeller;
  std::optional<double> at_time;
  std::optional<mission::Phase> at_phase;
  std::string phase_of;  // vehicle name; empty = the faulted vehicle
};

struct VehicleSpec {
  std::string name;
  VehicleId id = 0;
  std::string params_source = "reference";
  dynamics::VehicleParams params;
  Vec3 position = Vec3::Zero();
  double heading = 0.0;  // rad, CCW from east
  double pitch = 0.0;    // rad, nose up
  MissionKind mission = MissionKind::None;
  mission::HotBunkConfig hotbunk;
  std::string partner;
  mission::YoyoConfig yoyo;
  std::vector<FaultSpec> faults;
};

struct ScenarioConfig {
  std::string source;
  std::uint64_t seed = 0;
  bool grounding_terminal = true;

  acoustics::ChannelParams channel;

  std::filesystem::path current_east, current_north, current_up;
  env::Projection projection;

  std::filesystem::path bathymetry_manifest;
  std::size_t max_resident_tiles = 9;

  double duration = 3600.0;
  double physics_dt = 0.02;
  double control_period = 0.2;
  bool stop_when_complete = true;
  bool realtime = false;

  std::filesystem::path trace_csv, trace_bin, event_log, phase_log, homing_log;

  std::vector<VehicleSpec> vehicles;

  /// The document as parsed, overrides included.
  std::string effective;
};

/// Reads every scenario section and rejects anything unknown. Relative paths
/// resolve against `base_dir`.
ScenarioConfig parse_scenario(const ConfigDocument& doc, const std::filesystem::path& base_dir);

/// Loads `path`, applies `section.key=value` overrides in order, then parses.
ScenarioConfig load_scenario(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides = {});

engine::World build_world(const ScenarioConfig& cfg);

/// `n` copies of the first vehicle spaced `spacing` m apart along x.
ScenarioConfig replicate(const ScenarioConfig& base, std::size_t n, double spacing = 500.0);

}  // namespace auvsim::scenario
