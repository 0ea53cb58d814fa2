#pragma once

#include "auvsim/acoustics.hpp"
#include "auvsim/bathymetry.hpp"
#include "auvsim/dynamics.hpp"
#include "auvsim/envgrid.hpp"
#include "auvsim/error.hpp"
#include "auvsim/mission.hpp"
#include "auvsim/trace.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace auvsim::engine {

/// Fixed-step clock. Time is always tick * physics_dt.
class SimClock {
 public:
  SimClock(double physics_dt = 0.02, double control_period = 0.2);

  double time() const { return static_cast<double>(tick) * physics_dt_; }
  double physics_dt() const { return physics_dt_; }
  std::uint64_t control_every() const { return control_every_; }
  double control_period() const { return static_cast<double>(control_every_) * physics_dt_; }
  bool control_tick() const { return tick % control_every_ == 0; }

  std::uint64_t tick = 0;

 private:
  double physics_dt_;
  std::uint64_t control_every_;
};

enum class Component { Propeller, AcousticModem, Elevator, MassShifter, Rudder };
const char* to_string(Component c);
std::optional<Component> component_from_string(const std::string& name);

/// A component stops obeying commands from a time or from the moment a
/// vehicle (itself by default) is seen in a given phase.
struct Fault {
  Component component = Component::Propeller;
  std::optional<double> at_time;
  std::optional<mission::Phase> at_phase;
  std::optional<VehicleId> phase_of;

  bool active = false;
  double activated_at = 0.0;
  double frozen_value = 0.0;
};

struct Vehicle {
  VehicleId id = 0;
  std::string name;
  VehicleState state;
  dynamics::VehicleParams params;
  std::unique_ptr<mission::Mission> mission = std::make_unique<mission::IdleMission>();
  mission::ActuatorCommand command;  // latched, after limits and faults
  dynamics::ActuatorState actuators;
  std::vector<Fault> faults;
  double min_altitude = std::numeric_limits<double>::infinity();
  bool outside_bathy_warned = false;
  bool grounding_warned = false;
};

struct EngineOptions {
  bool grounding_terminal = true;
  bool stop_when_complete = true;
  bool realtime = false;          // pace the loop to wall clock
  bool log_control_ticks = false;
};

class World {
 public:
  World() = default;
  World(World&&) = default;
  World& operator=(World&&) = default;

  /// Inserts keeping vehicles sorted by id; throws on a duplicate id.
  Vehicle& add_vehicle(Vehicle v);
  Vehicle& vehicle(VehicleId id);
  const Vehicle& vehicle(VehicleId id) const;
  const Vehicle* find(const std::string& name) const;

  /// No mission still needs the run to continue.
  bool complete() const;
  bool any_aborted() const;

  SimClock clock;
  std::vector<Vehicle> vehicles;
  env::CurrentField current;
  std::optional<bathy::TileSet> bathymetry;
  acoustics::AcousticChannel channel;
  EngineOptions options;
  std::vector<trace::TraceSink*> sinks;
  trace::TraceDigest digest;
  std::vector<std::uint64_t> control_log;
};

/// Vehicle touched the seafloor.
class GroundingError : public Error {
 public:
  using Error::Error;
};

/// Advances the world by one physics tick: missions on control ticks, then
/// physics for every vehicle, then channel arrivals, then trace rows.
void step_world(World& w);

struct RtfReport {
  double sim_seconds = 0.0;
  double wall_seconds = 0.0;
  double rtf = 0.0;
  std::size_t n_vehicles = 0;
  double physics_dt = 0.0;
};

enum class RunStatus { DurationReached, MissionsComplete, Grounded, NumericFailure };
const char* to_string(RunStatus s);

struct RunResult {
  RunStatus status = RunStatus::DurationReached;
  std::string diagnostic;
  std::uint64_t ticks = 0;
  std::optional<RtfReport> rtf;  // absent when no tick ran
};

/// Steps until sim time reaches `duration` or every mission is finished.
/// Wall time covers the loop only.
RunResult run(World& w, double duration);

using WorldFactory = std::function<World(std::size_t n_vehicles, double physics_dt)>;

/// Best-of-`repeats` RTF for every (vehicle count, dt) pair, counts outer.
std::vector<RtfReport> rtf_sweep(const WorldFactory& make, const std::vector<std::size_t>& counts,
                                 const std::vector<double>& dts, double duration, int repeats = 3);

void write_rtf_csv(const std::vector<RtfReport>& reports, std::ostream& out);
/// time,vehicle,from,to,reason
void write_phase_log(const World& w, std::ostream& out);
/// time,vehicle,range,azimuth
void write_homing_log(const World& w, std::ostream& out);

}  // namespace auvsim::engine
