#include "auvsim/engine.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <ostream>
#include <thread>
#include <utility>

namespace auvsim::engine {

namespace {

constexpr std::array<std::pair<Component, const char*>, 5> kComponents{{
    {Component::Propeller, "propeller"},
    {Component::AcousticModem, "acoustic_modem"},
    {Component::Elevator, "elevator"},
    {Component::MassShifter, "mass_shifter"},
    {Component::Rudder, "rudder"},
}};

std::string who(const Vehicle& v) {
  return v.name.empty() ? fmt::format("vehicle {}", v.id) : fmt::format("vehicle {} ({})", v.name, v.id);
}

void activate(World& w, Vehicle& v, Fault& f, double now) {
  f.active = true;
  f.activated_at = now;
  switch (f.component) {
    case Component::Propeller: break;
    case Component::AcousticModem: w.channel.set_modem_enabled(v.id, false); break;
    case Component::Elevator: f.frozen_value = v.command.elevator; break;
    case Component::MassShifter: f.frozen_value = v.command.shifter_target; break;
    case Component::Rudder: f.frozen_value = v.command.rudder; break;
  }
  spdlog::info("t={:.3f}: {} fault on {}", now, to_string(f.component), who(v));
}

void check_faults(World& w, double now) {
  for (auto& v : w.vehicles) {
    for (auto& f : v.faults) {
      if (f.active) continue;
      bool fire = f.at_time && now >= *f.at_time;
      if (!fire && f.at_phase) {
        const Vehicle& watched = f.phase_of ? w.vehicle(*f.phase_of) : v;
        fire = watched.mission->phase() == *f.at_phase;
      }
      if (fire) activate(w, v, f, now);
    }
  }
}

mission::ActuatorCommand apply_faults(const Vehicle& v, mission::ActuatorCommand cmd) {
  for (const auto& f : v.faults) {
    if (!f.active) continue;
    switch (f.component) {
      case Component::Propeller: cmd.prop_speed = 0.0; break;
      case Component::AcousticModem: break;
      case Component::Elevator: cmd.elevator = f.frozen_value; break;
      case Component::MassShifter: cmd.shifter_target = f.frozen_value; break;
      case Component::Rudder: cmd.rudder = f.frozen_value; break;
    }
  }
  return cmd;
}

double altitude_of(World& w, Vehicle& v, const VehicleState& s) {
  if (!w.bathymetry) return std::numeric_limits<double>::quiet_NaN();
  try {
    return w.bathymetry->altitude(s);
  } catch (const bathy::OutsideTileset& e) {
    if (!v.outside_bathy_warned) {
      spdlog::warn("{} left the bathymetry coverage: {}", who(v), e.what());
      v.outside_bathy_warned = true;
    }
    return std::numeric_limits<double>::quiet_NaN();
  }
}

void control(World& w, double now) {
  if (w.options.log_control_ticks) w.control_log.push_back(w.clock.tick);
  check_faults(w, now);

  const std::size_t n = w.vehicles.size();
  std::vector<acoustics::Endpoint> snapshot(n);
  std::vector<mission::MissionInputs> inputs(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& v = w.vehicles[i];
    snapshot[i] = {v.id, v.state.position};
    inputs[i].state = v.state;
    inputs[i].now = now;
    inputs[i].inbox = w.channel.poll(v.id, now);
    inputs[i].fixes = w.channel.poll_fixes(v.id, now);
    inputs[i].altitude = altitude_of(w, v, v.state);
  }

  std::vector<mission::MissionOutputs> outputs(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& v = w.vehicles[i];
    outputs[i] = v.mission->step(inputs[i]);
  }
  // Phase-triggered faults see the phases the automata just entered.
  check_faults(w, now);
  for (std::size_t i = 0; i < n; ++i) {
    auto& v = w.vehicles[i];
    v.command = apply_faults(v, mission::limit(outputs[i].command, v.params));
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (auto& payload : outputs[i].outbox) {
      acoustics::AcousticMessage msg{snapshot[i].id, std::move(payload), now, snapshot[i].position};
      w.channel.transmit(msg, snapshot);
    }
    if (auto beacon = outputs[i].fix_request) {
      auto it = std::find_if(snapshot.begin(), snapshot.end(),
                             [&](const acoustics::Endpoint& e) { return e.id == *beacon; });
      if (it == snapshot.end()) {
        throw Error(fmt::format("{} requested a fix on unknown vehicle {}", who(w.vehicles[i]), *beacon));
      }
      w.channel.request_fix(snapshot[i], *it, now);
    }
  }
}

void physics(World& w, Vehicle& v, double now, double next) {
  const double dt = w.clock.physics_dt();
  auto& a = v.actuators;
  a.prop_speed = v.command.prop_speed;
  a.rudder = v.command.rudder;
  a.elevator = v.command.elevator;
  const double target = v.command.shifter_target;
  const double slew = v.params.shifter.slew_rate;
  if (slew > 0.0) {
    const double max_move = slew * dt;
    a.shifter_position += std::clamp(target - a.shifter_position, -max_move, max_move);
  } else {
    a.shifter_position = target;
  }

  const Vec3 current = w.current.empty() ? Vec3::Zero() : env::current_at(w.current, now, v.state.position);
  try {
    const Wrench total = dynamics::vehicle_wrench(v.state, v.params, a, current);
    v.state = dynamics::integrate_step(v.state, total, v.params.hydro, dt);
  } catch (const NumericError& e) {
    throw NumericError(fmt::format("tick {}: {}: {}", w.clock.tick, who(v), e.what()));
  }
  v.state.sim_time = next;

  const double alt = altitude_of(w, v, v.state);
  if (std::isnan(alt)) return;
  v.min_altitude = std::min(v.min_altitude, alt);
  if (alt <= 0.0) {
    const auto msg = fmt::format("tick {}: {} grounded at ({:.2f}, {:.2f}), altitude {:.3f} m",
                                 w.clock.tick, who(v), v.state.position.x(), v.state.position.y(), alt);
    if (w.options.grounding_terminal) throw GroundingError(msg);
    if (!v.grounding_warned) {
      spdlog::warn("{}", msg);
      v.grounding_warned = true;
    }
  }
}

}  // namespace

SimClock::SimClock(double physics_dt, double control_period) : physics_dt_(physics_dt) {
  if (!(physics_dt > 0.0) || physics_dt > 0.05 + 1e-12) {
    throw ConfigError(fmt::format("physics dt must be in (0, 0.05] s, got {}", physics_dt));
  }
  const double ratio = control_period / physics_dt;
  const double k = std::round(ratio);
  if (!(k >= 1.0) || std::abs(ratio - k) > 1e-9 * k) {
    throw ConfigError(fmt::format("control period {} s is not a whole multiple of dt {} s",
                                  control_period, physics_dt));
  }
  control_every_ = static_cast<std::uint64_t>(k);
}

const char* to_string(Component c) {
  for (const auto& [k, name] : kComponents) {
    if (k == c) return name;
  }
  return "unknown";
}

std::optional<Component> component_from_string(const std::string& name) {
  for (const auto& [k, n] : kComponents) {
    if (name == n) return k;
  }
  return std::nullopt;
}

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::DurationReached: return "duration_reached";
    case RunStatus::MissionsComplete: return "missions_complete";
    case RunStatus::Grounded: return "grounded";
    case RunStatus::NumericFailure: return "numeric_failure";
  }
  return "unknown";
}

Vehicle& World::add_vehicle(Vehicle v) {
  auto pos = std::lower_bound(vehicles.begin(), vehicles.end(), v.id,
                              [](const Vehicle& a, VehicleId id) { return a.id < id; });
  if (pos != vehicles.end() && pos->id == v.id) {
    throw ConfigError(fmt::format("duplicate vehicle id {}", v.id));
  }
  return *vehicles.insert(pos, std::move(v));
}

Vehicle& World::vehicle(VehicleId id) {
  return const_cast<Vehicle&>(std::as_const(*this).vehicle(id));
}

const Vehicle& World::vehicle(VehicleId id) const {
  auto pos = std::lower_bound(vehicles.begin(), vehicles.end(), id,
                              [](const Vehicle& a, VehicleId i) { return a.id < i; });
  if (pos == vehicles.end() || pos->id != id) throw Error(fmt::format("no vehicle with id {}", id));
  return *pos;
}

const Vehicle* World::find(const std::string& name) const {
  for (const auto& v : vehicles) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

bool World::complete() const {
  return std::none_of(vehicles.begin(), vehicles.end(),
                      [](const Vehicle& v) { return v.mission->blocks_completion(); });
}

bool World::any_aborted() const {
  return std::any_of(vehicles.begin(), vehicles.end(),
                     [](const Vehicle& v) { return v.mission->phase() == mission::Phase::Aborted; });
}

void step_world(World& w) {
  const double now = w.clock.time();
  if (w.clock.control_tick()) control(w, now);

  const double next = static_cast<double>(w.clock.tick + 1) * w.clock.physics_dt();
  for (auto& v : w.vehicles) physics(w, v, now, next);

  w.channel.advance(next);

  trace::TraceRow row;
  row.tick = w.clock.tick + 1;
  row.time = next;
  for (const auto& v : w.vehicles) {
    row.id = v.id;
    row.position = v.state.position;
    row.orientation = v.state.orientation;
    row.lin_vel = v.state.lin_vel;
    row.ang_vel = v.state.ang_vel;
    row.command = v.command;
    row.shifter_position = v.actuators.shifter_position;
    row.phase = v.mission->phase();
    w.digest.write(row);
    for (auto* sink : w.sinks) sink->write(row);
  }

  ++w.clock.tick;
}

RunResult run(World& w, double duration) {
  RunResult result;
  if (!(duration > 0.0)) return result;

  const double dt = w.clock.physics_dt();
  const auto target = w.clock.tick + static_cast<std::uint64_t>(std::ceil(duration / dt - 1e-9));
  const std::uint64_t first = w.clock.tick;

  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  try {
    while (w.clock.tick < target) {
      if (w.options.stop_when_complete && w.clock.tick > first && w.clock.control_tick() && w.complete()) {
        result.status = RunStatus::MissionsComplete;
        break;
      }
      if (w.options.realtime) {
        const auto due = start + std::chrono::duration<double>(static_cast<double>(w.clock.tick - first) * dt);
        std::this_thread::sleep_until(std::chrono::time_point_cast<Clock::duration>(due));
      }
      step_world(w);
    }
  } catch (const GroundingError& e) {
    result.status = RunStatus::Grounded;
    result.diagnostic = e.what();
  } catch (const NumericError& e) {
    result.status = RunStatus::NumericFailure;
    result.diagnostic = e.what();
  }
  const double wall = std::chrono::duration<double>(Clock::now() - start).count();
  for (auto* sink : w.sinks) sink->flush();

  result.ticks = w.clock.tick - first;
  if (result.ticks > 0) {
    RtfReport r;
    r.sim_seconds = static_cast<double>(result.ticks) * dt;
    r.wall_seconds = std::max(wall, 1e-9);
    r.rtf = r.sim_seconds / r.wall_seconds;
    r.n_vehicles = w.vehicles.size();
    r.physics_dt = dt;
    result.rtf = r;
  }
  return result;
}

std::vector<RtfReport> rtf_sweep(const WorldFactory& make, const std::vector<std::size_t>& counts,
                                 const std::vector<double>& dts, double duration, int repeats) {
  std::vector<RtfReport> out;
  for (std::size_t n : counts) {
    for (double dt : dts) {
      std::optional<RtfReport> best;
      for (int k = 0; k < std::max(repeats, 1); ++k) {
        World w = make(n, dt);
        auto res = run(w, duration);
        if (res.status == RunStatus::Grounded || res.status == RunStatus::NumericFailure) {
          throw Error(fmt::format("rtf sweep run (n={}, dt={}) failed: {}", n, dt, res.diagnostic));
        }
        if (res.rtf && (!best || res.rtf->rtf > best->rtf)) best = res.rtf;
      }
      if (best) out.push_back(*best);
    }
  }
  return out;
}

void write_rtf_csv(const std::vector<RtfReport>& reports, std::ostream& out) {
  out << "n_vehicles,physics_dt,sim_seconds,wall_seconds,rtf\n";
  for (const auto& r : reports) {
    out << fmt::format("{},{},{},{},{}\n", r.n_vehicles, r.physics_dt, r.sim_seconds, r.wall_seconds, r.rtf);
  }
}

void write_phase_log(const World& w, std::ostream& out) {
  struct Line {
    double time;
    VehicleId id;
    const mission::PhaseTransition* t;
  };
  std::vector<Line> lines;
  for (const auto& v : w.vehicles) {
    for (const auto& t : v.mission->transitions()) lines.push_back({t.time, v.id, &t});
  }
  std::stable_sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) { return a.time < b.time; });
  out << "time,vehicle,from,to,reason\n";
  for (const auto& l : lines) {
    out << fmt::format("{},{},{},{},{}\n", l.time, w.vehicle(l.id).name.empty() ? std::to_string(l.id) : w.vehicle(l.id).name,
                       mission::to_string(l.t->from), mission::to_string(l.t->to), l.t->reason);
  }
}

void write_homing_log(const World& w, std::ostream& out) {
  out << "time,vehicle,range,azimuth\n";
  for (const auto& v : w.vehicles) {
    const auto* hb = dynamic_cast<const mission::HotBunkMission*>(v.mission.get());
    if (!hb) continue;
    for (const auto& s : hb->homing_trace()) {
      out << fmt::format("{},{},{},{}\n", s.time, v.name.empty() ? std::to_string(v.id) : v.name, s.range, s.azimuth);
    }
  }
}

}  // namespace auvsim::engine
