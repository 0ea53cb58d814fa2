#include "auvsim/scenario.hpp"

#include "auvsim/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <map>
#include <set>

namespace auvsim::scenario {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

[[noreturn]] void fail(const ConfigDocument& doc, const ConfigSection& sec, const std::string& key,
                       const std::string& msg) {
  throw ConfigError(msg, sec.line_of(key), doc.source());
}

mission::ControlGains parse_gains(const ConfigSection& s) {
  mission::ControlGains g;
  g.heading_kp = s.get_double("heading_kp", g.heading_kp);
  g.yaw_rate_kd = s.get_double("yaw_rate_kd", g.yaw_rate_kd);
  g.depth_kp = s.get_double("depth_kp", g.depth_kp);
  g.max_pitch = s.get_double("max_pitch", g.max_pitch);
  g.pitch_kp = s.get_double("pitch_kp", g.pitch_kp);
  g.pitch_kd = s.get_double("pitch_kd", g.pitch_kd);
  g.speed_kp = s.get_double("speed_kp", g.speed_kp);
  return g;
}

void parse_hotbunk(const ConfigDocument& doc, const std::string& prefix, VehicleSpec& v) {
  const auto& s = doc.section(prefix + ".hotbunk");
  auto& h = v.hotbunk;
  const auto role = s.get_string("role");
  if (role == "relief") {
    h.role = mission::Role::Relief;
  } else if (role == "sampling") {
    h.role = mission::Role::Sampling;
  } else {
    fail(doc, s, "role", "role must be 'relief' or 'sampling', got '" + role + "'");
  }
  v.partner = s.get_string("partner");
  h.waypoint = s.get_vec3("waypoint", h.waypoint);
  h.waypoint_tolerance = s.get_double("waypoint_tolerance", h.waypoint_tolerance);
  h.r1 = s.get_double("r1", h.r1);
  h.r2 = s.get_double("r2", h.r2);
  h.success_radius = s.get_double("success_radius", h.success_radius);
  h.fast_speed = s.get_double("fast_speed", h.fast_speed);
  h.slow_speed = s.get_double("slow_speed", h.slow_speed);
  h.transit_depth = s.get_double("transit_depth", h.transit_depth);
  h.fix_period = s.get_double("fix_period", h.fix_period);
  h.handshake_timeout = s.get_double("handshake_timeout", h.handshake_timeout);
  h.max_retries = static_cast<int>(s.get_int("max_retries", h.max_retries));
  h.drift_sigma = s.get_double("drift_sigma", h.drift_sigma);
  h.surface_depth = s.get_double("surface_depth", h.surface_depth);
  h.ascent_speed = s.get_double("ascent_speed", h.ascent_speed);

  const auto& t = doc.section_or_empty(prefix + ".hotbunk.timeouts");
  for (const auto& [key, entry] : t.entries()) {
    auto phase = mission::phase_from_string(key);
    if (!phase) throw ConfigError("unknown phase '" + key + "' in timeouts", entry.line, doc.source());
    h.phase_timeouts[*phase] = t.get_double(key);
  }
}

void parse_yoyo(const ConfigDocument& doc, const std::string& prefix, VehicleSpec& v) {
  const auto& s = doc.section(prefix + ".yoyo");
  auto& y = v.yoyo;
  y.depth_min = s.get_double("depth_min", y.depth_min);
  y.depth_max = s.get_double("depth_max", y.depth_max);
  y.rudder_bias = s.get_double("rudder_bias", y.rudder_bias);
  y.speed = s.get_double("speed", y.speed);
  y.elevator = s.get_double("elevator", y.elevator);
  y.shifter = s.get_double("shifter", y.shifter);
  y.floor_clearance = s.get_double("floor_clearance", y.floor_clearance);
}

FaultSpec parse_fault(const ConfigDocument& doc, const ConfigSection& s) {
  FaultSpec f;
  const auto comp = s.get_string("component");
  auto c = engine::component_from_string(comp);
  if (!c) fail(doc, s, "component", "unknown component '" + comp + "'");
  f.component = *c;
  if (s.has("at")) f.at_time = s.get_double("at");
  if (s.has("phase")) {
    const auto name = s.get_string("phase");
    auto p = mission::phase_from_string(name);
    if (!p) fail(doc, s, "phase", "unknown phase '" + name + "'");
    f.at_phase = p;
  }
  f.phase_of = s.get_string("phase_of", "");
  if (f.at_time.has_value() == f.at_phase.has_value()) {
    throw ConfigError("fault needs exactly one of 'at' or 'phase'", s.line(), doc.source());
  }
  if (!f.phase_of.empty() && !f.at_phase) fail(doc, s, "phase_of", "phase_of needs 'phase'");
  return f;
}

}  // namespace

ScenarioConfig parse_scenario(const ConfigDocument& doc, const std::filesystem::path& base_dir) {
  ScenarioConfig cfg;
  cfg.source = doc.source();

  const auto& world = doc.section_or_empty("world");
  cfg.seed = static_cast<std::uint64_t>(world.get_int("seed", 0));
  const auto grounding = world.get_string("grounding", "terminal");
  if (grounding != "terminal" && grounding != "warn") {
    fail(doc, world, "grounding", "grounding must be 'terminal' or 'warn'");
  }
  cfg.grounding_terminal = grounding == "terminal";

  const auto& ch = doc.section_or_empty("world.channel");
  auto& cp = cfg.channel;
  cp.sound_speed = ch.get_double("sound_speed", cp.sound_speed);
  cp.max_range = ch.get_double("max_range", cp.max_range);
  const auto model = ch.get_string("drop_model", "hard");
  if (model == "hard") {
    cp.drop_model = acoustics::DropModel::HardCutoff;
  } else if (model == "linear") {
    cp.drop_model = acoustics::DropModel::Linear;
  } else {
    fail(doc, ch, "drop_model", "drop_model must be 'hard' or 'linear'");
  }
  const auto mtu = ch.get_int("mtu", static_cast<long long>(cp.mtu));
  if (mtu <= 0) fail(doc, ch, "mtu", "mtu must be positive");
  cp.mtu = static_cast<std::size_t>(mtu);
  cp.p_contention = ch.get_double("p_contention", cp.p_contention);
  cp.fix_busy_time = ch.get_double("fix_busy_time", cp.fix_busy_time);
  cp.sigma_range = ch.get_double("sigma_range", cp.sigma_range);
  cp.sigma_azimuth = ch.get_double("sigma_azimuth", cp.sigma_azimuth);
  cp.seed = cfg.seed;
  if (!(cp.sound_speed > 0.0)) fail(doc, ch, "sound_speed", "sound_speed must be positive");
  if (cp.p_contention < 0.0 || cp.p_contention > 1.0) {
    fail(doc, ch, "p_contention", "p_contention must be in [0, 1]");
  }

  const auto& env = doc.section_or_empty("world.env");
  cfg.current_east = resolve(base_dir, env.get_string("current_east", ""));
  cfg.current_north = resolve(base_dir, env.get_string("current_north", ""));
  cfg.current_up = resolve(base_dir, env.get_string("current_up", ""));
  const auto proj = env.get_string("projection", "none");
  if (proj == "equirectangular") {
    cfg.projection = env::Projection::equirectangular(env.get_double("lat0"), env.get_double("lon0"));
  } else if (proj != "none") {
    fail(doc, env, "projection", "projection must be 'none' or 'equirectangular'");
  }

  const auto& bathy = doc.section_or_empty("world.bathymetry");
  cfg.bathymetry_manifest = resolve(base_dir, bathy.get_string("manifest", ""));
  const auto resident = bathy.get_int("max_resident", 9);
  if (resident < 1) fail(doc, bathy, "max_resident", "max_resident must be >= 1");
  cfg.max_resident_tiles = static_cast<std::size_t>(resident);

  const auto& run = doc.section_or_empty("run");
  cfg.duration = run.get_double("duration", cfg.duration);
  cfg.physics_dt = run.get_double("dt", cfg.physics_dt);
  cfg.control_period = run.get_double("control_period", cfg.control_period);
  cfg.stop_when_complete = run.get_bool("stop_when_complete", cfg.stop_when_complete);
  cfg.realtime = run.get_bool("realtime", cfg.realtime);
  cfg.trace_csv = resolve(base_dir, run.get_string("trace_csv", ""));
  cfg.trace_bin = resolve(base_dir, run.get_string("trace_bin", ""));
  cfg.event_log = resolve(base_dir, run.get_string("event_log", ""));
  cfg.phase_log = resolve(base_dir, run.get_string("phase_log", ""));
  cfg.homing_log = resolve(base_dir, run.get_string("homing_log", ""));
  if (cfg.duration < 0.0) fail(doc, run, "duration", "duration must be >= 0");
  if (!(cfg.physics_dt > 0.0) || cfg.physics_dt > 0.05) fail(doc, run, "dt", "dt must be in (0, 0.05]");

  std::set<VehicleId> ids;
  VehicleId next_id = 1;
  for (const auto& prefix : doc.children("vehicle")) {
    const auto& s = doc.section(prefix);
    VehicleSpec v;
    v.name = prefix.substr(std::string("vehicle.").size());
    v.id = static_cast<VehicleId>(s.get_int("id", next_id));
    if (!ids.insert(v.id).second) fail(doc, s, "id", fmt::format("duplicate vehicle id {}", v.id));
    next_id = std::max(next_id, v.id + 1);

    v.params_source = s.get_string("params", "reference");
    if (v.params_source == "reference") {
      v.params = dynamics::reference_vehicle();
    } else {
      v.params = dynamics::load_vehicle_params(resolve(base_dir, v.params_source));
    }
    v.position = s.get_vec3("position", v.position);
    v.heading = deg2rad(s.get_double("heading_deg", 0.0));
    v.pitch = deg2rad(s.get_double("pitch_deg", 0.0));

    const auto mission = s.get_string("mission", "none");
    const auto gains = parse_gains(doc.section_or_empty(prefix + ".control"));
    if (mission == "hotbunk") {
      v.mission = MissionKind::HotBunk;
      parse_hotbunk(doc, prefix, v);
      v.hotbunk.gains = gains;
    } else if (mission == "yoyo") {
      v.mission = MissionKind::Yoyo;
      parse_yoyo(doc, prefix, v);
      v.yoyo.gains = gains;
    } else if (mission != "none") {
      fail(doc, s, "mission", "mission must be 'none', 'hotbunk' or 'yoyo'");
    }
    for (const auto& fsec : doc.children(prefix + ".fault")) {
      v.faults.push_back(parse_fault(doc, doc.section(fsec)));
    }
    cfg.vehicles.push_back(std::move(v));
  }

  doc.reject_unused();

  auto known = [&](const std::string& name) {
    return std::any_of(cfg.vehicles.begin(), cfg.vehicles.end(),
                       [&](const VehicleSpec& v) { return v.name == name; });
  };
  for (const auto& v : cfg.vehicles) {
    if (v.mission == MissionKind::HotBunk && !known(v.partner)) {
      throw ConfigError("vehicle '" + v.name + "': unknown partner '" + v.partner + "'", 0, doc.source());
    }
    for (const auto& f : v.faults) {
      if (!f.phase_of.empty() && !known(f.phase_of)) {
        throw ConfigError("vehicle '" + v.name + "': fault watches unknown vehicle '" + f.phase_of + "'", 0,
                          doc.source());
      }
    }
  }
  cfg.effective = doc.dump();
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  auto doc = ConfigDocument::load(path);
  for (const auto& o : overrides) doc.apply_override(o);
  return parse_scenario(doc, path.parent_path());
}

engine::World build_world(const ScenarioConfig& cfg) {
  engine::World w;
  w.clock = engine::SimClock(cfg.physics_dt, cfg.control_period);
  w.channel = acoustics::AcousticChannel(cfg.channel);
  w.options.grounding_terminal = cfg.grounding_terminal;
  w.options.stop_when_complete = cfg.stop_when_complete;
  w.options.realtime = cfg.realtime;

  auto grid = [&](const std::filesystem::path& p, const char* name) -> std::shared_ptr<const env::EnvGrid> {
    if (p.empty()) return nullptr;
    return std::make_shared<const env::EnvGrid>(env::load_env(p, cfg.projection, name));
  };
  w.current.east = grid(cfg.current_east, "current_east");
  w.current.north = grid(cfg.current_north, "current_north");
  w.current.up = grid(cfg.current_up, "current_up");
  if (!cfg.bathymetry_manifest.empty()) {
    w.bathymetry.emplace(bathy::TileSet::open(cfg.bathymetry_manifest, cfg.max_resident_tiles));
  }

  std::map<std::string, VehicleId> ids;
  for (const auto& v : cfg.vehicles) ids[v.name] = v.id;

  for (const auto& spec : cfg.vehicles) {
    engine::Vehicle v;
    v.id = spec.id;
    v.name = spec.name;
    v.params = spec.params;
    v.state.position = spec.position;
    v.state.orientation = orientation_from(spec.heading, spec.pitch);
    switch (spec.mission) {
      case MissionKind::None:
        break;
      case MissionKind::HotBunk: {
        auto h = spec.hotbunk;
        h.self = spec.id;
        h.partner = ids.at(spec.partner);
        h.seed = cfg.seed ^ (0x9e3779b97f4a7c15ull * (spec.id + 1));
        v.mission = std::make_unique<mission::HotBunkMission>(h, spec.params);
        break;
      }
      case MissionKind::Yoyo:
        v.mission = std::make_unique<mission::YoyoMission>(spec.yoyo, spec.params);
        break;
    }
    for (const auto& f : spec.faults) {
      engine::Fault fault;
      fault.component = f.component;
      fault.at_time = f.at_time;
      fault.at_phase = f.at_phase;
      if (!f.phase_of.empty()) fault.phase_of = ids.at(f.phase_of);
      v.faults.push_back(fault);
    }
    w.add_vehicle(std::move(v));
  }
  return w;
}

ScenarioConfig replicate(const ScenarioConfig& base, std::size_t n, double spacing) {
  if (base.vehicles.empty()) throw ConfigError("scenario has no vehicle to replicate");
  const VehicleSpec& proto = base.vehicles.front();
  if (proto.mission == MissionKind::HotBunk) throw ConfigError("hot-bunk vehicles cannot be replicated");
  ScenarioConfig out = base;
  out.vehicles.clear();
  for (std::size_t k = 0; k < n; ++k) {
    VehicleSpec v = proto;
    v.id = static_cast<VehicleId>(k + 1);
    v.name = fmt::format("{}_{}", proto.name, k + 1);
    v.position.x() += spacing * static_cast<double>(k);
    out.vehicles.push_back(std::move(v));
  }
  return out;
}

}  // namespace auvsim::scenario
