#include "auvsim/mission.hpp"

#include "auvsim/dynamics.hpp"
#include "auvsim/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

namespace auvsim::mission {

namespace {

constexpr std::array<std::pair<Phase, const char*>, 14> kPhaseNames{{
    {Phase::Idle, "Idle"},
    {Phase::Deployed, "Deployed"},
    {Phase::MidcourseGuidance, "MidcourseGuidance"},
    {Phase::TerminalHomingFast, "TerminalHomingFast"},
    {Phase::TerminalHomingSlow, "TerminalHomingSlow"},
    {Phase::AcousticHandshake, "AcousticHandshake"},
    {Phase::Done, "Done"},
    {Phase::Aborted, "Aborted"},
    {Phase::Sampling, "Sampling"},
    {Phase::Acknowledging, "Acknowledging"},
    {Phase::Surfacing, "Surfacing"},
    {Phase::Surfaced, "Surfaced"},
    {Phase::Descending, "Descending"},
    {Phase::Ascending, "Ascending"},
}};

// Fix timestamps are compared against control ticks computed as tick * dt.
constexpr double kTimeSlack = 1e-9;

bool relief_phase(Phase p) {
  switch (p) {
    case Phase::Deployed:
    case Phase::MidcourseGuidance:
    case Phase::TerminalHomingFast:
    case Phase::TerminalHomingSlow:
    case Phase::AcousticHandshake:
    case Phase::Done:
    case Phase::Aborted:
      return true;
    default:
      return false;
  }
}

bool sampling_phase(Phase p) {
  switch (p) {
    case Phase::Sampling:
    case Phase::Acknowledging:
    case Phase::Surfacing:
    case Phase::Surfaced:
    case Phase::Aborted:
      return true;
    default:
      return false;
  }
}

}  // namespace

const char* to_string(Phase phase) {
  for (const auto& [p, name] : kPhaseNames) {
    if (p == phase) return name;
  }
  return "Unknown";
}

std::optional<Phase> phase_from_string(const std::string& name) {
  for (const auto& [p, n] : kPhaseNames) {
    if (name == n) return p;
  }
  return std::nullopt;
}

ActuatorCommand limit(const ActuatorCommand& cmd, const dynamics::VehicleParams& params) {
  ActuatorCommand out = cmd;
  const double n_max = params.thruster.max_prop_speed;
  out.prop_speed = std::clamp(cmd.prop_speed, -n_max, n_max);
  out.rudder = std::clamp(cmd.rudder, -params.rudder.max_deflection, params.rudder.max_deflection);
  out.elevator =
      std::clamp(cmd.elevator, -params.elevator.max_deflection, params.elevator.max_deflection);
  out.shifter_target = std::clamp(cmd.shifter_target, params.shifter.travel_min, params.shifter.travel_max);
  return out;
}

std::vector<std::uint8_t> encode_message(MessageKind kind, VehicleId target, std::uint8_t attempt) {
  return {static_cast<std::uint8_t>(kind),
          static_cast<std::uint8_t>(target & 0xffu),
          static_cast<std::uint8_t>((target >> 8) & 0xffu),
          static_cast<std::uint8_t>((target >> 16) & 0xffu),
          static_cast<std::uint8_t>((target >> 24) & 0xffu),
          attempt};
}

std::optional<DecodedMessage> decode_message(const std::vector<std::uint8_t>& payload) {
  if (payload.size() != 6) return std::nullopt;
  const auto kind = static_cast<MessageKind>(payload[0]);
  if (kind != MessageKind::RelievedOfDuty && kind != MessageKind::Acknowledge) return std::nullopt;
  const VehicleId target = static_cast<VehicleId>(payload[1]) |
                           static_cast<VehicleId>(payload[2]) << 8 |
                           static_cast<VehicleId>(payload[3]) << 16 |
                           static_cast<VehicleId>(payload[4]) << 24;
  return DecodedMessage{kind, target, payload[5]};
}

// ---------------------------------------------------------------------------

Autopilot::Autopilot(const dynamics::VehicleParams& params, ControlGains gains)
    : params_(params), gains_(gains) {}

double Autopilot::rudder_for(const VehicleState& state, double heading_des) const {
  const double err = wrap_angle(heading_des - heading(state.orientation));
  const double r = state.ang_vel.z();
  const double lim = params_.rudder.max_deflection;
  return std::clamp(gains_.heading_kp * err - gains_.yaw_rate_kd * r, -lim, lim);
}

double Autopilot::elevator_for(const VehicleState& state, double depth_des) const {
  const double pitch_des =
      std::clamp(gains_.depth_kp * (state.depth() - depth_des), -gains_.max_pitch, gains_.max_pitch);
  // body q is nose-down positive
  const double q = state.ang_vel.y();
  const double lim = params_.elevator.max_deflection;
  return std::clamp(gains_.pitch_kp * (pitch_des - pitch_up(state.orientation)) + gains_.pitch_kd * q,
                    -lim, lim);
}

double Autopilot::prop_for(const VehicleState& state, double speed_des) const {
  auto it = prop_cache_.find(speed_des);
  if (it == prop_cache_.end()) {
    it = prop_cache_.emplace(speed_des, dynamics::prop_speed_for(speed_des, params_)).first;
  }
  const double n = it->second + gains_.speed_kp * (speed_des - state.lin_vel.x());
  return std::clamp(n, 0.0, params_.thruster.max_prop_speed);
}

// ---------------------------------------------------------------------------

void Mission::record(Phase from, Phase to, double now, std::string reason) {
  transitions_.push_back({now, from, to, std::move(reason)});
  phase_entered_ = now;
}

void HotBunkConfig::validate() const {
  if (role == Role::Relief) {
    if (!(r2 < r1)) throw ConfigError("hotbunk: r2 must be smaller than r1");
    if (!(success_radius <= r2)) throw ConfigError("hotbunk: success_radius must not exceed r2");
    if (!(slow_speed < fast_speed)) throw ConfigError("hotbunk: slow_speed must be below fast_speed");
    if (!(slow_speed > 0.0)) throw ConfigError("hotbunk: slow_speed must be positive");
    if (!(fix_period > 0.0)) throw ConfigError("hotbunk: fix_period must be positive");
    if (!(handshake_timeout > 0.0)) throw ConfigError("hotbunk: handshake_timeout must be positive");
    if (max_retries < 0 || max_retries > 250) throw ConfigError("hotbunk: max_retries must be in [0, 250]");
    if (self == partner) throw ConfigError("hotbunk: partner must be another vehicle");
  }
  if (!(waypoint_tolerance > 0.0)) throw ConfigError("hotbunk: waypoint_tolerance must be positive");
  if (!(drift_sigma >= 0.0)) throw ConfigError("hotbunk: drift_sigma must be >= 0");
  for (const auto& [phase, t] : phase_timeouts) {
    if (!(t > 0.0)) throw ConfigError(std::string("hotbunk: timeout for ") + to_string(phase) + " must be positive");
  }
}

HotBunkMission::HotBunkMission(HotBunkConfig cfg, const dynamics::VehicleParams& params)
    : cfg_(std::move(cfg)),
      pilot_(params, cfg_.gains),
      phase_(cfg_.role == Role::Relief ? Phase::Deployed : Phase::Sampling),
      rng_(cfg_.seed) {
  cfg_.validate();
}

bool HotBunkMission::terminal() const {
  return phase_ == Phase::Done || phase_ == Phase::Aborted || phase_ == Phase::Surfaced;
}

bool HotBunkMission::blocks_completion() const {
  if (cfg_.role == Role::Sampling) return phase_ == Phase::Acknowledging || phase_ == Phase::Surfacing;
  return !terminal();
}

void HotBunkMission::change(Phase next, double now, std::string reason) {
  record(phase_, next, now, std::move(reason));
  phase_ = next;
}

void HotBunkMission::abort(double now, std::string reason) {
  abort_reason_ = reason;
  change(Phase::Aborted, now, std::move(reason));
}

bool HotBunkMission::timed_out(double now) const {
  auto it = cfg_.phase_timeouts.find(phase_);
  return it != cfg_.phase_timeouts.end() && now - phase_entered_ > it->second;
}

ActuatorCommand HotBunkMission::cruise(const VehicleState& state, double heading_des,
                                       double speed) const {
  ActuatorCommand cmd;
  cmd.prop_speed = pilot_.prop_for(state, speed);
  cmd.rudder = pilot_.rudder_for(state, heading_des);
  cmd.elevator = pilot_.elevator_for(state, cfg_.transit_depth);
  return cmd;
}

void HotBunkMission::take_fixes(const MissionInputs& in) {
  for (const auto& fix : in.fixes) {
    if (fix.beacon != cfg_.partner) continue;
    if (last_fix_ && fix.fix_time < last_fix_->fix_time) continue;
    last_fix_ = fix;
    homing_.push_back({in.now, fix.range, wrap_angle(fix.azimuth - heading(in.state.orientation))});
  }
}

MissionOutputs HotBunkMission::step(const MissionInputs& in) {
  if (cfg_.role == Role::Relief ? !relief_phase(phase_) : !sampling_phase(phase_)) {
    throw Error(std::string("hot-bunk automaton in phase ") + to_string(phase_) +
                " which does not exist for its role");
  }
  return cfg_.role == Role::Relief ? step_relief(in) : step_sampling(in);
}

MissionOutputs HotBunkMission::step_relief(const MissionInputs& in) {
  MissionOutputs out;
  const double now = in.now;
  const auto& state = in.state;

  if (phase_ == Phase::Deployed) {
    change(Phase::MidcourseGuidance, now, "deployed");
    last_step_ = now;
  }
  if (phase_ == Phase::Done || phase_ == Phase::Aborted) return out;
  if (timed_out(now)) {
    abort(now, to_string(phase_));
    return out;
  }

  if (phase_ == Phase::MidcourseGuidance) {
    if (cfg_.drift_sigma > 0.0 && now > last_step_) {
      std::normal_distribution<double> n(0.0, cfg_.drift_sigma * std::sqrt(now - last_step_));
      drift_.x() += n(rng_);
      drift_.y() += n(rng_);
    }
    last_step_ = now;
    const Vec3 estimate = state.position + drift_;
    const Vec3 to_wp = cfg_.waypoint - estimate;
    if (std::hypot(to_wp.x(), to_wp.y()) <= cfg_.waypoint_tolerance) {
      change(Phase::TerminalHomingFast, now, "waypoint reached");
    } else {
      heading_cmd_ = std::atan2(to_wp.y(), to_wp.x());
      heading_set_ = true;
      out.command = cruise(state, heading_cmd_, cfg_.fast_speed);
      return out;
    }
  }

  // Terminal homing and handshake share pure pursuit on the latest fix.
  if (now - last_fix_request_ >= cfg_.fix_period - kTimeSlack) {
    out.fix_request = cfg_.partner;
    last_fix_request_ = now;
  }
  take_fixes(in);

  const bool fresh = last_fix_ && now - last_fix_->fix_time <= 3.0 * cfg_.fix_period + kTimeSlack;
  stale_ = !fresh;
  if (fresh) {
    heading_cmd_ = pure_pursuit(*last_fix_);
    heading_set_ = true;
  } else if (!heading_set_) {
    heading_cmd_ = heading(state.orientation);
    heading_set_ = true;
  }

  if (fresh && phase_ == Phase::TerminalHomingFast && last_fix_->range <= cfg_.r1) {
    change(Phase::TerminalHomingSlow, now, "range <= r1");
  }
  if (fresh && phase_ == Phase::TerminalHomingSlow && last_fix_->range <= cfg_.r2) {
    change(Phase::AcousticHandshake, now, "range <= r2");
    attempts_ = 1;
    last_send_ = now;
    out.outbox.push_back(encode_message(MessageKind::RelievedOfDuty, cfg_.partner, 1));
  } else if (phase_ == Phase::AcousticHandshake) {
    for (const auto& msg : in.inbox) {
      auto m = decode_message(msg.payload);
      if (m && msg.sender == cfg_.partner && m->kind == MessageKind::Acknowledge && m->target == cfg_.self) {
        change(Phase::Done, now, "acknowledged");
        return out;
      }
    }
    if (now - last_send_ >= cfg_.handshake_timeout - kTimeSlack) {
      if (attempts_ > cfg_.max_retries) {
        abort(now, "handshake_timeout");
        return out;
      }
      ++attempts_;
      last_send_ = now;
      out.outbox.push_back(encode_message(MessageKind::RelievedOfDuty, cfg_.partner,
                                          static_cast<std::uint8_t>(attempts_)));
    }
  }

  const double speed = phase_ == Phase::TerminalHomingFast ? cfg_.fast_speed : cfg_.slow_speed;
  out.command = cruise(state, heading_cmd_, speed);
  return out;
}

MissionOutputs HotBunkMission::step_sampling(const MissionInputs& in) {
  MissionOutputs out;
  const double now = in.now;
  const auto& state = in.state;
  if (phase_ == Phase::Aborted) return out;

  bool relieved = false;
  std::uint8_t attempt = 0;
  for (const auto& msg : in.inbox) {
    auto m = decode_message(msg.payload);
    if (m && m->kind == MessageKind::RelievedOfDuty && m->target == cfg_.self) {
      relieved = true;
      attempt = m->attempt;
    }
  }
  if (timed_out(now)) {
    abort(now, to_string(phase_));
    return out;
  }

  switch (phase_) {
    case Phase::Sampling:
      if (relieved) {
        change(Phase::Acknowledging, now, "relieved of duty");
        out.outbox.push_back(encode_message(MessageKind::Acknowledge, cfg_.partner, attempt));
        ack_sent_ = true;
      }
      return out;
    case Phase::Acknowledging:
      change(Phase::Surfacing, now, "ack sent");
      heading_cmd_ = heading(state.orientation);
      break;
    case Phase::Surfacing:
    case Phase::Surfaced:
      break;
    default:
      throw Error(std::string("sampling vehicle cannot be in phase ") + to_string(phase_));
  }

  // Late duplicates mean our ack was lost; answer again.
  if (relieved && ack_sent_) {
    out.outbox.push_back(encode_message(MessageKind::Acknowledge, cfg_.partner, attempt));
  }
  if (phase_ == Phase::Surfacing && state.depth() <= cfg_.surface_depth) {
    change(Phase::Surfaced, now, "at surface");
  }
  if (phase_ == Phase::Surfacing) {
    out.command.prop_speed = pilot_.prop_for(state, cfg_.ascent_speed);
    out.command.rudder = pilot_.rudder_for(state, heading_cmd_);
    out.command.elevator = pilot_.elevator_for(state, 0.0);
  }
  return out;
}

// ---------------------------------------------------------------------------

void YoyoConfig::validate(const dynamics::VehicleParams& params) const {
  if (!(depth_min < depth_max)) throw ConfigError("yoyo: depth_min must be smaller than depth_max");
  if (!(speed > 0.0)) throw ConfigError("yoyo: speed must be positive");
  if (std::abs(rudder_bias) > params.rudder.max_deflection) {
    throw ConfigError("yoyo: rudder_bias exceeds the rudder's max deflection");
  }
  if (elevator > params.elevator.max_deflection) {
    throw ConfigError("yoyo: elevator exceeds the elevator's max deflection");
  }
  if (shifter < 0.0 || shifter > params.shifter.travel_max || -shifter < params.shifter.travel_min) {
    throw ConfigError("yoyo: shifter magnitude outside the shifter travel");
  }
  if (floor_clearance < 0.0) throw ConfigError("yoyo: floor_clearance must be >= 0");
}

ActuatorCommand yoyo_step(Phase& phase, const VehicleState& state, const YoyoConfig& cfg,
                          const Autopilot& pilot, double altitude) {
  double lower = cfg.depth_max;
  if (cfg.floor_clearance > 0.0 && std::isfinite(altitude)) {
    lower = std::min(lower, state.depth() + altitude - cfg.floor_clearance);
  }
  if (phase == Phase::Descending && state.depth() >= lower) {
    phase = Phase::Ascending;
  } else if (phase == Phase::Ascending && state.depth() <= cfg.depth_min) {
    phase = Phase::Descending;
  } else if (phase != Phase::Descending && phase != Phase::Ascending) {
    throw Error(std::string("yo-yo in phase ") + to_string(phase));
  }

  const double elevator =
      cfg.elevator < 0.0 ? pilot.params().elevator.max_deflection : cfg.elevator;
  const double dir = phase == Phase::Descending ? 1.0 : -1.0;
  ActuatorCommand cmd;
  cmd.prop_speed = pilot.prop_for(state, cfg.speed);
  cmd.rudder = cfg.rudder_bias;
  cmd.elevator = -dir * elevator;
  cmd.shifter_target = dir * cfg.shifter;
  return cmd;
}

YoyoMission::YoyoMission(YoyoConfig cfg, const dynamics::VehicleParams& params)
    : cfg_(std::move(cfg)), pilot_(params, cfg_.gains) {
  cfg_.validate(params);
}

MissionOutputs YoyoMission::step(const MissionInputs& in) {
  const Phase before = phase_;
  MissionOutputs out;
  out.command = yoyo_step(phase_, in.state, cfg_, pilot_, in.altitude);
  if (phase_ != before) {
    record(before, phase_, in.now, phase_ == Phase::Ascending ? "lower bound" : "upper bound");
  }
  return out;
}

}  // namespace auvsim::mission
