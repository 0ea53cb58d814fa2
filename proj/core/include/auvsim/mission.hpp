#pragma once

#include "auvsim/acoustics.hpp"
#include "auvsim/types.hpp"
#include "auvsim/vehicle_params.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace auvsim::mission {

struct ActuatorCommand {
  double prop_speed = 0.0;      // rev/s
  double rudder = 0.0;          // rad
  double elevator = 0.0;        // rad
  double shifter_target = 0.0;  // m
};

/// Clamps every channel to the vehicle's actuator limits.
ActuatorCommand limit(const ActuatorCommand& cmd, const dynamics::VehicleParams& params);

enum class Phase : std::uint8_t {
  Idle,
  // relief vehicle
  Deployed,
  MidcourseGuidance,
  TerminalHomingFast,
  TerminalHomingSlow,
  AcousticHandshake,
  Done,
  Aborted,
  // sampling vehicle
  Sampling,
  Acknowledging,
  Surfacing,
  Surfaced,
  // yo-yo
  Descending,
  Ascending,
};

const char* to_string(Phase phase);
std::optional<Phase> phase_from_string(const std::string& name);

enum class Role { Relief, Sampling };

struct PhaseTransition {
  double time = 0.0;
  Phase from = Phase::Idle;
  Phase to = Phase::Idle;
  std::string reason;
};

/// One point of the terminal homing polar plot.
struct HomingSample {
  double time = 0.0;
  double range = 0.0;
  double azimuth = 0.0;  // bearing to the partner relative to the RV's heading, rad
};

struct ControlGains {
  double heading_kp = 1.0;    // rad rudder per rad heading error
  double yaw_rate_kd = 2.0;   // rad rudder per rad/s yaw rate
  double depth_kp = 0.08;     // rad pitch per m depth error
  double max_pitch = 0.26;    // rad, pitch command limit for depth keeping
  double pitch_kp = 2.0;      // rad elevator per rad pitch error
  double pitch_kd = 1.5;      // rad elevator per rad/s pitch rate
  double speed_kp = 2.0;      // rev/s per m/s speed error
};

/// Everything a mission sees on a control tick.
struct MissionInputs {
  VehicleState state;
  double now = 0.0;
  std::vector<acoustics::AcousticMessage> inbox;
  std::vector<acoustics::LocalizationFix> fixes;
  double altitude = std::numeric_limits<double>::quiet_NaN();  // NaN when unknown
};

struct MissionOutputs {
  ActuatorCommand command;
  std::vector<std::vector<std::uint8_t>> outbox;
  std::optional<VehicleId> fix_request;
};

/// Low-level steering shared by the missions.
class Autopilot {
 public:
  Autopilot(const dynamics::VehicleParams& params, ControlGains gains);

  double rudder_for(const VehicleState& state, double heading_des) const;
  double elevator_for(const VehicleState& state, double depth_des) const;
  double prop_for(const VehicleState& state, double speed_des) const;

  const ControlGains& gains() const { return gains_; }
  const dynamics::VehicleParams& params() const { return params_; }

 private:
  dynamics::VehicleParams params_;
  ControlGains gains_;
  mutable std::map<double, double> prop_cache_;
};

/// Heading command from a fix: the measured global azimuth to the beacon.
inline double pure_pursuit(const acoustics::LocalizationFix& fix) { return fix.azimuth; }

// Acoustic payloads: [kind, target id (u32 LE), attempt]
enum class MessageKind : std::uint8_t { RelievedOfDuty = 'R', Acknowledge = 'A' };
std::vector<std::uint8_t> encode_message(MessageKind kind, VehicleId target, std::uint8_t attempt);
struct DecodedMessage {
  MessageKind kind;
  VehicleId target;
  std::uint8_t attempt;
};
std::optional<DecodedMessage> decode_message(const std::vector<std::uint8_t>& payload);

class Mission {
 public:
  virtual ~Mission() = default;

  virtual MissionOutputs step(const MissionInputs& in) = 0;
  virtual Phase phase() const = 0;
  /// True once the mission can no longer change on its own.
  virtual bool terminal() const = 0;
  /// Whether the run must keep going for this vehicle's sake.
  virtual bool blocks_completion() const { return !terminal(); }
  virtual std::string abort_reason() const { return {}; }

  const std::vector<PhaseTransition>& transitions() const { return transitions_; }

 protected:
  void record(Phase from, Phase to, double now, std::string reason);
  double phase_entered_ = 0.0;
  std::vector<PhaseTransition> transitions_;
};

/// No actuation at all.
class IdleMission final : public Mission {
 public:
  MissionOutputs step(const MissionInputs&) override { return {}; }
  Phase phase() const override { return Phase::Idle; }
  bool terminal() const override { return true; }
};

struct HotBunkConfig {
  Role role = Role::Relief;
  VehicleId self = 0;
  VehicleId partner = 0;

  Vec3 waypoint = Vec3::Zero();    // midcourse goal, world frame
  double waypoint_tolerance = 15;  // m, horizontal
  double r1 = 200.0;               // slow-down range
  double r2 = 50.0;                // handshake range
  double success_radius = 20.0;
  double fast_speed = 1.0;         // m/s
  double slow_speed = 0.8;         // m/s
  double transit_depth = 20.0;     // m
  double fix_period = 2.0;         // s
  double handshake_timeout = 10.0; // s per attempt
  int max_retries = 3;
  std::map<Phase, double> phase_timeouts;  // absent: no limit
  double drift_sigma = 0.0;        // m/sqrt(s) random walk on the midcourse position estimate
  std::uint64_t seed = 0;

  // sampling vehicle
  double surface_depth = 1.0;  // m, Surfaced below this depth
  double ascent_speed = 1.0;   // m/s while surfacing

  ControlGains gains;

  /// Throws ConfigError when the ranges or speeds are inconsistent.
  void validate() const;
};

/// Relief/sampling hot-bunk automaton.
class HotBunkMission final : public Mission {
 public:
  HotBunkMission(HotBunkConfig cfg, const dynamics::VehicleParams& params);

  MissionOutputs step(const MissionInputs& in) override;
  Phase phase() const override { return phase_; }
  bool terminal() const override;
  bool blocks_completion() const override;
  std::string abort_reason() const override { return abort_reason_; }

  const HotBunkConfig& config() const { return cfg_; }
  const std::vector<HomingSample>& homing_trace() const { return homing_; }
  /// Heading command of the last step.
  double heading_command() const { return heading_cmd_; }
  bool fix_stale() const { return stale_; }
  const std::optional<acoustics::LocalizationFix>& last_fix() const { return last_fix_; }
  int attempts() const { return attempts_; }

 private:
  MissionOutputs step_relief(const MissionInputs& in);
  MissionOutputs step_sampling(const MissionInputs& in);
  void change(Phase next, double now, std::string reason);
  void abort(double now, std::string reason);
  bool timed_out(double now) const;
  ActuatorCommand cruise(const VehicleState& state, double heading, double speed) const;
  void take_fixes(const MissionInputs& in);

  HotBunkConfig cfg_;
  Autopilot pilot_;
  Phase phase_;
  std::string abort_reason_;

  std::optional<acoustics::LocalizationFix> last_fix_;
  double last_fix_request_ = -std::numeric_limits<double>::infinity();
  double heading_cmd_ = 0.0;
  bool heading_set_ = false;
  bool stale_ = false;

  int attempts_ = 0;
  double last_send_ = 0.0;
  bool ack_sent_ = false;

  Vec3 drift_ = Vec3::Zero();
  double last_step_ = 0.0;
  std::mt19937_64 rng_;

  std::vector<HomingSample> homing_;
};

struct YoyoConfig {
  double depth_min = 5.0;     // m
  double depth_max = 40.0;    // m
  double rudder_bias = 0.1;   // rad
  double speed = 1.0;         // m/s
  double elevator = -1.0;     // rad magnitude; negative = the elevator's max deflection
  double shifter = 0.02;      // m magnitude
  double floor_clearance = 0.0;  // m; with bathymetry the lower bound never comes closer
  ControlGains gains;

  void validate(const dynamics::VehicleParams& params) const;
};

/// Constant-rudder circling with dive/climb flips at the depth bounds.
class YoyoMission final : public Mission {
 public:
  YoyoMission(YoyoConfig cfg, const dynamics::VehicleParams& params);

  MissionOutputs step(const MissionInputs& in) override;
  Phase phase() const override { return phase_; }
  bool terminal() const override { return false; }
  const YoyoConfig& config() const { return cfg_; }

 private:
  YoyoConfig cfg_;
  Autopilot pilot_;
  Phase phase_ = Phase::Descending;
};

/// Single-step form of the yo-yo law for callers that keep the phase themselves.
ActuatorCommand yoyo_step(Phase& phase, const VehicleState& state, const YoyoConfig& cfg,
                          const Autopilot& pilot, double altitude);

}  // namespace auvsim::mission
