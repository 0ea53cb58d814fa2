#pragma once

#include "auvsim/scenario.hpp"
#include "auvsim/types.hpp"
#include "auvsim/vehicle_params.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace auvsim::validation {

struct TerminalSpeed {
  double speed = 0.0;   // surge speed at the end, m/s
  double thrust = 0.0;  // thrust at that speed, N
  bool diverged = false;
  bool settled = false;
};

/// Full thrust from rest, straight and level.
TerminalSpeed measure_terminal_speed(const dynamics::VehicleParams& params, double dt = 0.02,
                                     double duration = 150.0);

struct Oscillation {
  std::vector<double> peaks;  // |pitch| extremum of each half swing, rad
  int sign_changes = 0;
  double max_abs_pitch = 0.0;
  double energy_drift = 0.0;  // max |E - E0| / E0
};

/// Releases the vehicle from rest at nose-up pitch `theta0` with only weight
/// and buoyancy acting (plus damping when `damped`), for `periods` small
/// oscillation periods.
Oscillation measure_pitch_oscillation(const dynamics::VehicleParams& params, double theta0, double dt,
                                      double periods, bool damped);

struct Circle {
  Vec3 center = Vec3::Zero();  // z unused
  double radius = 0.0;
  double rms_residual = 0.0;
};

/// Least-squares circle through the horizontal projection of `points`.
Circle fit_circle(const std::vector<Vec3>& points);

struct Turn {
  Circle circle;
  double yaw_rate_mean = 0.0;
  double yaw_rate_cv = 0.0;
  double speed = 0.0;
};

/// Constant rudder at the propeller speed that holds `speed` straight ahead.
Turn measure_turn(const dynamics::VehicleParams& params, double rudder, double speed, double dt = 0.02,
                  double settle = 120.0, double window = 240.0);

struct SteadyPitch {
  double pitch_up = 0.0;  // rad, mean over the last seconds
  double speed = 0.0;
};

/// Constant elevator at propeller speed `prop_speed`, starting from `speed`.
SteadyPitch measure_steady_pitch(const dynamics::VehicleParams& params, double elevator, double prop_speed,
                                 double speed, double dt = 0.02, double duration = 200.0);

/// Settled nose-down pitch with the shifter held at `d`, vehicle at rest.
double measure_shifter_pitch(const dynamics::VehicleParams& params, double d, double dt = 0.02,
                             double duration = 200.0);

struct OpenLoopPath {
  Vec3 end = Vec3::Zero();
  double path_length = 0.0;
};

/// Fixed open-loop maneuver: cruise, turn, dive, recover.
OpenLoopPath run_open_loop_maneuver(const dynamics::VehicleParams& params, double dt, double duration = 240.0);

/// Relief/sampling pair, 500 m apart, used by the fault matrix.
scenario::ScenarioConfig reference_hotbunk(const dynamics::VehicleParams& params);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Every physics, data and mission invariant, for one vehicle class.
std::vector<CheckResult> run_suite(const dynamics::VehicleParams& params);

void print_table(const std::vector<CheckResult>& results, std::ostream& out);

}  // namespace auvsim::validation
