#pragma once

#include "auvsim/types.hpp"

#include <array>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace auvsim {

class ConfigDocument;

namespace dynamics {

/// Diagonal Fossen-style coefficients. Damping follows the negative
/// convention: the hydrodynamic force on axis i is
/// (linear[i] + quadratic[i] * |x_i|) * x_i, so dissipative terms are <= 0.
struct HydroParams {
  double mass = 0.0;                            // rigid mass m, kg
  Vec3 inertia = Vec3::Zero();                  // Ixx, Iyy, Izz, kg m^2
  std::array<double, 6> added_mass{};           // X_u', Y_v', Z_w', K_p', M_q', N_r'
  std::array<double, 6> linear_damping{};       // X_u, Y_v, Z_w, K_p, M_q, N_r
  std::array<double, 6> quadratic_damping{};    // X_u|u|, ..., N_r|r|
  double fluid_density = 1025.0;                // rho, kg/m^3
};

struct BuoyancyParams {
  double volume = 0.0;      // displaced volume V, m^3
  double cob_offset = 0.0;  // C_b: center of buoyancy above center of mass, m
  double gravity = 9.81;
};

struct ThrusterParams {
  double prop_diameter = 0.0;                        // m
  std::vector<std::pair<double, double>> kt_table;   // (J0, K_T), J0 strictly increasing
  double kt_constant = 0.0;                          // used when kt_table is empty
  double max_prop_speed = 0.0;                       // rev/s

  /// Piecewise-linear K_T(J0), clamped at the table ends.
  double kt(double advance_ratio) const;
};

enum class FinAxis { Vertical, Horizontal };

/// A control surface on the hull axis. moment_arm is the signed station along
/// body x relative to the center of buoyancy (negative = aft). For an aft fin a
/// positive deflection yaws the nose to port (rudder) or pitches it up (elevator).
struct FinParams {
  FinAxis axis = FinAxis::Vertical;
  double area = 0.0;            // m^2
  double lift_slope = 0.0;      // dC_l/d(alpha), 1/rad
  double stall_angle = 0.0;     // rad
  double post_stall_cl = 0.0;   // C_l magnitude held past stall
  double moment_arm = 0.0;      // m
  double max_deflection = 0.0;  // rad

  /// Linear up to the stall angle, then flat at +-post_stall_cl.
  double lift_coefficient(double alpha) const;
};

struct MassShifterParams {
  double mass = 0.0;        // kg
  double travel_min = 0.0;  // m, along body x (positive forward)
  double travel_max = 0.0;
  double slew_rate = 0.0;   // m/s

  /// Clamps `d` into the travel limits, logging a warning when it had to.
  double clamp(double d) const;
};

struct VehicleParams {
  std::string name = "vehicle";
  HydroParams hydro;
  BuoyancyParams buoyancy;
  ThrusterParams thruster;
  FinParams rudder;
  FinParams elevator;
  MassShifterParams shifter;

  /// Human-readable list of broken invariants; empty when the set is sane.
  std::vector<std::string> violations() const;
};

/// Calibrated reference vehicle: ~1 m/s at full thrust, ~20 deg pitch at full
/// elevator and 1 m/s. Identical to config/reference_vehicle.cfg.
VehicleParams reference_vehicle();

/// Parses a vehicle parameter document. With `strict`, any invariant violation
/// is a ConfigError; otherwise violations are logged as warnings.
VehicleParams parse_vehicle_params(const ConfigDocument& doc, bool strict = true);
VehicleParams load_vehicle_params(const std::filesystem::path& path, bool strict = true);

/// Renders params in the same format parse_vehicle_params reads.
std::string format_vehicle_params(const VehicleParams& params);

}  // namespace dynamics
}  // namespace auvsim
