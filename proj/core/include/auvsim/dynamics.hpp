#pragma once

#include "auvsim/types.hpp"
#include "auvsim/vehicle_params.hpp"

namespace auvsim::dynamics {

/// Latched actuator positions seen by the physics.
struct ActuatorState {
  double prop_speed = 0.0;        // rev/s
  double rudder = 0.0;            // rad
  double elevator = 0.0;          // rad
  double shifter_position = 0.0;  // m
};

/// Diagonal damping on the water-relative velocity. `current` is the ambient
/// flow in the world frame. The hydrodynamic Coriolis matrix is not modeled.
Wrench hydro_wrench(const VehicleState& state, const HydroParams& params, const Vec3& current);

/// Propeller thrust along body +x: rho * D^4 * K_T(J0) * n * |n|.
double thrust_force(double prop_speed, double speed_through_water, const ThrusterParams& params,
                    double fluid_density);

/// Lift of one fin with the angle of attack equal to the deflection. The flow
/// speed is the body surge component of `state.lin_vel` (pass water-relative
/// velocity).
Wrench fin_wrench(const VehicleState& state, double deflection, const FinParams& params,
                  double fluid_density);

/// Net weight/buoyancy force plus the righting moment rho*g*V*C_b*sin(tilt).
Wrench buoyancy_wrench(const VehicleState& state, const BuoyancyParams& params, double mass,
                       double fluid_density);

/// Moment of the shifter weight at station `d` for a pure pitch rotation
/// `pitch` about body +y (positive = nose down). Only the shifter term:
/// torque.y = m_shifter * g * d * cos(pitch). The righting moment belongs to
/// buoyancy_wrench.
Wrench mass_shifter_wrench(double pitch, double d, const MassShifterParams& params, double gravity);

/// Same moment for an arbitrary orientation.
Wrench mass_shifter_wrench(const VehicleState& state, double d, const MassShifterParams& params,
                           double gravity);

/// Sum of every force model for one vehicle.
Wrench vehicle_wrench(const VehicleState& state, const VehicleParams& params,
                      const ActuatorState& actuators, const Vec3& current);

/// One semi-implicit Euler step: velocities first (with added-mass augmented
/// inertia), then pose from the new velocities. Throws NumericError on NaN/Inf.
VehicleState integrate_step(const VehicleState& state, const Wrench& total, const HydroParams& params,
                            double dt);

/// r = 2m / (C_l rho A) at the given rudder deflection. Throws if C_l <= 0.
double analytic_turn_radius(const FinParams& rudder, double deflection, const HydroParams& hydro);

/// Steady pitch magnitude at full elevator and speed v:
/// asin(C_l v^2 A |d| / (2 g V C_b)), saturating at pi/2.
double analytic_max_pitch(double speed, const FinParams& elevator, const BuoyancyParams& buoy,
                          double fluid_density);

/// Pitch (about body +y, nose down positive) where the shifter moment balances
/// the righting moment: atan(m_shifter d / (rho V C_b)).
double analytic_equilibrium_pitch(double d, const MassShifterParams& shifter,
                                  const BuoyancyParams& buoy, double fluid_density);

/// Propeller speed whose thrust balances straight-line drag at `speed`
/// (bisection on [0, max_prop_speed]); saturates at max_prop_speed.
double prop_speed_for(double speed, const VehicleParams& params);

/// Steady straight-line surge speed at propeller speed `n` (bisection on
/// thrust = drag).
double steady_surge_speed(double prop_speed, const VehicleParams& params);

}  // namespace auvsim::dynamics
