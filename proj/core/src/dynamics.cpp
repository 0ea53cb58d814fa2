#include "auvsim/dynamics.hpp"

#include "auvsim/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace auvsim {

bool VehicleState::finite() const {
  return position.allFinite() && orientation.coeffs().allFinite() && lin_vel.allFinite() &&
         ang_vel.allFinite() && std::isfinite(sim_time);
}

double heading(const Quat& q) {
  const Vec3 fwd = q * Vec3::UnitX();
  return std::atan2(fwd.y(), fwd.x());
}

double pitch_up(const Quat& q) {
  const Vec3 fwd = q * Vec3::UnitX();
  return std::asin(std::clamp(fwd.z(), -1.0, 1.0));
}

double tilt(const Quat& q) {
  const Vec3 up = q * Vec3::UnitZ();
  return std::acos(std::clamp(up.z(), -1.0, 1.0));
}

Quat orientation_from(double heading_rad, double pitch_up_rad, double roll_rad) {
  return Quat(Eigen::AngleAxisd(heading_rad, Vec3::UnitZ()) *
              Eigen::AngleAxisd(-pitch_up_rad, Vec3::UnitY()) *
              Eigen::AngleAxisd(roll_rad, Vec3::UnitX()))
      .normalized();
}

namespace dynamics {
namespace {

std::string describe(const Wrench& w) {
  std::ostringstream out;
  out << "force=(" << w.force.transpose() << ") torque=(" << w.torque.transpose() << ")";
  return out.str();
}

void require_finite(const VehicleState& state, const char* where) {
  if (!state.finite()) throw NumericError(std::string(where) + ": non-finite vehicle state");
}

double damp(double coeff_lin, double coeff_quad, double x) {
  return (coeff_lin + coeff_quad * std::abs(x)) * x;
}

}  // namespace

Wrench hydro_wrench(const VehicleState& state, const HydroParams& params, const Vec3& current) {
  require_finite(state, "hydro_wrench");
  if (!current.allFinite()) throw NumericError("hydro_wrench: non-finite current");

  const Vec3 current_body = state.orientation.conjugate() * current;
  const Vec3 rel = state.lin_vel - current_body;
  const auto& lin = params.linear_damping;
  const auto& quad = params.quadratic_damping;

  Wrench w;
  for (int i = 0; i < 3; ++i) {
    w.force[i] = damp(lin[i], quad[i], rel[i]);
    w.torque[i] = damp(lin[i + 3], quad[i + 3], state.ang_vel[i]);
  }
  return w;
}

double thrust_force(double prop_speed, double speed_through_water, const ThrusterParams& params,
                    double fluid_density) {
  if (!std::isfinite(prop_speed) || !std::isfinite(speed_through_water)) {
    throw NumericError("thrust_force: non-finite input");
  }
  constexpr double kMinRevs = 1e-6;
  const double j0 = std::abs(prop_speed) > kMinRevs
                        ? speed_through_water / (prop_speed * params.prop_diameter)
                        : 0.0;
  const double d2 = params.prop_diameter * params.prop_diameter;
  return fluid_density * d2 * d2 * params.kt(j0) * prop_speed * std::abs(prop_speed);
}

Wrench fin_wrench(const VehicleState& state, double deflection, const FinParams& params,
                  double fluid_density) {
  if (!std::isfinite(deflection)) throw NumericError("fin_wrench: non-finite deflection");
  require_finite(state, "fin_wrench");

  const double u = state.lin_vel.x();
  const double lift = 0.5 * params.lift_coefficient(deflection) * fluid_density * u * std::abs(u) *
                      params.area;
  Wrench w;
  w.force = params.axis == FinAxis::Vertical ? Vec3(0.0, -lift, 0.0) : Vec3(0.0, 0.0, -lift);
  w.torque = Vec3(params.moment_arm, 0.0, 0.0).cross(w.force);
  return w;
}

Wrench buoyancy_wrench(const VehicleState& state, const BuoyancyParams& params, double mass,
                       double fluid_density) {
  const Vec3 up_body = state.orientation.conjugate() * Vec3::UnitZ();
  const double buoyant = fluid_density * params.volume * params.gravity;
  Wrench w;
  w.force = (buoyant - mass * params.gravity) * up_body;
  w.torque = Vec3(0.0, 0.0, params.cob_offset).cross(buoyant * up_body);
  return w;
}

Wrench mass_shifter_wrench(double pitch, double d, const MassShifterParams& params,
                           double gravity) {
  Wrench w;
  w.torque.y() = params.mass * gravity * d * std::cos(pitch);
  return w;
}

Wrench mass_shifter_wrench(const VehicleState& state, double d, const MassShifterParams& params,
                           double gravity) {
  const Vec3 up_body = state.orientation.conjugate() * Vec3::UnitZ();
  Wrench w;
  w.torque = Vec3(d, 0.0, 0.0).cross(-params.mass * gravity * up_body);
  return w;
}

Wrench vehicle_wrench(const VehicleState& state, const VehicleParams& params,
                      const ActuatorState& actuators, const Vec3& current) {
  const double rho = params.hydro.fluid_density;

  VehicleState relative = state;
  relative.lin_vel = state.lin_vel - state.orientation.conjugate() * current;
  const double surge_through_water = relative.lin_vel.x();

  Wrench total = hydro_wrench(state, params.hydro, current);
  total += buoyancy_wrench(state, params.buoyancy, params.hydro.mass, rho);
  total.force.x() += thrust_force(actuators.prop_speed, surge_through_water, params.thruster, rho);
  total += fin_wrench(relative, actuators.rudder, params.rudder, rho);
  total += fin_wrench(relative, actuators.elevator, params.elevator, rho);
  total += mass_shifter_wrench(state, actuators.shifter_position, params.shifter,
                               params.buoyancy.gravity);
  return total;
}

VehicleState integrate_step(const VehicleState& state, const Wrench& total, const HydroParams& params,
                            double dt) {
  if (!(dt > 0.0) || dt > 0.05 + 1e-12) {
    throw Error("integrate_step: dt must be in (0, 0.05], got " + std::to_string(dt));
  }
  if (!total.finite()) throw NumericError("integrate_step: non-finite wrench " + describe(total));

  const double m = params.mass;
  const Vec3& v = state.lin_vel;
  const Vec3& w = state.ang_vel;
  const Vec3 inertia_w = params.inertia.cwiseProduct(w);

  // Rigid-body terms of motion in a rotating frame; the hydrodynamic
  // (added-mass) Coriolis terms are left out.
  const Vec3 transport = m * w.cross(v);
  const Vec3 gyro = w.cross(inertia_w);

  VehicleState next = state;
  for (int i = 0; i < 3; ++i) {
    next.lin_vel[i] += dt * (total.force[i] - transport[i]) / (m + params.added_mass[i]);
    next.ang_vel[i] +=
        dt * (total.torque[i] - gyro[i]) / (params.inertia[i] + params.added_mass[i + 3]);
  }

  next.position += dt * (state.orientation * next.lin_vel);

  const Vec3 rot = next.ang_vel * dt;
  const double angle = rot.norm();
  if (angle > 0.0) {
    next.orientation = state.orientation * Quat(Eigen::AngleAxisd(angle, rot / angle));
  }
  next.orientation.normalize();
  next.sim_time = state.sim_time + dt;

  if (!next.finite()) {
    throw NumericError("integrate_step: state diverged at t=" + std::to_string(next.sim_time) +
                       " under " + describe(total));
  }
  return next;
}

double analytic_turn_radius(const FinParams& rudder, double deflection, const HydroParams& hydro) {
  const double cl = rudder.lift_coefficient(std::abs(deflection));
  if (!(cl > 0.0)) throw Error("analytic_turn_radius: lift coefficient must be positive");
  return 2.0 * hydro.mass / (cl * hydro.fluid_density * rudder.area);
}

double analytic_max_pitch(double speed, const FinParams& elevator, const BuoyancyParams& buoy,
                          double fluid_density) {
  const double cl = elevator.lift_coefficient(elevator.max_deflection);
  const double fin_moment =
      0.5 * cl * fluid_density * speed * speed * elevator.area * std::abs(elevator.moment_arm);
  const double righting = fluid_density * buoy.gravity * buoy.volume * buoy.cob_offset;
  const double s = fin_moment / righting;
  if (!(s < 1.0)) return kPi / 2.0;
  return std::asin(s);
}

double analytic_equilibrium_pitch(double d, const MassShifterParams& shifter,
                                  const BuoyancyParams& buoy, double fluid_density) {
  return std::atan(shifter.mass * d / (fluid_density * buoy.volume * buoy.cob_offset));
}

namespace {

double straight_drag(double u, const HydroParams& hydro) {
  return -damp(hydro.linear_damping[0], hydro.quadratic_damping[0], u);
}

template <typename F>
double bisect(F&& f, double lo, double hi) {
  for (int i = 0; i < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double prop_speed_for(double speed, const VehicleParams& params) {
  if (speed <= 0.0) return 0.0;
  const double rho = params.hydro.fluid_density;
  auto excess = [&](double n) {
    return thrust_force(n, speed, params.thruster, rho) - straight_drag(speed, params.hydro);
  };
  const double n_max = params.thruster.max_prop_speed;
  if (excess(n_max) <= 0.0) return n_max;
  return bisect(excess, 0.0, n_max);
}

double steady_surge_speed(double prop_speed, const VehicleParams& params) {
  if (prop_speed <= 0.0) return 0.0;
  const double rho = params.hydro.fluid_density;
  auto deficit = [&](double u) {
    return thrust_force(prop_speed, u, params.thruster, rho) - straight_drag(u, params.hydro);
  };
  double hi = 1.0;
  while (deficit(hi) > 0.0 && hi < 1e3) hi *= 2.0;
  // deficit is positive below the root; bisect expects negative below.
  return bisect([&](double u) { return -deficit(u); }, 0.0, hi);
}

}  // namespace dynamics
}  // namespace auvsim
