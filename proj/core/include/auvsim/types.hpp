#pragma once

#include <Eigen/Geometry>

#include <cmath>
#include <cstdint>

namespace auvsim {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;

/// Frames: world is x east, y north, z up (depth = -z). Body is x forward,
/// y port, z up; the identity orientation faces east, level.
struct VehicleState {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();  // body to world
  Vec3 lin_vel = Vec3::Zero();          // body frame u, v, w
  Vec3 ang_vel = Vec3::Zero();          // body frame p, q, r
  double sim_time = 0.0;

  double depth() const { return -position.z(); }
  bool finite() const;
};

/// Body-frame force and torque about the center of mass.
struct Wrench {
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();

  Wrench& operator+=(const Wrench& other) {
    force += other.force;
    torque += other.torque;
    return *this;
  }
  friend Wrench operator+(Wrench a, const Wrench& b) { return a += b; }
  bool finite() const { return force.allFinite() && torque.allFinite(); }
};

using VehicleId = std::uint32_t;

constexpr double kPi = 3.14159265358979323846;

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

/// Heading of the body x axis projected on the horizontal plane, CCW from east.
double heading(const Quat& q);

/// Elevation of the body x axis above the horizontal; nose up is positive.
double pitch_up(const Quat& q);

/// Angle between body up and world up, in [0, pi].
double tilt(const Quat& q);

/// Orientation from heading (CCW from east) and nose-up pitch.
Quat orientation_from(double heading_rad, double pitch_up_rad = 0.0, double roll_rad = 0.0);

}  // namespace auvsim
