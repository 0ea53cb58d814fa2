#include "auvsim/validation.hpp"

#include "auvsim/acoustics.hpp"
#include "auvsim/dynamics.hpp"
#include "auvsim/engine.hpp"
#include "auvsim/envgrid.hpp"
#include "auvsim/error.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <ostream>
#include <random>

namespace auvsim::validation {

namespace {

using dynamics::ActuatorState;
using dynamics::VehicleParams;

constexpr double kDivergedSpeed = 50.0;

VehicleState step(const VehicleState& s, const VehicleParams& p, const ActuatorState& a, double dt) {
  const Wrench w = dynamics::vehicle_wrench(s, p, a, Vec3::Zero());
  return dynamics::integrate_step(s, w, p.hydro, dt);
}

std::size_t steps_for(double duration, double dt) {
  return static_cast<std::size_t>(std::llround(duration / dt));
}

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
  const double m = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return v.size() > 1 ? std::sqrt(acc / static_cast<double>(v.size() - 1)) : 0.0;
}

double small_pitch_period(const VehicleParams& p) {
  const double k = p.hydro.fluid_density * p.buoyancy.gravity * p.buoyancy.volume * p.buoyancy.cob_offset;
  const double inertia = p.hydro.inertia.y() + p.hydro.added_mass[4];
  const double t = 2.0 * kPi * std::sqrt(inertia / k);
  return std::isfinite(t) && t > 0.0 ? t : 10.0;
}

double mechanical_energy(const VehicleState& s, const VehicleParams& p) {
  const auto& h = p.hydro;
  double e = 0.0;
  for (int i = 0; i < 3; ++i) {
    e += 0.5 * (h.mass + h.added_mass[i]) * s.lin_vel[i] * s.lin_vel[i];
    e += 0.5 * (h.inertia[i] + h.added_mass[i + 3]) * s.ang_vel[i] * s.ang_vel[i];
  }
  const auto& b = p.buoyancy;
  e += h.fluid_density * b.gravity * b.volume * b.cob_offset * (1.0 - std::cos(tilt(s.orientation)));
  return e;
}

CheckResult check(std::string name, const std::function<std::pair<bool, std::string>()>& body) {
  CheckResult r;
  r.name = std::move(name);
  try {
    auto [ok, detail] = body();
    r.passed = ok;
    r.detail = std::move(detail);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("error: ") + e.what();
  }
  return r;
}

}  // namespace

TerminalSpeed measure_terminal_speed(const VehicleParams& params, double dt, double duration) {
  TerminalSpeed out;
  ActuatorState a;
  a.prop_speed = params.thruster.max_prop_speed;
  VehicleState s;
  const std::size_t n = steps_for(duration, dt);
  const std::size_t tail = steps_for(10.0, dt);
  double tail_min = std::numeric_limits<double>::infinity();
  double tail_max = -tail_min;
  try {
    for (std::size_t i = 0; i < n; ++i) {
      s = step(s, params, a, dt);
      if (std::abs(s.lin_vel.x()) > kDivergedSpeed) {
        out.diverged = true;
        break;
      }
      if (i + tail >= n) {
        tail_min = std::min(tail_min, s.lin_vel.x());
        tail_max = std::max(tail_max, s.lin_vel.x());
      }
    }
  } catch (const NumericError&) {
    out.diverged = true;
  }
  out.speed = s.lin_vel.x();
  out.thrust = dynamics::thrust_force(a.prop_speed, out.speed, params.thruster, params.hydro.fluid_density);
  out.settled = !out.diverged && tail_max - tail_min < 1e-4 * std::max(1.0, std::abs(out.speed));
  return out;
}

Oscillation measure_pitch_oscillation(const VehicleParams& params, double theta0, double dt, double periods,
                                      bool damped) {
  VehicleParams p = params;
  if (!damped) {
    p.hydro.linear_damping.fill(0.0);
    p.hydro.quadratic_damping.fill(0.0);
  }
  VehicleState s;
  s.orientation = orientation_from(0.0, theta0);
  const double e0 = mechanical_energy(s, p);

  Oscillation out;
  const std::size_t n = steps_for(periods * small_pitch_period(p), dt);
  double swing_peak = std::abs(theta0);
  double sign = theta0 >= 0.0 ? 1.0 : -1.0;
  out.max_abs_pitch = std::abs(theta0);
  const ActuatorState idle;
  for (std::size_t i = 0; i < n; ++i) {
    s = step(s, p, idle, dt);
    const double pitch = pitch_up(s.orientation);
    out.max_abs_pitch = std::max(out.max_abs_pitch, std::abs(pitch));
    if (pitch * sign < 0.0) {
      out.peaks.push_back(swing_peak);
      ++out.sign_changes;
      sign = -sign;
      swing_peak = 0.0;
    }
    swing_peak = std::max(swing_peak, std::abs(pitch));
    if (e0 > 0.0) out.energy_drift = std::max(out.energy_drift, std::abs(mechanical_energy(s, p) - e0) / e0);
  }
  return out;
}

Circle fit_circle(const std::vector<Vec3>& points) {
  if (points.size() < 3) throw Error("circle fit needs at least three points");
  Eigen::Vector2d c0 = Eigen::Vector2d::Zero();
  for (const auto& p : points) c0 += p.head<2>();
  c0 /= static_cast<double>(points.size());

  Eigen::MatrixXd a(points.size(), 3);
  Eigen::VectorXd b(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Eigen::Vector2d q = points[i].head<2>() - c0;
    const auto row = static_cast<Eigen::Index>(i);
    a(row, 0) = q.x();
    a(row, 1) = q.y();
    a(row, 2) = 1.0;
    b(row) = -q.squaredNorm();
  }
  const Eigen::Vector3d sol = a.colPivHouseholderQr().solve(b);
  const Eigen::Vector2d center(-sol(0) / 2.0, -sol(1) / 2.0);
  Circle c;
  c.radius = std::sqrt(center.squaredNorm() - sol(2));
  c.center = Vec3(center.x() + c0.x(), center.y() + c0.y(), 0.0);
  double acc = 0.0;
  for (const auto& p : points) {
    const double d = (p.head<2>() - c.center.head<2>()).norm() - c.radius;
    acc += d * d;
  }
  c.rms_residual = std::sqrt(acc / static_cast<double>(points.size()));
  return c;
}

Turn measure_turn(const VehicleParams& params, double rudder, double speed, double dt, double settle,
                  double window) {
  ActuatorState a;
  a.prop_speed = dynamics::prop_speed_for(speed, params);
  a.rudder = rudder;
  VehicleState s;
  s.lin_vel.x() = speed;

  for (std::size_t i = 0, n = steps_for(settle, dt); i < n; ++i) s = step(s, params, a, dt);

  Turn out;
  std::vector<Vec3> points;
  std::vector<double> rates;
  std::vector<double> speeds;
  const std::size_t every = std::max<std::size_t>(1, steps_for(1.0, dt));
  for (std::size_t i = 0, n = steps_for(window, dt); i < n; ++i) {
    s = step(s, params, a, dt);
    rates.push_back(s.ang_vel.z());
    speeds.push_back(s.lin_vel.norm());
    if (i % every == 0) points.push_back(s.position);
  }
  out.circle = fit_circle(points);
  out.yaw_rate_mean = mean(rates);
  out.yaw_rate_cv = std::abs(stddev(rates) / out.yaw_rate_mean);
  out.speed = mean(speeds);
  return out;
}

SteadyPitch measure_steady_pitch(const VehicleParams& params, double elevator, double prop_speed, double speed,
                                 double dt, double duration) {
  ActuatorState a;
  a.prop_speed = prop_speed;
  a.elevator = elevator;
  VehicleState s;
  s.lin_vel.x() = speed;
  std::vector<double> pitch;
  std::vector<double> u;
  const std::size_t n = steps_for(duration, dt);
  const std::size_t tail = steps_for(20.0, dt);
  for (std::size_t i = 0; i < n; ++i) {
    s = step(s, params, a, dt);
    if (i + tail >= n) {
      pitch.push_back(pitch_up(s.orientation));
      u.push_back(s.lin_vel.x());
    }
  }
  return {mean(pitch), mean(u)};
}

double measure_shifter_pitch(const VehicleParams& params, double d, double dt, double duration) {
  ActuatorState a;
  a.shifter_position = d;
  VehicleState s;
  std::vector<double> pitch;
  const std::size_t n = steps_for(duration, dt);
  const std::size_t tail = steps_for(20.0, dt);
  for (std::size_t i = 0; i < n; ++i) {
    s = step(s, params, a, dt);
    if (i + tail >= n) pitch.push_back(-pitch_up(s.orientation));
  }
  return mean(pitch);
}

OpenLoopPath run_open_loop_maneuver(const VehicleParams& params, double dt, double duration) {
  const double cruise = dynamics::prop_speed_for(1.0, params);
  VehicleState s;
  s.lin_vel.x() = 1.0;
  OpenLoopPath out;
  const std::size_t n = steps_for(duration, dt);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * dt;
    ActuatorState a;
    a.prop_speed = cruise;
    if (t >= 0.25 * duration && t < 0.5 * duration) a.rudder = 0.15;
    if (t >= 0.5 * duration && t < 0.75 * duration) a.elevator = -0.15;
    if (t >= 0.75 * duration) {
      a.elevator = 0.1;
      a.rudder = -0.1;
    }
    const Vec3 before = s.position;
    s = step(s, params, a, dt);
    out.path_length += (s.position - before).norm();
  }
  out.end = s.position;
  return out;
}

scenario::ScenarioConfig reference_hotbunk(const VehicleParams& params) {
  using mission::Phase;
  scenario::ScenarioConfig cfg;
  cfg.source = "<reference hot-bunk>";
  cfg.seed = 1;
  cfg.duration = 3000.0;

  scenario::VehicleSpec sv;
  sv.name = "sv";
  sv.id = 1;
  sv.params = params;
  sv.position = Vec3(0.0, 0.0, -20.0);
  sv.mission = scenario::MissionKind::HotBunk;
  sv.hotbunk.role = mission::Role::Sampling;
  sv.hotbunk.phase_timeouts[Phase::Surfacing] = 300.0;
  sv.partner = "rv";

  scenario::VehicleSpec rv;
  rv.name = "rv";
  rv.id = 2;
  rv.params = params;
  rv.position = Vec3(-500.0, 0.0, -20.0);
  rv.mission = scenario::MissionKind::HotBunk;
  rv.partner = "sv";
  auto& h = rv.hotbunk;
  h.role = mission::Role::Relief;
  h.waypoint = Vec3(-400.0, 30.0, -20.0);
  h.waypoint_tolerance = 15.0;
  h.r1 = 200.0;
  h.r2 = 20.0;
  h.success_radius = 20.0;
  h.fix_period = 2.0;
  h.handshake_timeout = 10.0;
  h.max_retries = 3;
  h.phase_timeouts[Phase::MidcourseGuidance] = 400.0;
  h.phase_timeouts[Phase::TerminalHomingFast] = 600.0;
  h.phase_timeouts[Phase::TerminalHomingSlow] = 600.0;
  h.phase_timeouts[Phase::AcousticHandshake] = 120.0;

  cfg.vehicles = {sv, rv};
  return cfg;
}

std::vector<CheckResult> run_suite(const VehicleParams& params) {
  std::vector<CheckResult> results;
  const double rho = params.hydro.fluid_density;

  for (double deg : {5.0, 15.0, 30.0}) {
    results.push_back(check(fmt::format("hydrostatic_oscillation_{}deg", deg), [&] {
      const double theta0 = deg2rad(deg);
      const auto o = measure_pitch_oscillation(params, theta0, 0.001, 10.0, false);
      const bool oscillates = o.sign_changes >= 19;
      bool bounded = oscillates;
      for (double pk : o.peaks) bounded = bounded && pk >= 0.98 * theta0 && pk <= 1.02 * theta0;
      const bool energy = o.energy_drift < 0.02;
      return std::pair{oscillates && bounded && energy,
                       fmt::format("sign changes {}, max {:.3f} deg, energy drift {:.2e}", o.sign_changes,
                                   rad2deg(o.max_abs_pitch), o.energy_drift)};
    }));
  }

  results.push_back(check("damped_oscillation", [&] {
    const auto o = measure_pitch_oscillation(params, deg2rad(15.0), 0.005, 6.0, true);
    bool monotone = !o.peaks.empty();
    for (std::size_t i = 1; i < o.peaks.size(); ++i) monotone = monotone && o.peaks[i] <= o.peaks[i - 1];
    return std::pair{monotone, fmt::format("{} peaks, max {:.3f} deg", o.peaks.size(), rad2deg(o.max_abs_pitch))};
  }));

  results.push_back(check("terminal_velocity", [&] {
    const auto t = measure_terminal_speed(params);
    if (t.diverged) return std::pair{false, std::string("surge speed diverged")};
    const double closed = std::sqrt(t.thrust / std::abs(params.hydro.quadratic_damping[0]));
    const bool ok = t.settled && std::abs(t.speed - closed) <= 0.05 * closed && std::abs(t.speed - 1.0) <= 0.1;
    return std::pair{ok, fmt::format("u = {:.4f} m/s, sqrt(F/|X_uu|) = {:.4f} m/s", t.speed, closed)};
  }));

  results.push_back(check("circle_test", [&] {
    const double rudder = std::min(0.1, 0.5 * params.rudder.stall_angle);
    const auto t = measure_turn(params, rudder, 1.0);
    const double r = dynamics::analytic_turn_radius(params.rudder, rudder, params.hydro);
    const bool ok = std::abs(t.circle.radius - r) <= 0.05 * r && t.yaw_rate_cv < 0.02;
    return std::pair{ok, fmt::format("radius {:.2f} m vs {:.2f} m, yaw rate cv {:.2e}", t.circle.radius, r,
                                     t.yaw_rate_cv)};
  }));

  results.push_back(check("max_pitch", [&] {
    const double n = dynamics::prop_speed_for(1.0, params);
    const auto sp = measure_steady_pitch(params, params.elevator.max_deflection, n, 1.0);
    const double expect = dynamics::analytic_max_pitch(sp.speed, params.elevator, params.buoyancy, rho);
    const bool ok = std::abs(sp.pitch_up - expect) <= deg2rad(1.0);
    return std::pair{ok, fmt::format("pitch {:.2f} deg vs {:.2f} deg", rad2deg(sp.pitch_up), rad2deg(expect))};
  }));

  results.push_back(check("shifter_equilibrium", [&] {
    bool ok = true;
    std::string detail;
    const auto& ms = params.shifter;
    for (int k = 0; k < 5; ++k) {
      const double d = ms.travel_min + (ms.travel_max - ms.travel_min) * k / 4.0;
      const double got = measure_shifter_pitch(params, d);
      const double expect = dynamics::analytic_equilibrium_pitch(d, ms, params.buoyancy, rho);
      ok = ok && std::abs(got - expect) <= deg2rad(1.0);
      detail += fmt::format("{}d={:+.3f}: {:.2f}/{:.2f} deg", detail.empty() ? "" : ", ", d, rad2deg(got),
                            rad2deg(expect));
    }
    return std::pair{ok, detail};
  }));

  results.push_back(check("timestep_robustness", [&] {
    const auto fine = run_open_loop_maneuver(params, 0.001);
    const auto coarse = run_open_loop_maneuver(params, 0.03);
    const double gap = (fine.end - coarse.end).norm();
    return std::pair{gap <= 0.05 * fine.path_length,
                     fmt::format("end gap {:.2f} m over {:.1f} m path", gap, fine.path_length)};
  }));

  results.push_back(check("envgrid_affine", [&] {
    auto f = [](double t, double x, double y, double z) { return 2 * x + 3 * y - z + 0.5 * t; };
    auto grid = env::EnvGrid::sample("f", {0.0, 3600.0, 7200.0}, {0.0, 1.0, 5.0, 20.0, 100.0},
                                     {-50.0, -10.0, 0.0, 7.0, 40.0}, {-200.0, -50.0, -10.0, -1.0, 0.0}, f);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ut(0, 7200), ux(0, 100), uy(-50, 40), uz(-200, 0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double t = ut(rng), x = ux(rng), y = uy(rng), z = uz(rng);
      const double expect = f(t, x, y, z);
      worst = std::max(worst, std::abs(grid.value(t, Vec3(x, y, z)) - expect) / std::max(1.0, std::abs(expect)));
    }
    return std::pair{worst < 1e-9, fmt::format("worst relative error {:.2e}", worst)};
  }));

  results.push_back(check("acoustics_causality", [&] {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> pos(-2000.0, 2000.0);
    std::size_t violations = 0;
    std::size_t sent = 0;
    for (int trial = 0; trial < 100; ++trial) {
      acoustics::ChannelParams cp;
      cp.seed = static_cast<std::uint64_t>(trial);
      cp.drop_model = trial % 2 ? acoustics::DropModel::Linear : acoustics::DropModel::HardCutoff;
      acoustics::AcousticChannel ch(cp);
      std::vector<acoustics::Endpoint> eps;
      for (VehicleId id = 0; id < 4; ++id) eps.push_back({id, Vec3(pos(rng), pos(rng), 0.0)});
      for (int m = 0; m < 5; ++m) {
        acoustics::AcousticMessage msg{static_cast<VehicleId>(m % 4), {1, 2, 3}, m * 0.5, eps[m % 4].position};
        ch.transmit(msg, eps);
      }
      for (double t = 0.0; t <= 10.0; t += 0.01) {
        for (const auto& e : eps) {
          for (const auto& msg : ch.poll(e.id, t)) {
            const double d = (e.position - msg.send_position).norm();
            if (t + 1e-12 < msg.send_time + d / cp.sound_speed) ++violations;
          }
        }
      }
      std::size_t s = 0, resolved = 0;
      for (const auto& ev : ch.events()) {
        if (ev.kind == acoustics::EventKind::Send) ++s;
        if (ev.kind == acoustics::EventKind::Deliver || ev.kind == acoustics::EventKind::DropRange ||
            ev.kind == acoustics::EventKind::DropContention || ev.kind == acoustics::EventKind::DropModem) {
          ++resolved;
        }
      }
      if (s != resolved + ch.pending()) ++violations;
      sent += s;
    }
    return std::pair{violations == 0, fmt::format("{} messages, {} violations", sent, violations)};
  }));

  results.push_back(check("mission_fault_matrix", [&] {
    using mission::Phase;
    const auto base = reference_hotbunk(params);
    const Phase phases[] = {Phase::MidcourseGuidance, Phase::TerminalHomingFast, Phase::TerminalHomingSlow,
                            Phase::AcousticHandshake};
    const engine::Component comps[] = {engine::Component::Propeller, engine::Component::AcousticModem,
                                       engine::Component::Elevator, engine::Component::MassShifter,
                                       engine::Component::Rudder};
    int runs = 0;
    int hangs = 0;
    std::string first_hang;
    for (std::size_t target = 0; target < base.vehicles.size(); ++target) {
      for (Phase ph : phases) {
        for (auto comp : comps) {
          auto cfg = base;
          scenario::FaultSpec f;
          f.component = comp;
          f.at_phase = ph;
          f.phase_of = "rv";
          cfg.vehicles[target].faults.push_back(f);
          auto w = scenario::build_world(cfg);
          auto res = engine::run(w, cfg.duration);
          ++runs;
          const auto& rv = *w.find("rv");
          const bool ended = rv.mission->terminal() && w.complete() &&
                             res.status != engine::RunStatus::DurationReached;
          if (!ended) {
            ++hangs;
            if (first_hang.empty()) {
              first_hang = fmt::format(" (first: {} fault on {} at {})", engine::to_string(comp),
                                       cfg.vehicles[target].name, mission::to_string(ph));
            }
          }
        }
      }
    }
    return std::pair{hangs == 0, fmt::format("{} runs, {} hangs{}", runs, hangs, first_hang)};
  }));

  return results;
}

void print_table(const std::vector<CheckResult>& results, std::ostream& out) {
  std::size_t width = 5;
  for (const auto& r : results) width = std::max(width, r.name.size());
  for (const auto& r : results) {
    out << fmt::format("{:<{}}  {}  {}\n", r.name, width, r.passed ? "PASS" : "FAIL", r.detail);
  }
  const auto passed = std::count_if(results.begin(), results.end(), [](const CheckResult& r) { return r.passed; });
  out << fmt::format("{}/{} checks passed\n", passed, results.size());
}

}  // namespace auvsim::validation
