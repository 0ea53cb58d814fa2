// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Expected values are computed here from the vehicle constants, not through the
// library's own analytic helpers.

#include <auvsim/acoustics.hpp>
#include <auvsim/dynamics.hpp>
#include <auvsim/engine.hpp>
#include <auvsim/envgrid.hpp>
#include <auvsim/scenario.hpp>
#include <auvsim/validation.hpp>
#include <auvsim/vehicle_params.hpp>

#include <Eigen/Dense>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

namespace {

using namespace auvsim;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

const fs::path kConfigDir = AUVSIM_CONFIG_DIR;

// Reference vehicle, written out independently of the config loader.
constexpr double kRho = 1025.0;
constexpr double kG = 9.81;
constexpr double kMass = 147.5;
constexpr double kVolume = kMass / kRho;
constexpr double kCb = 0.017758;
constexpr double kXuu = 48.0;
constexpr double kPropD = 0.2;
constexpr double kPropMax = 10.574;
constexpr double kFinArea = 0.0244;
constexpr double kFinSlope = 4.13;
constexpr double kFinArm = 0.65;
constexpr double kFinMax = 0.2618;
constexpr double kShifterMass = 26.0;
constexpr double kShifterTravel = 0.03;

double deg(double rad) { return rad * 180.0 / 3.14159265358979323846; }
double rad(double d) { return d * 3.14159265358979323846 / 180.0; }

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double kt_table(double j) {
  static const std::vector<std::pair<double, double>> pts{{0.0, 0.4}, {0.4, 0.3}, {0.8, 0.15}, {1.2, 0.0}};
  if (j <= pts.front().first) return pts.front().second;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (j <= pts[i].first) {
      const double f = (j - pts[i - 1].first) / (pts[i].first - pts[i - 1].first);
      return pts[i - 1].second + f * (pts[i].second - pts[i - 1].second);
    }
  }
  return pts.back().second;
}

double full_thrust_at(double u) {
  return kRho * std::pow(kPropD, 4) * kPropMax * kPropMax * kt_table(u / (kPropMax * kPropD));
}

const dynamics::VehicleParams& vehicle() {
  static const auto p = dynamics::load_vehicle_params(kConfigDir / "reference_vehicle.cfg");
  return p;
}

scenario::ScenarioConfig scenario_file(const std::string& name, const std::vector<std::string>& overrides = {}) {
  return scenario::load_scenario(kConfigDir / "scenarios" / (name + ".cfg"), overrides);
}

// Kasa fit: x^2 + y^2 + a x + b y + c = 0, solved in the least-squares sense.
struct Fit {
  double cx = 0.0, cy = 0.0, r = 0.0, rms = 0.0;
};

Fit circle_through(const std::vector<Vec3>& pts) {
  double mx = 0.0, my = 0.0;
  for (const auto& p : pts) {
    mx += p.x();
    my += p.y();
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Eigen::Vector3d atb = Eigen::Vector3d::Zero();
  for (const auto& p : pts) {
    const Eigen::Vector3d row(p.x() - mx, p.y() - my, 1.0);
    const double rhs = -(row(0) * row(0) + row(1) * row(1));
    ata += row * row.transpose();
    atb += row * rhs;
  }
  const Eigen::Vector3d s = ata.ldlt().solve(atb);
  Fit f;
  f.cx = -s(0) / 2.0 + mx;
  f.cy = -s(1) / 2.0 + my;
  f.r = std::sqrt(s(0) * s(0) / 4.0 + s(1) * s(1) / 4.0 - s(2));
  double acc = 0.0;
  for (const auto& p : pts) {
    const double e = std::hypot(p.x() - f.cx, p.y() - f.cy) - f.r;
    acc += e * e;
  }
  f.rms = std::sqrt(acc / static_cast<double>(pts.size()));
  return f;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome terminal_velocity() {
  const auto t0 = Clock::now();
  const auto t = validation::measure_terminal_speed(vehicle());
  const double wall = seconds_since(t0);
  const double force = full_thrust_at(t.speed);
  const double closed = std::sqrt(force / kXuu);
  const bool ok = !t.diverged && t.settled && std::abs(t.speed - 1.0) <= 0.1 &&
                  std::abs(t.speed - closed) <= 0.05 * closed && wall < 5.0;
  return {ok, fmt::format("u={:.4f} m/s, sqrt(F/|X_uu|)={:.4f} m/s, wall {:.2f} s", t.speed, closed, wall)};
}

Outcome hydrostatic_oscillation() {
  bool ok = true;
  std::string detail;
  for (double d : {5.0, 15.0, 30.0}) {
    const double theta0 = rad(d);
    const auto o = validation::measure_pitch_oscillation(vehicle(), theta0, 0.001, 10.0, false);
    double lo = 1e9, hi = 0.0;
    for (double pk : o.peaks) {
      lo = std::min(lo, pk);
      hi = std::max(hi, pk);
    }
    const bool this_ok = o.peaks.size() >= 19 && lo >= 0.98 * theta0 && hi <= 1.02 * theta0 &&
                         o.max_abs_pitch <= 1.02 * theta0;
    ok = ok && this_ok;
    detail += fmt::format("{}{}deg: {} swings, peaks [{:.3f}, {:.3f}] deg", detail.empty() ? "" : "; ", d,
                          o.peaks.size(), deg(lo), deg(hi));
  }
  return {ok, detail};
}

Outcome circle_test() {
  const double rudder = 0.1;
  const auto t = validation::measure_turn(vehicle(), rudder, 1.0);
  const double expect = 2.0 * kMass / (kFinSlope * rudder * kRho * kFinArea);
  const bool ok = std::abs(t.circle.radius - expect) <= 0.05 * expect && t.yaw_rate_cv < 0.02;
  return {ok, fmt::format("radius {:.3f} m vs 2m/(C_l rho A) = {:.3f} m, yaw-rate cv {:.2e}", t.circle.radius,
                          expect, t.yaw_rate_cv)};
}

Outcome max_pitch() {
  const double n = dynamics::prop_speed_for(1.0, vehicle());
  const auto sp = validation::measure_steady_pitch(vehicle(), kFinMax, n, 1.0);
  auto analytic = [](double u) {
    const double lift_moment = 0.5 * kFinSlope * kFinMax * kRho * u * u * kFinArea * kFinArm;
    return std::asin(lift_moment / (kRho * kG * kVolume * kCb));
  };
  const double at_speed = analytic(sp.speed);
  const double at_one = analytic(1.0);
  const bool ok = std::abs(sp.pitch_up - at_speed) <= rad(1.0) && std::abs(sp.pitch_up - at_one) <= rad(1.0) &&
                  std::abs(deg(sp.pitch_up) - 20.0) <= 2.0;
  return {ok, fmt::format("steady pitch {:.3f} deg at u={:.3f}; analytic {:.3f} deg (at 1 m/s {:.3f} deg)",
                          deg(sp.pitch_up), sp.speed, deg(at_speed), deg(at_one))};
}

Outcome shifter_equilibrium() {
  bool ok = true;
  std::string detail;
  for (int k = 0; k < 5; ++k) {
    const double d = -kShifterTravel + k * (2.0 * kShifterTravel) / 4.0;
    const double got = validation::measure_shifter_pitch(vehicle(), d);
    const double expect = std::atan(kShifterMass * d / (kRho * kVolume * kCb));
    ok = ok && std::abs(got - expect) <= rad(1.0);
    detail += fmt::format("{}d={:+.3f}: {:.2f}/{:.2f} deg", detail.empty() ? "" : ", ", d, deg(got), deg(expect));
  }
  return {ok, detail};
}

Outcome envgrid_oracle() {
  auto affine = [](double t, double x, double y, double z) { return 1.5 - 0.002 * t + 0.7 * x - 1.3 * y + 0.25 * z; };
  auto grid = env::EnvGrid::sample("affine", {0.0, 600.0, 3600.0, 10800.0}, {-500.0, -20.0, 0.0, 3.0, 90.0, 1000.0},
                                   {-300.0, -299.0, -10.0, 150.0, 151.5}, {-400.0, -100.0, -30.0, -2.0, 0.0},
                                   affine);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ut(0.0, 10800.0), ux(-500.0, 1000.0), uy(-300.0, 151.5),
      uz(-400.0, 0.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double t = ut(rng), x = ux(rng), y = uy(rng), z = uz(rng);
    const double expect = affine(t, x, y, z);
    worst = std::max(worst, std::abs(grid.value(t, Vec3(x, y, z)) - expect) / std::max(1.0, std::abs(expect)));
  }

  // 10 x 100 x 100 x 10 = 1e6 values, uneven spacing on every axis.
  auto axis = [](std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double s = static_cast<double>(i) / static_cast<double>(n - 1);
      v[i] = lo + (hi - lo) * s * s;
    }
    return v;
  };
  auto big = env::EnvGrid::sample("big", axis(10, 0.0, 86400.0), axis(100, -5000.0, 5000.0),
                                  axis(100, -5000.0, 5000.0), axis(10, -500.0, 0.0),
                                  [](double t, double x, double y, double z) {
                                    return std::sin(1e-4 * t) + 1e-3 * x * y + z;
                                  });
  constexpr std::size_t kBatch = 4096;
  std::vector<std::tuple<double, Vec3>> queries;
  std::uniform_real_distribution<double> bt(0.0, 86400.0), bxy(-5000.0, 5000.0), bz(-500.0, 0.0);
  for (std::size_t i = 0; i < kBatch; ++i) queries.emplace_back(bt(rng), Vec3(bxy(rng), bxy(rng), bz(rng)));
  std::vector<double> per_query;
  volatile double sink = 0.0;
  for (int round = 0; round < 201; ++round) {
    double acc = 0.0;
    const auto t0 = Clock::now();
    for (const auto& [t, p] : queries) acc += big.value(t, p);
    per_query.push_back(seconds_since(t0) / static_cast<double>(kBatch));
    sink = sink + acc;
  }
  std::nth_element(per_query.begin(), per_query.begin() + 100, per_query.end());
  const double median_ns = per_query[100] * 1e9;
  return {worst < 1e-9 && median_ns < 1000.0,
          fmt::format("worst relative error {:.2e}; median query {:.1f} ns on {} values", worst, median_ns,
                      big.values().size())};
}

struct EventKey {
  double time;
  VehicleId sender, receiver;
  acoustics::EventKind kind;
  double distance;
  bool operator==(const EventKey&) const = default;
};

std::vector<EventKey> keys(const acoustics::AcousticChannel& ch) {
  std::vector<EventKey> out;
  for (const auto& e : ch.events()) out.push_back({e.time, e.sender, e.receiver, e.kind, e.distance});
  return out;
}

// One randomized channel scenario; returns violations and the event log.
std::pair<std::size_t, std::vector<EventKey>> channel_scenario(std::uint64_t seed, std::size_t& messages) {
  using namespace acoustics;
  std::mt19937_64 rng(seed * 7919 + 13);
  std::uniform_real_distribution<double> pos(-2500.0, 2500.0), depth(-300.0, 0.0), unit(0.0, 1.0);
  ChannelParams cp;
  cp.sound_speed = 1400.0 + 200.0 * unit(rng);
  cp.max_range = 1000.0 + 2000.0 * unit(rng);
  cp.drop_model = unit(rng) < 0.5 ? DropModel::HardCutoff : DropModel::Linear;
  cp.seed = seed;
  AcousticChannel ch(cp);

  const std::size_t n = 2 + static_cast<std::size_t>(unit(rng) * 5.0);
  std::vector<Endpoint> eps;
  for (std::size_t i = 0; i < n; ++i) eps.push_back({static_cast<VehicleId>(i + 1), Vec3(pos(rng), pos(rng), depth(rng))});

  struct Sent {
    AcousticMessage msg;
    std::map<VehicleId, double> arrival;
  };
  std::vector<Sent> sent;
  const std::size_t count = 1 + static_cast<std::size_t>(unit(rng) * 12.0);
  double t = 0.0;
  for (std::size_t m = 0; m < count; ++m) {
    t += 3.0 * unit(rng);
    const auto& from = eps[static_cast<std::size_t>(unit(rng) * static_cast<double>(n)) % n];
    AcousticMessage msg{from.id, {static_cast<std::uint8_t>(m), static_cast<std::uint8_t>(seed & 0xff)}, t,
                        from.position};
    Sent s{msg, {}};
    for (const auto& e : eps) {
      if (e.id == from.id) continue;
      s.arrival[e.id] = t + (e.position - from.position).norm() / cp.sound_speed;
    }
    ch.transmit(msg, eps);
    sent.push_back(std::move(s));
  }
  messages += count;

  std::size_t violations = 0;
  std::map<VehicleId, std::size_t> received;
  double now = 0.0;
  double prev_poll = 0.0;
  while (now < t + 10.0) {
    now += 0.05 + 0.3 * unit(rng);
    for (const auto& e : eps) {
      for (const auto& msg : ch.poll(e.id, now)) {
        ++received[e.id];
        const auto& s = sent.at(msg.payload[0]);
        const double arrive = s.arrival.at(e.id);
        // causal, and not held past the first poll after arrival
        if (arrive > now || arrive <= prev_poll - 1e-9) ++violations;
        if (msg.sender != s.msg.sender || msg.send_time != s.msg.send_time) ++violations;
      }
    }
    prev_poll = now;
  }

  std::size_t sends = 0, outcomes = 0;
  std::map<VehicleId, std::size_t> delivered;
  for (const auto& ev : ch.events()) {
    switch (ev.kind) {
      case EventKind::Send:
        ++sends;
        break;
      case EventKind::Deliver: {
        ++outcomes;
        ++delivered[ev.receiver];
        const auto it = std::find_if(sent.begin(), sent.end(), [&](const Sent& s) {
          return s.msg.sender == ev.sender && s.arrival.count(ev.receiver) &&
                 std::abs(s.arrival.at(ev.receiver) - ev.time) < 1e-9;
        });
        if (it == sent.end()) {
          ++violations;  // delivery time is not send time + d / c
          break;
        }
        const double d = (eps[ev.receiver - 1].position - it->msg.send_position).norm();
        if (std::abs(ev.distance - d) > 1e-9 * std::max(1.0, d)) ++violations;
        if (cp.drop_model == DropModel::HardCutoff && d > cp.max_range) ++violations;
        break;
      }
      case EventKind::DropRange:
        ++outcomes;
        if (cp.drop_model == DropModel::HardCutoff && ev.distance <= cp.max_range) ++violations;
        break;
      case EventKind::DropContention:
      case EventKind::DropModem:
        ++outcomes;
        ++violations;  // neither is enabled here
        break;
      default:
        break;
    }
  }
  if (sends != count * (n - 1)) ++violations;  // one Send row per receiver
  if (outcomes != count * (n - 1) || ch.pending() != 0) ++violations;
  for (const auto& [id, k] : delivered) {
    if (received[id] != k) ++violations;
  }
  for (const auto& [id, k] : received) {
    if (delivered[id] != k) ++violations;
  }
  return {violations, keys(ch)};
}

Outcome acoustics_suite() {
  std::size_t violations = 0, messages = 0, nondeterministic = 0;
  for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
    std::size_t scratch = 0;
    auto [v1, log1] = channel_scenario(seed, messages);
    auto [v2, log2] = channel_scenario(seed, scratch);
    violations += v1;
    if (log1 != log2) ++nondeterministic;
  }

  std::string reasons;
  std::vector<std::uint64_t> digests;
  bool aborted = true;
  std::size_t contention_drops = 0;
  for (int run = 0; run < 2; ++run) {
    auto cfg = scenario_file("hotbunk_contention");
    auto w = scenario::build_world(cfg);
    engine::run(w, cfg.duration);
    const auto& rv = *w.find("rv");
    aborted = aborted && rv.mission->phase() == mission::Phase::Aborted &&
              rv.mission->abort_reason().find("handshake") != std::string::npos;
    reasons += (run ? ", " : "") + rv.mission->abort_reason();
    digests.push_back(w.digest.value());
    for (const auto& e : w.channel.events()) contention_drops += e.kind == acoustics::EventKind::DropContention;
  }
  const bool ok = violations == 0 && nondeterministic == 0 && aborted && digests[0] == digests[1] &&
                  contention_drops > 0;
  return {ok, fmt::format("1000 scenarios, {} messages, {} violations, {} nondeterministic; contention: "
                          "abort reasons [{}], {} contention drops, digests {}",
                          messages, violations, nondeterministic, reasons, contention_drops / 2,
                          digests[0] == digests[1] ? "equal" : "differ")};
}

class Positions final : public trace::TraceSink {
 public:
  void write(const trace::TraceRow& row) override {
    by_id[row.id].push_back(row.position);
    if (row.id == by_id.begin()->first) times.push_back(row.time);
  }
  std::map<VehicleId, std::vector<Vec3>> by_id;
  std::vector<double> times;
};

Outcome hotbunk_nominal() {
  auto cfg = scenario_file("hotbunk_nominal");
  auto w = scenario::build_world(cfg);
  Positions pos;
  w.sinks.push_back(&pos);
  engine::run(w, cfg.duration);

  const auto& rv = *w.find("rv");
  const auto& sv = *w.find("sv");
  const auto& rvp = pos.by_id.at(rv.id);
  const auto& svp = pos.by_id.at(sv.id);
  double homing_start = -1.0, done_at = -1.0;
  for (const auto& tr : rv.mission->transitions()) {
    if (tr.to == mission::Phase::TerminalHomingFast && homing_start < 0.0) homing_start = tr.time;
    if (tr.to == mission::Phase::Done) done_at = tr.time;
  }
  double range_at_done = std::numeric_limits<double>::infinity();
  double running_min = std::numeric_limits<double>::infinity();
  double worst_reversal = 0.0;
  for (std::size_t i = 0; i < pos.times.size() && i < rvp.size() && i < svp.size(); ++i) {
    const double t = pos.times[i];
    const double r = (rvp[i] - svp[i]).norm();
    if (t >= homing_start && t <= done_at) {
      running_min = std::min(running_min, r);
      worst_reversal = std::max(worst_reversal, r - running_min);
    }
    if (std::abs(t - done_at) < 0.5 * cfg.physics_dt) range_at_done = r;
  }
  const bool nominal_ok = rv.mission->phase() == mission::Phase::Done && range_at_done <= 20.0 &&
                          homing_start >= 0.0 && worst_reversal <= 5.0 &&
                          sv.mission->phase() == mission::Phase::Surfaced;

  auto long_cfg = scenario_file("hotbunk_nominal", {"run.duration=7200", "run.stop_when_complete=false"});
  auto lw = scenario::build_world(long_cfg);
  const auto t0 = Clock::now();
  const auto res = engine::run(lw, long_cfg.duration);
  const double wall = seconds_since(t0);
  const bool long_ok = lw.clock.time() >= 7200.0 - 1e-6 && wall < 300.0;

  return {nominal_ok && long_ok,
          fmt::format("RV {} at {:.1f} s, range at Done {:.2f} m, worst reversal {:.2f} m in "
                      "terminal homing, SV {}; 2 h run: {} ticks in {:.1f} s wall",
                      mission::to_string(rv.mission->phase()), done_at, range_at_done, worst_reversal,
                      mission::to_string(sv.mission->phase()), res.ticks, wall)};
}

Outcome fault_matrix() {
  using mission::Phase;
  const auto base = scenario_file("hotbunk_nominal");
  const Phase phases[] = {Phase::Deployed, Phase::MidcourseGuidance, Phase::TerminalHomingFast,
                          Phase::TerminalHomingSlow, Phase::AcousticHandshake};
  const engine::Component comps[] = {engine::Component::Propeller, engine::Component::AcousticModem,
                                     engine::Component::Elevator, engine::Component::MassShifter,
                                     engine::Component::Rudder};
  int runs = 0, hangs = 0, done = 0, aborted = 0;
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
        const auto res = engine::run(w, cfg.duration);
        ++runs;
        const auto p = w.find("rv")->mission->phase();
        done += p == Phase::Done;
        aborted += p == Phase::Aborted;
        if ((p != Phase::Done && p != Phase::Aborted) || res.status != engine::RunStatus::MissionsComplete) {
          ++hangs;
          if (first_hang.empty()) {
            first_hang = fmt::format(", first: {} on {} at {} ended {} / {}", engine::to_string(comp),
                                     cfg.vehicles[target].name, mission::to_string(ph), mission::to_string(p),
                                     engine::to_string(res.status));
          }
        }
      }
    }
  }
  return {hangs == 0, fmt::format("{} runs: {} Done, {} Aborted, {} hangs{}", runs, done, aborted, hangs, first_hang)};
}

std::string machine() {
  std::ifstream in("/proc/cpuinfo");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) return line.substr(colon + 2);
    }
  }
  return "unknown cpu";
}

Outcome rtf_scaling() {
  const auto base = scenario_file("yoyo");
  auto make = [&](std::size_t n, double dt) {
    auto cfg = scenario::replicate(base, n);
    cfg.physics_dt = dt;
    cfg.control_period = dt * std::max(1.0, std::round(base.control_period / dt));
    cfg.stop_when_complete = false;
    return scenario::build_world(cfg);
  };
  const auto by_count = engine::rtf_sweep(make, {1, 2, 4, 8}, {0.03}, 600.0, 3);
  const auto by_dt = engine::rtf_sweep(make, {1}, {0.01, 0.02, 0.03}, 600.0, 3);

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : by_count) {
    const double x = std::log(static_cast<double>(r.n_vehicles));
    const double y = std::log(r.rtf);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = static_cast<double>(by_count.size());
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  const double single = by_count.front().rtf;
  const bool increasing = by_dt[0].rtf < by_dt[1].rtf && by_dt[1].rtf < by_dt[2].rtf;
  const bool ok = single > 100.0 && slope >= -1.2 && slope <= -0.8 && increasing;
  std::string counts, dts;
  for (const auto& r : by_count) counts += fmt::format(" n{}={:.0f}", r.n_vehicles, r.rtf);
  for (const auto& r : by_dt) dts += fmt::format(" {:.0f}ms={:.0f}", r.physics_dt * 1e3, r.rtf);
  return {ok, fmt::format("rtf:{}; slope {:.3f}; by dt:{}; {} ({} threads)", counts, slope, dts, machine(),
                          std::thread::hardware_concurrency())};
}

Outcome timestep_robustness() {
  const auto fine = validation::run_open_loop_maneuver(vehicle(), 0.001);
  const auto coarse = validation::run_open_loop_maneuver(vehicle(), 0.03);
  const double gap = (fine.end - coarse.end).norm();
  const bool open_ok = gap <= 0.05 * fine.path_length;

  auto cfg = scenario_file("yoyo");
  auto w = scenario::build_world(cfg);
  Positions pos;
  w.sinks.push_back(&pos);
  engine::run(w, cfg.duration);
  const auto& track = pos.by_id.begin()->second;
  double shallowest = 1e9, deepest = -1e9;
  for (const auto& p : track) {
    shallowest = std::min(shallowest, -p.z());
    deepest = std::max(deepest, -p.z());
  }
  const auto& yc = cfg.vehicles.front().yoyo;
  const Fit fit = circle_through(track);
  const bool band = shallowest >= yc.depth_min - 2.0 && deepest <= yc.depth_max + 2.0 &&
                    shallowest <= yc.depth_min + 2.0 && deepest >= yc.depth_max - 2.0;
  const bool round = fit.rms < 0.1 * fit.r;
  return {open_ok && band && round && cfg.physics_dt == 0.03,
          fmt::format("open loop end gap {:.3f} m over {:.1f} m path; yo-yo at dt {} s: depth [{:.2f}, {:.2f}] m "
                      "for band [{}, {}], circle r {:.2f} m rms {:.3f} m",
                      gap, fine.path_length, cfg.physics_dt, shallowest, deepest, yc.depth_min, yc.depth_max,
                      fit.r, fit.rms)};
}

Outcome determinism() {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(kConfigDir / "scenarios")) {
    if (e.path().extension() == ".cfg") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  int mismatches = 0;
  std::string detail;
  for (const auto& f : files) {
    std::uint64_t digest[2];
    std::uint64_t rows[2];
    for (int i = 0; i < 2; ++i) {
      const auto cfg = scenario::load_scenario(f);
      auto w = scenario::build_world(cfg);
      engine::run(w, cfg.duration);
      digest[i] = w.digest.value();
      rows[i] = w.digest.rows();
    }
    const bool same = digest[0] == digest[1] && rows[0] == rows[1];
    mismatches += !same;
    detail += fmt::format("{}{} {:016x} ({} rows){}", detail.empty() ? "" : ", ", f.stem().string(), digest[0],
                          rows[0], same ? "" : " MISMATCH");
  }
  const auto a = validation::run_open_loop_maneuver(vehicle(), 0.02);
  const auto b = validation::run_open_loop_maneuver(vehicle(), 0.02);
  const bool open_same = a.end == b.end && a.path_length == b.path_length;
  return {mismatches == 0 && open_same && !files.empty(),
          fmt::format("{}; open-loop maneuver {}", detail, open_same ? "identical" : "differs")};
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::err);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"terminal_velocity", terminal_velocity},
      {"hydrostatic_oscillation", hydrostatic_oscillation},
      {"circle_test", circle_test},
      {"max_pitch", max_pitch},
      {"shifter_equilibrium", shifter_equilibrium},
      {"envgrid_oracle", envgrid_oracle},
      {"acoustics", acoustics_suite},
      {"hotbunk_nominal", hotbunk_nominal},
      {"fault_matrix", fault_matrix},
      {"rtf_scaling", rtf_scaling},
      {"timestep_robustness", timestep_robustness},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& [name, body] = criteria[i];
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = body();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << fmt::format("{:>2} {:<24} {}  {} [{:.1f} s]\n", i + 1, name, o.pass ? "PASS" : "FAIL", o.detail,
                             seconds_since(t0))
              << std::flush;
  }
  std::cout << fmt::format("{}/{} criteria passed\n", criteria.size() - static_cast<std::size_t>(failed),
                           criteria.size());
  return failed == 0 ? 0 : 1;
}
