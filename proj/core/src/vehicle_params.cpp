#include "auvsim/vehicle_params.hpp"

#include "auvsim/config.hpp"
#include "auvsim/error.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>

namespace auvsim::dynamics {

double ThrusterParams::kt(double j) const {
  if (kt_table.empty()) return kt_constant;
  if (j <= kt_table.front().first) return kt_table.front().second;
  if (j >= kt_table.back().first) return kt_table.back().second;
  auto hi = std::upper_bound(kt_table.begin(), kt_table.end(), j,
                             [](double x, const auto& p) { return x < p.first; });
  auto lo = std::prev(hi);
  const double f = (j - lo->first) / (hi->first - lo->first);
  return lo->second + f * (hi->second - lo->second);
}

double FinParams::lift_coefficient(double alpha) const {
  if (std::abs(alpha) <= stall_angle) return lift_slope * alpha;
  return std::copysign(post_stall_cl, alpha);
}

double MassShifterParams::clamp(double d) const {
  const double c = std::clamp(d, travel_min, travel_max);
  if (c != d) {
    spdlog::warn("mass shifter command {} m outside [{}, {}]; clamped to {}", d, travel_min,
                 travel_max, c);
  }
  return c;
}

std::vector<std::string> VehicleParams::violations() const {
  std::vector<std::string> out;
  auto need = [&out](bool ok, std::string msg) {
    if (!ok) out.push_back(std::move(msg));
  };
  static constexpr const char* kAxes[6] = {"surge", "sway", "heave", "roll", "pitch", "yaw"};

  need(hydro.mass > 0.0, "hydro.mass must be > 0");
  need(hydro.fluid_density > 0.0, "hydro.fluid_density must be > 0");
  need((hydro.inertia.array() > 0.0).all(), "hydro.inertia entries must be > 0");
  for (int i = 0; i < 6; ++i) {
    need(hydro.added_mass[i] >= 0.0, fmt::format("hydro.added_mass[{}] must be >= 0", kAxes[i]));
    need(hydro.linear_damping[i] <= 0.0,
         fmt::format("hydro.linear_damping[{}] must be <= 0", kAxes[i]));
    need(hydro.quadratic_damping[i] <= 0.0,
         fmt::format("hydro.quadratic_damping[{}] must be <= 0", kAxes[i]));
  }

  need(buoyancy.volume > 0.0, "buoyancy.volume must be > 0");
  need(buoyancy.gravity > 0.0, "buoyancy.gravity must be > 0");
  need(buoyancy.cob_offset > 0.0, "buoyancy.cob_offset must be > 0 for a form-stable vehicle");

  need(thruster.prop_diameter > 0.0, "thruster.prop_diameter must be > 0");
  need(thruster.max_prop_speed >= 0.0, "thruster.max_prop_speed must be >= 0");
  for (std::size_t i = 1; i < thruster.kt_table.size(); ++i) {
    need(thruster.kt_table[i].first > thruster.kt_table[i - 1].first,
         "thruster.kt_j must be strictly increasing");
  }

  for (const auto* fin : {&rudder, &elevator}) {
    const char* name = fin == &rudder ? "rudder" : "elevator";
    need(fin->area > 0.0, fmt::format("{}.area must be > 0", name));
    need(fin->lift_slope > 0.0, fmt::format("{}.lift_slope must be > 0", name));
    need(fin->stall_angle > 0.0 && fin->stall_angle < kPi / 2.0,
         fmt::format("{}.stall_angle must be in (0, pi/2)", name));
    need(fin->max_deflection >= 0.0, fmt::format("{}.max_deflection must be >= 0", name));
  }

  need(shifter.mass > 0.0, "mass_shifter.mass must be > 0");
  need(shifter.travel_min < shifter.travel_max, "mass_shifter travel_min must be < travel_max");
  need(shifter.slew_rate > 0.0, "mass_shifter.slew_rate must be > 0");
  return out;
}

VehicleParams reference_vehicle() {
  VehicleParams p;
  p.name = "reference";

  p.hydro.mass = 147.5;
  p.hydro.inertia = Vec3(3.0, 42.0, 42.0);
  p.hydro.added_mass = {4.9, 126.3, 126.3, 0.0, 33.5, 33.5};
  // N_r = -m * u_ref * |arm| with u_ref = 1 m/s keeps the steady turn on the
  // rudder-lift circle; N_r|r| is zero for the same reason.
  p.hydro.linear_damping = {-2.0, -200.0, -200.0, -10.0, -60.0, -95.875};
  p.hydro.quadratic_damping = {-48.0, -600.0, -600.0, -0.2, -5.0, 0.0};
  p.hydro.fluid_density = 1025.0;

  p.buoyancy.volume = 147.5 / 1025.0;
  p.buoyancy.cob_offset = 0.017758;
  p.buoyancy.gravity = 9.81;

  p.thruster.prop_diameter = 0.2;
  p.thruster.kt_table = {{0.0, 0.40}, {0.4, 0.30}, {0.8, 0.15}, {1.2, 0.0}};
  p.thruster.kt_constant = 0.3;
  p.thruster.max_prop_speed = 10.574;

  FinParams fin;
  fin.area = 0.0244;
  fin.lift_slope = 4.13;
  fin.stall_angle = 0.35;
  fin.post_stall_cl = 4.13 * 0.35;
  fin.moment_arm = -0.65;
  fin.max_deflection = 0.2618;
  p.rudder = fin;
  p.rudder.axis = FinAxis::Vertical;
  p.elevator = fin;
  p.elevator.axis = FinAxis::Horizontal;

  p.shifter.mass = 26.0;
  p.shifter.travel_min = -0.03;
  p.shifter.travel_max = 0.03;
  p.shifter.slew_rate = 0.01;
  return p;
}

namespace {

std::array<double, 6> six(const ConfigSection& sec, const std::string& key) {
  auto v = sec.get_doubles(key);
  if (v.size() != 6) {
    throw ConfigError("'" + key + "': expected 6 comma-separated numbers", sec.line_of(key), sec.source());
  }
  std::array<double, 6> out{};
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

FinParams read_fin(const ConfigSection& sec, FinAxis axis) {
  FinParams f;
  f.axis = axis;
  f.area = sec.get_double("area");
  f.lift_slope = sec.get_double("lift_slope");
  f.stall_angle = sec.get_double("stall_angle");
  f.post_stall_cl = sec.get_double("post_stall_cl", f.lift_slope * f.stall_angle);
  f.moment_arm = sec.get_double("moment_arm");
  f.max_deflection = sec.get_double("max_deflection");
  return f;
}

}  // namespace

VehicleParams parse_vehicle_params(const ConfigDocument& doc, bool strict) {
  VehicleParams p;
  p.name = doc.section_or_empty("vehicle").get_string("name", "vehicle");

  const auto& hydro = doc.section("hydro");
  p.hydro.mass = hydro.get_double("mass");
  p.hydro.inertia = hydro.get_vec3("inertia");
  p.hydro.added_mass = six(hydro, "added_mass");
  p.hydro.linear_damping = six(hydro, "linear_damping");
  p.hydro.quadratic_damping = six(hydro, "quadratic_damping");
  p.hydro.fluid_density = hydro.get_double("fluid_density", 1025.0);

  const auto& buoy = doc.section("buoyancy");
  p.buoyancy.volume = buoy.get_double("volume");
  p.buoyancy.cob_offset = buoy.get_double("cob_offset");
  p.buoyancy.gravity = buoy.get_double("gravity", 9.81);

  const auto& thr = doc.section("thruster");
  p.thruster.prop_diameter = thr.get_double("prop_diameter");
  p.thruster.kt_constant = thr.get_double("kt_constant", 0.0);
  p.thruster.max_prop_speed = thr.get_double("max_prop_speed");
  if (thr.has("kt_j") || thr.has("kt_values")) {
    auto js = thr.get_doubles("kt_j");
    auto ks = thr.get_doubles("kt_values");
    if (js.size() != ks.size()) {
      throw ConfigError("kt_j and kt_values differ in length", thr.line_of("kt_values"), doc.source());
    }
    for (std::size_t i = 0; i < js.size(); ++i) p.thruster.kt_table.emplace_back(js[i], ks[i]);
  }

  p.rudder = read_fin(doc.section("rudder"), FinAxis::Vertical);
  p.elevator = read_fin(doc.section("elevator"), FinAxis::Horizontal);

  const auto& ms = doc.section("mass_shifter");
  p.shifter.mass = ms.get_double("mass");
  p.shifter.travel_min = ms.get_double("travel_min");
  p.shifter.travel_max = ms.get_double("travel_max");
  p.shifter.slew_rate = ms.get_double("slew_rate");

  doc.reject_unused();

  auto bad = p.violations();
  if (!bad.empty()) {
    if (strict) {
      throw ConfigError(fmt::format("invalid vehicle parameters: {}", fmt::join(bad, "; ")), 0,
                        doc.source());
    }
    for (const auto& msg : bad) spdlog::warn("{}: {}", doc.source(), msg);
  }
  return p;
}

VehicleParams load_vehicle_params(const std::filesystem::path& path, bool strict) {
  return parse_vehicle_params(ConfigDocument::load(path), strict);
}

std::string format_vehicle_params(const VehicleParams& p) {
  auto fin = [](const char* name, const FinParams& f) {
    return fmt::format(
        "[{}]\narea = {}\nlift_slope = {}\nstall_angle = {}\npost_stall_cl = {}\n"
        "moment_arm = {}\nmax_deflection = {}\n\n",
        name, f.area, f.lift_slope, f.stall_angle, f.post_stall_cl, f.moment_arm, f.max_deflection);
  };
  std::vector<double> js, ks;
  for (const auto& [j, k] : p.thruster.kt_table) {
    js.push_back(j);
    ks.push_back(k);
  }
  std::string out;
  out += fmt::format("[vehicle]\nname = {}\n\n", p.name);
  out += fmt::format(
      "[hydro]\nmass = {}\ninertia = {}, {}, {}\nadded_mass = {}\nlinear_damping = {}\n"
      "quadratic_damping = {}\nfluid_density = {}\n\n",
      p.hydro.mass, p.hydro.inertia.x(), p.hydro.inertia.y(), p.hydro.inertia.z(),
      fmt::join(p.hydro.added_mass, ", "), fmt::join(p.hydro.linear_damping, ", "),
      fmt::join(p.hydro.quadratic_damping, ", "), p.hydro.fluid_density);
  out += fmt::format("[buoyancy]\nvolume = {}\ncob_offset = {}\ngravity = {}\n\n", p.buoyancy.volume,
                     p.buoyancy.cob_offset, p.buoyancy.gravity);
  out += fmt::format("[thruster]\nprop_diameter = {}\nmax_prop_speed = {}\nkt_constant = {}\n",
                     p.thruster.prop_diameter, p.thruster.max_prop_speed, p.thruster.kt_constant);
  if (!js.empty()) {
    out += fmt::format("kt_j = {}\nkt_values = {}\n", fmt::join(js, ", "), fmt::join(ks, ", "));
  }
  out += "\n";
  out += fin("rudder", p.rudder);
  out += fin("elevator", p.elevator);
  out += fmt::format("[mass_shifter]\nmass = {}\ntravel_min = {}\ntravel_max = {}\nslew_rate = {}\n",
                     p.shifter.mass, p.shifter.travel_min, p.shifter.travel_max,
                     p.shifter.slew_rate);
  return out;
}

}  // namespace auvsim::dynamics
