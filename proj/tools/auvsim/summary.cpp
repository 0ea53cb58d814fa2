#include "summary.hpp"

#include <fmt/format.h>

#include <ostream>
#include <sstream>

namespace auvsim::cli {

RangeTracker::RangeTracker(std::vector<std::pair<VehicleId, VehicleId>> pairs)
    : pairs_(std::move(pairs)),
      min_(pairs_.size(), std::numeric_limits<double>::infinity()),
      last_(pairs_.size(), std::numeric_limits<double>::quiet_NaN()) {}

void RangeTracker::close_tick() {
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    auto a = positions_.find(pairs_[i].first);
    auto b = positions_.find(pairs_[i].second);
    if (a == positions_.end() || b == positions_.end()) continue;
    last_[i] = (a->second - b->second).norm();
    min_[i] = std::min(min_[i], last_[i]);
  }
}

void RangeTracker::write(const trace::TraceRow& row) {
  if (row.tick != tick_ && !positions_.empty()) close_tick();
  tick_ = row.tick;
  positions_[row.id] = row.position;
}

void RangeTracker::flush() { close_tick(); }

std::vector<std::pair<VehicleId, VehicleId>> relief_pairs(const scenario::ScenarioConfig& cfg) {
  std::vector<std::pair<VehicleId, VehicleId>> out;
  for (const auto& v : cfg.vehicles) {
    if (v.mission != scenario::MissionKind::HotBunk || v.hotbunk.role != mission::Role::Relief) continue;
    for (const auto& p : cfg.vehicles) {
      if (p.name == v.partner) out.emplace_back(v.id, p.id);
    }
  }
  return out;
}

void write_summary(std::ostream& out, const scenario::ScenarioConfig& cfg, const engine::World& w,
                   const engine::RunResult& result, const RangeTracker& ranges, int exit_code) {
  out << fmt::format("exit_code={}\n", exit_code);
  out << fmt::format("status={}\n", engine::to_string(result.status));
  if (!result.diagnostic.empty()) out << fmt::format("diagnostic={}\n", result.diagnostic);
  out << fmt::format("sim_time={}\n", w.clock.time());
  out << fmt::format("ticks={}\n", result.ticks);
  if (result.rtf) {
    out << fmt::format("wall_seconds={}\n", result.rtf->wall_seconds);
    out << fmt::format("rtf={}\n", result.rtf->rtf);
  } else {
    out << "rtf=\n";
  }
  out << fmt::format("trace_digest={:016x}\n", w.digest.value());

  double min_range = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ranges.pairs().size(); ++i) {
    min_range = std::min(min_range, ranges.min_range(i));
    out << fmt::format("pair.{}.final_range={}\n", i, ranges.last_range(i));
  }
  if (!ranges.pairs().empty()) out << fmt::format("min_range={}\n", min_range);

  std::string reason;
  for (const auto& v : w.vehicles) {
    out << fmt::format("vehicle.{}.phase={}\n", v.name, mission::to_string(v.mission->phase()));
    if (auto r = v.mission->abort_reason(); !r.empty()) {
      out << fmt::format("vehicle.{}.abort_reason={}\n", v.name, r);
      if (reason.empty()) reason = r;
    }
    if (std::isfinite(v.min_altitude)) out << fmt::format("vehicle.{}.min_altitude={}\n", v.name, v.min_altitude);
  }
  if (!reason.empty()) out << fmt::format("reason={}\n", reason);

  std::istringstream effective(cfg.effective);
  std::string line;
  std::string section;
  while (std::getline(effective, line)) {
    if (line.empty()) continue;
    if (line.front() == '[') {
      section = line.substr(1, line.size() - 2);
      continue;
    }
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    out << fmt::format("config.{}.{}={}\n", section, line.substr(0, eq), line.substr(eq + 3));
  }
}

}  // namespace auvsim::cli
