#pragma once

#include <auvsim/engine.hpp>
#include <auvsim/scenario.hpp>
#include <auvsim/trace.hpp>

#include <iosfwd>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace auvsim::cli {

/// Tracks the true distance between each relief vehicle and its partner.
class RangeTracker final : public trace::TraceSink {
 public:
  explicit RangeTracker(std::vector<std::pair<VehicleId, VehicleId>> pairs);
  void write(const trace::TraceRow& row) override;
  /// Accounts for the last tick; the engine calls this when a run ends.
  void flush() override;

  double min_range(std::size_t pair) const { return min_[pair]; }
  double last_range(std::size_t pair) const { return last_[pair]; }
  const std::vector<std::pair<VehicleId, VehicleId>>& pairs() const { return pairs_; }

 private:
  void close_tick();

  std::vector<std::pair<VehicleId, VehicleId>> pairs_;
  std::vector<double> min_;
  std::vector<double> last_;
  std::map<VehicleId, Vec3> positions_;
  std::uint64_t tick_ = 0;
};

std::vector<std::pair<VehicleId, VehicleId>> relief_pairs(const scenario::ScenarioConfig& cfg);

/// key=value lines: outcome, timing, per-vehicle phases, then the effective config.
void write_summary(std::ostream& out, const scenario::ScenarioConfig& cfg, const engine::World& w,
                   const engine::RunResult& result, const RangeTracker& ranges, int exit_code);

}  // namespace auvsim::cli
