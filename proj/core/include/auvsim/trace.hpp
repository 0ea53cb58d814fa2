#pragma once

#include "auvsim/mission.hpp"
#include "auvsim/types.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace auvsim::trace {

/// One vehicle at the end of one tick.
struct TraceRow {
  std::uint64_t tick = 0;
  double time = 0.0;
  VehicleId id = 0;
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();
  Vec3 lin_vel = Vec3::Zero();
  Vec3 ang_vel = Vec3::Zero();
  mission::ActuatorCommand command;
  double shifter_position = 0.0;
  mission::Phase phase = mission::Phase::Idle;
};

/// Fixed little-endian record used by the binary sink and the digest.
constexpr std::size_t kRecordSize = 8 + 8 + 4 + 8 * 3 + 8 * 4 + 8 * 3 + 8 * 3 + 8 * 4 + 8 + 1;
using Record = std::array<std::uint8_t, kRecordSize>;
Record encode(const TraceRow& row);
TraceRow decode(const Record& record);

class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void write(const TraceRow& row) = 0;
  virtual void flush() {}
};

class MemoryTrace final : public TraceSink {
 public:
  void write(const TraceRow& row) override { rows_.push_back(row); }
  const std::vector<TraceRow>& rows() const { return rows_; }

 private:
  std::vector<TraceRow> rows_;
};

/// Header line then one row per write; doubles in shortest round-trip form.
class CsvTraceWriter final : public TraceSink {
 public:
  explicit CsvTraceWriter(std::ostream& out);
  void write(const TraceRow& row) override;
  void flush() override;

 private:
  std::ostream& out_;
};

/// "AUVTRC01" followed by kRecordSize-byte records.
class BinaryTraceWriter final : public TraceSink {
 public:
  explicit BinaryTraceWriter(std::ostream& out);
  void write(const TraceRow& row) override;
  void flush() override;

 private:
  std::ostream& out_;
};

std::vector<TraceRow> read_binary_trace(std::istream& in);

/// FNV-1a (64-bit) over the binary records; equal digests mean equal traces.
class TraceDigest final : public TraceSink {
 public:
  void write(const TraceRow& row) override;
  std::uint64_t value() const { return hash_; }
  std::uint64_t rows() const { return rows_; }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ull;
  std::uint64_t rows_ = 0;
};

}  // namespace auvsim::trace
