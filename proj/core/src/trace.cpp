#include "auvsim/trace.hpp"

#include "auvsim/error.hpp"

#include <fmt/format.h>

#include <bit>
#include <cstring>
#include <istream>
#include <ostream>

namespace auvsim::trace {

namespace {

constexpr char kMagic[8] = {'A', 'U', 'V', 'T', 'R', 'C', '0', '1'};

class Writer {
 public:
  explicit Writer(Record& r) : r_(r) {}
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) r_[pos_++] = static_cast<std::uint8_t>(v >> (8 * i));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) r_[pos_++] = static_cast<std::uint8_t>(v >> (8 * i));
  }
  void u8(std::uint8_t v) { r_[pos_++] = v; }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void vec(const Vec3& v) {
    f64(v.x());
    f64(v.y());
    f64(v.z());
  }

 private:
  Record& r_;
  std::size_t pos_ = 0;
};

class Reader {
 public:
  explicit Reader(const Record& r) : r_(r) {}
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(r_[pos_++]) << (8 * i);
    return v;
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(r_[pos_++]) << (8 * i);
    return v;
  }
  std::uint8_t u8() { return r_[pos_++]; }
  double f64() { return std::bit_cast<double>(u64()); }
  Vec3 vec() {
    const double x = f64();
    const double y = f64();
    return {x, y, f64()};
  }

 private:
  const Record& r_;
  std::size_t pos_ = 0;
};

}  // namespace

Record encode(const TraceRow& row) {
  Record r{};
  Writer w(r);
  w.u64(row.tick);
  w.f64(row.time);
  w.u32(row.id);
  w.vec(row.position);
  w.f64(row.orientation.w());
  w.f64(row.orientation.x());
  w.f64(row.orientation.y());
  w.f64(row.orientation.z());
  w.vec(row.lin_vel);
  w.vec(row.ang_vel);
  w.f64(row.command.prop_speed);
  w.f64(row.command.rudder);
  w.f64(row.command.elevator);
  w.f64(row.command.shifter_target);
  w.f64(row.shifter_position);
  w.u8(static_cast<std::uint8_t>(row.phase));
  return r;
}

TraceRow decode(const Record& record) {
  Reader rd(record);
  TraceRow row;
  row.tick = rd.u64();
  row.time = rd.f64();
  row.id = rd.u32();
  row.position = rd.vec();
  const double w = rd.f64();
  const double x = rd.f64();
  const double y = rd.f64();
  const double z = rd.f64();
  row.orientation = Quat(w, x, y, z);
  row.lin_vel = rd.vec();
  row.ang_vel = rd.vec();
  row.command.prop_speed = rd.f64();
  row.command.rudder = rd.f64();
  row.command.elevator = rd.f64();
  row.command.shifter_target = rd.f64();
  row.shifter_position = rd.f64();
  row.phase = static_cast<mission::Phase>(rd.u8());
  return row;
}

CsvTraceWriter::CsvTraceWriter(std::ostream& out) : out_(out) {
  out_ << "tick,time,id,x,y,z,qw,qx,qy,qz,u,v,w,p,q,r,"
          "cmd_prop,cmd_rudder,cmd_elevator,cmd_shifter,shifter,phase\n";
}

void CsvTraceWriter::write(const TraceRow& r) {
  const auto& q = r.orientation;
  out_ << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.tick,
                      r.time, r.id, r.position.x(), r.position.y(), r.position.z(), q.w(), q.x(),
                      q.y(), q.z(), r.lin_vel.x(), r.lin_vel.y(), r.lin_vel.z(), r.ang_vel.x(),
                      r.ang_vel.y(), r.ang_vel.z(), r.command.prop_speed, r.command.rudder,
                      r.command.elevator, r.command.shifter_target, r.shifter_position,
                      mission::to_string(r.phase));
}

void CsvTraceWriter::flush() { out_.flush(); }

BinaryTraceWriter::BinaryTraceWriter(std::ostream& out) : out_(out) {
  out_.write(kMagic, sizeof kMagic);
}

void BinaryTraceWriter::write(const TraceRow& row) {
  const Record r = encode(row);
  out_.write(reinterpret_cast<const char*>(r.data()), static_cast<std::streamsize>(r.size()));
}

void BinaryTraceWriter::flush() { out_.flush(); }

std::vector<TraceRow> read_binary_trace(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw DataError("not an auvsim binary trace");
  }
  std::vector<TraceRow> rows;
  Record r;
  while (in.read(reinterpret_cast<char*>(r.data()), static_cast<std::streamsize>(r.size()))) {
    rows.push_back(decode(r));
  }
  if (in.gcount() != 0) throw DataError("binary trace ends in a partial record");
  return rows;
}

void TraceDigest::write(const TraceRow& row) {
  for (std::uint8_t b : encode(row)) {
    hash_ ^= b;
    hash_ *= 0x100000001b3ull;
  }
  ++rows_;
}

}  // namespace auvsim::trace
