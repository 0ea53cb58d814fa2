#include <auvsim/error.hpp>
#include <auvsim/trace.hpp>

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace auvsim;
using namespace auvsim::trace;

namespace {

TraceRow random_row(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 100.0);
  TraceRow r;
  r.tick = rng();
  r.time = n(rng);
  r.id = static_cast<VehicleId>(rng());
  r.position = Vec3(n(rng), n(rng), n(rng));
  r.orientation = Quat(n(rng), n(rng), n(rng), n(rng)).normalized();
  r.lin_vel = Vec3(n(rng), n(rng), n(rng));
  r.ang_vel = Vec3(n(rng), n(rng), n(rng));
  r.command = {n(rng), n(rng), n(rng), n(rng)};
  r.shifter_position = n(rng);
  r.phase = static_cast<mission::Phase>(rng() % 14);
  return r;
}

void expect_equal(const TraceRow& a, const TraceRow& b) {
  EXPECT_EQ(a.tick, b.tick);
  EXPECT_EQ(a.time, b.time);
  EXPECT_EQ(a.id, b.id);
  EXPECT_EQ(a.position, b.position);
  EXPECT_EQ(a.orientation.coeffs(), b.orientation.coeffs());
  EXPECT_EQ(a.lin_vel, b.lin_vel);
  EXPECT_EQ(a.ang_vel, b.ang_vel);
  EXPECT_EQ(a.command.prop_speed, b.command.prop_speed);
  EXPECT_EQ(a.command.rudder, b.command.rudder);
  EXPECT_EQ(a.command.elevator, b.command.elevator);
  EXPECT_EQ(a.command.shifter_target, b.command.shifter_target);
  EXPECT_EQ(a.shifter_position, b.shifter_position);
  EXPECT_EQ(a.phase, b.phase);
}

}  // namespace

TEST(Trace, RecordRoundTrip) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const auto row = random_row(rng);
    expect_equal(decode(encode(row)), row);
  }
}

TEST(Trace, RecordIsLittleEndian) {
  TraceRow row;
  row.tick = 0x0102030405060708ull;
  const auto r = encode(row);
  EXPECT_EQ(r[0], 0x08);
  EXPECT_EQ(r[7], 0x01);
  EXPECT_EQ(r.size(), kRecordSize);
}

TEST(Trace, BinaryFileRoundTrip) {
  std::mt19937_64 rng(2);
  std::stringstream buf;
  std::vector<TraceRow> rows;
  {
    BinaryTraceWriter w(buf);
    for (int i = 0; i < 50; ++i) {
      rows.push_back(random_row(rng));
      w.write(rows.back());
    }
    w.flush();
  }
  EXPECT_EQ(buf.str().size(), 8 + 50 * kRecordSize);
  const auto back = read_binary_trace(buf);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) expect_equal(back[i], rows[i]);
}

TEST(Trace, BinaryRejectsBadInput) {
  std::stringstream junk("NOTATRACE");
  EXPECT_THROW(read_binary_trace(junk), DataError);
  std::stringstream buf;
  BinaryTraceWriter w(buf);
  w.write(TraceRow{});
  std::string s = buf.str();
  s.pop_back();
  std::stringstream cut(s);
  EXPECT_THROW(read_binary_trace(cut), DataError);
}

TEST(Trace, CsvRowsParseBack) {
  std::mt19937_64 rng(3);
  std::stringstream out;
  CsvTraceWriter w(out);
  const auto row = random_row(rng);
  w.write(row);
  std::string header, line;
  std::getline(out, header);
  std::getline(out, line);
  EXPECT_EQ(header, "tick,time,id,x,y,z,qw,qx,qy,qz,u,v,w,p,q,r,cmd_prop,cmd_rudder,cmd_elevator,cmd_shifter,shifter,phase");
  std::vector<std::string> cols;
  std::stringstream ls(line);
  for (std::string c; std::getline(ls, c, ',');) cols.push_back(c);
  ASSERT_EQ(cols.size(), 22u);
  EXPECT_EQ(std::stoull(cols[0]), row.tick);
  EXPECT_EQ(std::stod(cols[3]), row.position.x());
  EXPECT_EQ(std::stod(cols[20]), row.shifter_position);
  EXPECT_EQ(cols[21], mission::to_string(row.phase));
}

TEST(Trace, DigestSeesEveryBit) {
  std::mt19937_64 rng(4);
  const auto row = random_row(rng);
  TraceDigest a, b;
  a.write(row);
  auto nudged = row;
  nudged.position.x() = std::nextafter(row.position.x(), 1e300);
  b.write(nudged);
  EXPECT_NE(a.value(), b.value());
  TraceDigest c;
  c.write(row);
  EXPECT_EQ(a.value(), c.value());
  EXPECT_EQ(c.rows(), 1u);
}
