#include <auvsim/config.hpp>
#include <auvsim/error.hpp>

#include <gtest/gtest.h>

#include <functional>

using auvsim::ConfigDocument;
using auvsim::ConfigError;

namespace {

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "<no error>";
}

}  // namespace

TEST(Config, ReadsTypedValuesAndSkipsComments) {
  auto doc = ConfigDocument::parse(R"(
# leading comment
[run]
duration = 12.5   ; trailing comment
steps = 40
trace = out/run#1.csv
live = yes

[vehicle.a]
position = 1, -2.5, 3e2
)");
  const auto& run = doc.section("run");
  EXPECT_DOUBLE_EQ(run.get_double("duration"), 12.5);
  EXPECT_EQ(run.get_int("steps"), 40);
  EXPECT_EQ(run.get_string("trace"), "out/run#1.csv");
  EXPECT_TRUE(run.get_bool("live", false));
  const auto p = doc.section("vehicle.a").get_vec3("position");
  EXPECT_DOUBLE_EQ(p.x(), 1.0);
  EXPECT_DOUBLE_EQ(p.y(), -2.5);
  EXPECT_DOUBLE_EQ(p.z(), 300.0);
}

TEST(Config, FallbacksApplyOnlyToAbsentKeys) {
  auto doc = ConfigDocument::parse("[s]\nx = 2\n");
  const auto& s = doc.section("s");
  EXPECT_DOUBLE_EQ(s.get_double("x", 9.0), 2.0);
  EXPECT_DOUBLE_EQ(s.get_double("y", 9.0), 9.0);
  EXPECT_EQ(s.get_string("z", "dflt"), "dflt");
}

TEST(Config, ErrorsCarrySourceAndLine) {
  EXPECT_EQ(error_of([] { ConfigDocument::parse("[a]\nx = 1\nx = 2\n", "f.cfg"); }),
            "f.cfg:3: duplicate key 'x' in [a]");
  EXPECT_EQ(error_of([] { ConfigDocument::parse("[a]\njunk line\n", "f.cfg"); }), "f.cfg:2: expected 'key = value'");
  EXPECT_EQ(error_of([] { ConfigDocument::parse("x = 1\n", "f.cfg"); }), "f.cfg:1: key 'x' outside of any [section]");
  EXPECT_EQ(error_of([] { ConfigDocument::parse("[a\n", "f.cfg"); }), "f.cfg:1: unterminated section header");
  EXPECT_EQ(error_of([] { ConfigDocument::parse("[a]\n[a]\n", "f.cfg"); }), "f.cfg:2: duplicate section [a]");
  EXPECT_EQ(error_of([] {
              auto d = ConfigDocument::parse("[a]\n\nx = abc\n", "f.cfg");
              d.section("a").get_double("x");
            }),
            "f.cfg:3: 'x': expected a number, got 'abc'");
}

TEST(Config, RejectsUnreadKeysAndSections) {
  auto doc = ConfigDocument::parse("[a]\nx = 1\ntypo = 2\n", "f.cfg");
  doc.section("a").get_double("x");
  EXPECT_EQ(error_of([&] { doc.reject_unused(); }), "f.cfg:3: unknown key 'typo' in [a]");

  auto doc2 = ConfigDocument::parse("[a]\nx = 1\n[b]\ny = 1\n", "g.cfg");
  doc2.section("a").get_double("x");
  EXPECT_EQ(error_of([&] { doc2.reject_unused(); }), "g.cfg:3: unknown section [b]");
}

TEST(Config, ChildrenAreOneLevelInFileOrder) {
  auto doc = ConfigDocument::parse("[v.b]\n[v.a]\n[v.a.x]\n[w]\n[v.c]\n");
  EXPECT_EQ(doc.children("v"), (std::vector<std::string>{"v.b", "v.a", "v.c"}));
  EXPECT_EQ(doc.children("v.a"), (std::vector<std::string>{"v.a.x"}));
}

TEST(Config, OverridesReplaceAndCreate) {
  auto doc = ConfigDocument::parse("[run]\ndt = 0.02\n");
  doc.apply_override("run.dt=0.03");
  doc.apply_override("world.channel.max_range = 100");
  EXPECT_DOUBLE_EQ(doc.section("run").get_double("dt"), 0.03);
  EXPECT_DOUBLE_EQ(doc.section("world.channel").get_double("max_range"), 100.0);
  EXPECT_THROW(doc.apply_override("nodot=1"), ConfigError);
  EXPECT_THROW(doc.apply_override("run.dt"), ConfigError);
}

TEST(Config, DumpRoundTrips) {
  auto doc = ConfigDocument::parse("[b]\nk = v w\n[a]\nx = 1, 2\n");
  auto again = ConfigDocument::parse(doc.dump());
  EXPECT_EQ(again.section("b").get_string("k"), "v w");
  EXPECT_EQ(again.section("a").get_doubles("x"), (std::vector<double>{1.0, 2.0}));
  EXPECT_EQ(again.dump(), doc.dump());
}

TEST(Config, MissingSectionAndKey) {
  auto doc = ConfigDocument::parse("[a]\n", "f.cfg");
  EXPECT_THROW(doc.section("b"), ConfigError);
  EXPECT_EQ(error_of([&] { doc.section("a").get_double("x"); }), "f.cfg:1: missing required key 'x' in [a]");
  EXPECT_TRUE(doc.section_or_empty("zzz").entries().empty());
}
