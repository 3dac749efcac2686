#include <gtest/gtest.h>

#include <sstream>

#include "crossguard/errors.hpp"
#include "crossguard/observation_codec.hpp"

namespace crossguard {
namespace {

using namespace std::chrono_literals;

std::string field_of(const std::string& line) {
  try {
    parse_observation(line);
  } catch (const ParseError& e) {
    return e.field();
  }
  return "<accepted>";
}

TEST(Parse, Detection) {
  const auto o = parse_observation(R"({"src":"cam1","t_ms":1000,"det":true,"cls":"Train","conf":0.91})");
  EXPECT_EQ(o.source_id, "cam1");
  EXPECT_EQ(o.timestamp, 1000ms);
  EXPECT_TRUE(o.detected);
  EXPECT_EQ(o.object_class, ObjectClass::Train);
  EXPECT_DOUBLE_EQ(*o.confidence, 0.91);
}

TEST(Parse, NonDetection) {
  const auto o = parse_observation(R"({"src":"cam1","t_ms":1200,"det":false})");
  EXPECT_FALSE(o.detected);
  EXPECT_FALSE(o.object_class);
  EXPECT_FALSE(o.confidence);
}

TEST(Parse, RejectsMalformedRecords) {
  EXPECT_EQ(field_of(R"({"src":"c","t_ms":1,"det":false,"x":1})"), "x");
  EXPECT_EQ(field_of(R"({"t_ms":1,"det":false})"), "src");
  EXPECT_EQ(field_of(R"({"src":"","t_ms":1,"det":false})"), "src");
  EXPECT_EQ(field_of(R"({"src":"c","det":false})"), "t_ms");
  EXPECT_EQ(field_of(R"({"src":"c","t_ms":-1,"det":false})"), "t_ms");
  EXPECT_EQ(field_of(R"({"src":"c","t_ms":1.5,"det":false})"), "t_ms");
  EXPECT_EQ(field_of(R"({"src":"c","t_ms":1,"det":"yes"})"), "det");
  EXPECT_EQ(field_of(R"({"src":"c","t_ms":1,"det":false,"cls":"Train"})"), "cls");
  EXPECT_EQ(field_of(R"({"src":"c","t_ms":1,"det":true,"conf":0.5})"), "cls");
  EXPECT_EQ(field_of(R"({"src":"c","t_ms":1,"det":true,"cls":"Cow","conf":0.5})"), "cls");
  EXPECT_EQ(field_of(R"({"src":"c","t_ms":1,"det":true,"cls":"Train"})"), "conf");
  EXPECT_EQ(field_of(R"({"src":"c","t_ms":1,"det":true,"cls":"Train","conf":1.5})"), "conf");
  EXPECT_EQ(field_of(R"({"src":"c","t_ms":1,"det":false,"conf":0.5})"), "conf");
  EXPECT_EQ(field_of("not json"), "");
  EXPECT_EQ(field_of("[1,2]"), "");
}

TEST(Serialize, RoundTrip) {
  const FrameObservation hit{"junction", 4200ms, true, ObjectClass::Trespasser, 0.625};
  const FrameObservation miss{"up-a", 0ms, false, std::nullopt, std::nullopt};
  for (const auto& o : {hit, miss}) EXPECT_EQ(parse_observation(serialize_observation(o)), o);
  EXPECT_EQ(serialize_observation(miss), R"({"src":"up-a","t_ms":0,"det":false})");
}

TEST(Serialize, RejectsInvariantViolations) {
  EXPECT_THROW(serialize_observation({"c", 0ms, true, std::nullopt, 0.5}), ArgumentError);
  EXPECT_THROW(serialize_observation({"c", 0ms, false, ObjectClass::Train, std::nullopt}), ArgumentError);
  EXPECT_THROW(serialize_observation({"", 0ms, false, std::nullopt, std::nullopt}), ArgumentError);
}

TEST(Decoder, TimestampsStrictlyIncreasePerSource) {
  ObservationDecoder d;
  d.decode(R"({"src":"a","t_ms":100,"det":false})");
  d.decode(R"({"src":"b","t_ms":50,"det":false})");
  EXPECT_THROW(d.decode(R"({"src":"a","t_ms":100,"det":false})"), OrderingError);
  EXPECT_THROW(d.decode(R"({"src":"a","t_ms":99,"det":false})"), OrderingError);
  EXPECT_EQ(d.last_timestamp("a"), 100ms);
  EXPECT_FALSE(d.last_timestamp("z"));
}

TEST(Reader, SkipsBlankLinesAndCounts) {
  std::istringstream in("{\"src\":\"a\",\"t_ms\":0,\"det\":false}\n\n{\"src\":\"a\",\"t_ms\":200,\"det\":false}\n");
  IstreamLineSource src(in);
  ObservationDecoder d;
  std::vector<FrameObservation> seen;
  EXPECT_EQ(read_observations(src, d, [&](FrameObservation o) { seen.push_back(o); }), 2U);
  EXPECT_EQ(seen.back().timestamp, 200ms);
}

TEST(Reader, ErrorsCarryLineNumbers) {
  std::istringstream bad("{\"src\":\"a\",\"t_ms\":0,\"det\":false}\n{\"src\":\"a\",\"t_ms\":1}\n");
  IstreamLineSource src(bad);
  ObservationDecoder d;
  try {
    read_observations(src, d, [](FrameObservation) {});
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.field(), "det");
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }

  std::istringstream unordered("{\"src\":\"a\",\"t_ms\":5,\"det\":false}\n{\"src\":\"a\",\"t_ms\":5,\"det\":false}\n");
  IstreamLineSource src2(unordered);
  ObservationDecoder d2;
  try {
    read_observations(src2, d2, [](FrameObservation) {});
    FAIL();
  } catch (const OrderingError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

}  // namespace
}  // namespace crossguard
