#include <gtest/gtest.h>

#include "crossguard/errors.hpp"
#include "crossguard/kinematics.hpp"

namespace crossguard {
namespace {

using namespace std::chrono_literals;

TEST(Velocity, TwoPointTiming) {
  EXPECT_DOUBLE_EQ(estimate_velocity(500.0, 0s, 25s), 20.0);
  EXPECT_DOUBLE_EQ(estimate_velocity(500.0, 1s, 7250ms), 80.0);
  EXPECT_THROW(estimate_velocity(500.0, 5s, 5s), ArgumentError);
  EXPECT_THROW(estimate_velocity(500.0, 6s, 5s), ArgumentError);
  EXPECT_THROW(estimate_velocity(0.0, 0s, 5s), ArgumentError);
}

TEST(Eta, DistanceOverVelocity) {
  EXPECT_DOUBLE_EQ(*eta(2500.0, 20.0), 125.0);
  EXPECT_DOUBLE_EQ(*eta(0.0, 20.0), 0.0);
  EXPECT_FALSE(eta(2500.0, std::nullopt));
  EXPECT_FALSE(eta(2500.0, 0.0));
  EXPECT_FALSE(eta(2500.0, -3.0));
  EXPECT_THROW(eta(-1.0, 20.0), ArgumentError);
}

TEST(Estimate, RemainingAndStale) {
  const auto e = make_estimate("T1", Direction::Up, 2000.0, 20.0, 10s);
  EXPECT_DOUBLE_EQ(*e.eta_s, 100.0);
  EXPECT_DOUBLE_EQ(*eta_remaining(e, 40s), 70.0);
  EXPECT_DOUBLE_EQ(*eta_remaining(e, 500s), 0.0);
  EXPECT_FALSE(is_stale(e, 210s));
  EXPECT_TRUE(is_stale(e, 211s));
  const auto unknown = make_estimate("T2", Direction::Down, 2500.0, std::nullopt, 0s);
  EXPECT_FALSE(eta_remaining(unknown, 1s));
  EXPECT_FALSE(is_stale(unknown, 100000s));
}

TEST(Geometry, Blocks) {
  TrackGeometry g;
  EXPECT_DOUBLE_EQ(g.second_point_distance(), 2000.0);
  EXPECT_EQ(g.approach_block(Direction::Up), "B-up");
  EXPECT_EQ(g.departure_block(Direction::Up), "B-down");
  g.camera_spacing_m = 3000.0;
  EXPECT_THROW(g.validate(), ArgumentError);
}

TEST(Occupancy, EnterMovesTrainBetweenBlocks) {
  BlockOccupancy occ;
  occ.enter("B-up", {"T1", Direction::Up, 0s});
  EXPECT_EQ(occ.block_of("T1"), "B-up");
  occ.enter("B-down", {"T1", Direction::Up, 10s});
  EXPECT_EQ(occ.block_of("T1"), "B-down");
  EXPECT_EQ(occ.blocks().count("B-up"), 0U);
  EXPECT_TRUE(occ.leave("T1"));
  EXPECT_FALSE(occ.leave("T1"));
  EXPECT_TRUE(occ.empty());
}

TEST(Occupancy, HeadOnConflict) {
  BlockOccupancy occ;
  occ.enter("B-up", {"T1", Direction::Up, 0s});
  occ.enter("B-up", {"T3", Direction::Up, 0s});
  EXPECT_TRUE(head_on_conflict(occ).empty());
  occ.enter("B-up", {"T2", Direction::Down, 5s});
  const auto conflicts = head_on_conflict(occ);
  ASSERT_EQ(conflicts.size(), 1U);
  EXPECT_EQ(conflicts[0], (HeadOnConflict{"B-up", {"T1", "T3"}, {"T2"}}));
  occ.leave("T2");
  EXPECT_TRUE(head_on_conflict(occ).empty());
}

TEST(Timetable, Deviation) {
  const TimetableEntry entry{"T1", 120s, 140s};
  const auto e = make_estimate("T1", Direction::Up, 2000.0, 20.0, 25s);  // arrives at 125 s
  EXPECT_DOUBLE_EQ(schedule_deviation(entry, e, 25s), 5.0);
  const TimetableEntry noon{"T1", 43200s, 43260s};
  const auto on_time = make_estimate("T1", Direction::Up, 2400.0, 20.0, 43080s);  // eta 120 s
  EXPECT_DOUBLE_EQ(schedule_deviation(noon, on_time, 43080s), 0.0);
  const auto late = make_estimate("T1", Direction::Up, 2400.0, 8.0, 43080s);  // eta 300 s
  EXPECT_DOUBLE_EQ(schedule_deviation(noon, late, 43080s), 180.0);
  const auto unknown = make_estimate("T1", Direction::Up, 2000.0, std::nullopt, 25s);
  EXPECT_THROW(schedule_deviation(entry, unknown, 25s), UnavailableEstimateError);
}

TEST(Direction, Parse) {
  EXPECT_EQ(parse_direction("up"), Direction::Up);
  EXPECT_EQ(parse_direction("Down"), Direction::Down);
  EXPECT_THROW(parse_direction("left"), ArgumentError);
  EXPECT_EQ(opposite(Direction::Up), Direction::Down);
}

}  // namespace
}  // namespace crossguard
