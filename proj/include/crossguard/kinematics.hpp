#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crossguard/time.hpp"

namespace crossguard {

enum class Direction { Up, Down };

std::string_view to_string(Direction d);
Direction parse_direction(std::string_view text);
constexpr Direction opposite(Direction d) { return d == Direction::Up ? Direction::Down : Direction::Up; }

// Distances are measured along the approach, from the junction.
struct TrackGeometry {
  double detection_distance_m = 2500.0;  // first detection camera
  double camera_spacing_m = 500.0;       // between the two upstream cameras
  double far_side_m = 200.0;             // departure camera past the junction
  std::string up_block = "B-up";         // approach block for Up trains
  std::string down_block = "B-down";     // approach block for Down trains

  void validate() const;

  double second_point_distance() const { return detection_distance_m - camera_spacing_m; }
  const std::string& approach_block(Direction d) const {
    return d == Direction::Up ? up_block : down_block;
  }
  // Past the junction a train runs through the opposite approach block.
  const std::string& departure_block(Direction d) const { return approach_block(opposite(d)); }
};

struct TrackEstimate {
  std::string train_id;
  Direction direction = Direction::Up;
  std::optional<double> velocity_mps;
  double position_m = 0.0;  // distance to the junction
  std::optional<double> eta_s;
  Millis estimated_at{0};

  bool operator==(const TrackEstimate&) const = default;
};

// spacing / (t_second - t_first). Throws ArgumentError on a non-positive
// interval or spacing.
double estimate_velocity(double spacing_m, Millis t_first, Millis t_second);

// Constant-velocity time to cover `distance_m`; nullopt when the velocity is
// unknown or not positive. Throws ArgumentError on a negative distance.
std::optional<double> eta(double distance_m, std::optional<double> velocity_mps);

TrackEstimate make_estimate(std::string train_id, Direction direction, double position_m,
                            std::optional<double> velocity_mps, Millis at);

// ETA from `now`, clamped at zero; nullopt when the estimate has no ETA.
std::optional<double> eta_remaining(const TrackEstimate& estimate, Millis now);

// An estimate older than twice its own travel time is no longer trusted.
bool is_stale(const TrackEstimate& estimate, Millis now);

struct Occupant {
  std::string train_id;
  Direction direction = Direction::Up;
  Millis since{0};

  bool operator==(const Occupant&) const = default;
};

class BlockOccupancy {
 public:
  // Places the train in `block_id`, removing it from any other block.
  void enter(const std::string& block_id, Occupant occupant);
  bool leave(const std::string& train_id);
  std::optional<std::string> block_of(const std::string& train_id) const;
  const std::map<std::string, std::vector<Occupant>>& blocks() const { return blocks_; }
  bool empty() const { return blocks_.empty(); }

 private:
  std::map<std::string, std::vector<Occupant>> blocks_;
};

struct HeadOnConflict {
  std::string block_id;
  std::vector<std::string> up_trains;    // sorted
  std::vector<std::string> down_trains;  // sorted

  bool operator==(const HeadOnConflict&) const = default;
};

// Every block holding trains that move in opposite directions, by block id.
std::vector<HeadOnConflict> head_on_conflict(const BlockOccupancy& occupancy);

struct TimetableEntry {
  std::string train_id;
  Millis scheduled_arrival{0};
  Millis scheduled_departure{0};
};

// (now + eta) - scheduled_arrival in seconds; positive means late. Throws
// UnavailableEstimateError when the estimate carries no ETA.
double schedule_deviation(const TimetableEntry& entry, const TrackEstimate& estimate, Millis now);

}  // namespace crossguard
