#include "crossguard/kinematics.hpp"

#include <algorithm>
#include <cmath>

#include "crossguard/errors.hpp"

namespace crossguard {

std::string_view to_string(Direction d) { return d == Direction::Up ? "Up" : "Down"; }

Direction parse_direction(std::string_view text) {
  if (text == "Up" || text == "up") return Direction::Up;
  if (text == "Down" || text == "down") return Direction::Down;
  throw ArgumentError("unknown direction '" + std::string(text) + "'");
}

void TrackGeometry::validate() const {
  if (!(detection_distance_m > 0.0)) throw ArgumentError("detection_distance must be positive");
  if (!(camera_spacing_m > 0.0)) throw ArgumentError("camera_spacing must be positive");
  if (!(camera_spacing_m < detection_distance_m)) {
    throw ArgumentError("camera_spacing must be shorter than detection_distance");
  }
  if (!(far_side_m > 0.0)) throw ArgumentError("far_side must be positive");
  if (up_block.empty() || down_block.empty() || up_block == down_block) {
    throw ArgumentError("approach blocks must be distinct non-empty ids");
  }
}

double estimate_velocity(double spacing_m, Millis t_first, Millis t_second) {
  if (!(spacing_m > 0.0)) throw ArgumentError("spacing must be positive");
  if (t_second <= t_first) throw ArgumentError("detection interval must be positive");
  return spacing_m / to_seconds(t_second - t_first);
}

std::optional<double> eta(double distance_m, std::optional<double> velocity_mps) {
  if (distance_m < 0.0) throw ArgumentError("distance must not be negative");
  if (!velocity_mps || !(*velocity_mps > 0.0)) return std::nullopt;
  return distance_m / *velocity_mps;
}

TrackEstimate make_estimate(std::string train_id, Direction direction, double position_m,
                            std::optional<double> velocity_mps, Millis at) {
  auto eta_s = eta(position_m, velocity_mps);
  return TrackEstimate{std::move(train_id), direction,
                       eta_s ? velocity_mps : std::nullopt, position_m, eta_s, at};
}

std::optional<double> eta_remaining(const TrackEstimate& estimate, Millis now) {
  if (!estimate.eta_s) return std::nullopt;
  return std::max(0.0, *estimate.eta_s - to_seconds(now - estimate.estimated_at));
}

bool is_stale(const TrackEstimate& estimate, Millis now) {
  if (!estimate.eta_s) return false;
  return to_seconds(now - estimate.estimated_at) > 2.0 * *estimate.eta_s;
}

void BlockOccupancy::enter(const std::string& block_id, Occupant occupant) {
  leave(occupant.train_id);
  blocks_[block_id].push_back(std::move(occupant));
}

bool BlockOccupancy::leave(const std::string& train_id) {
  for (auto it = blocks_.begin(); it != blocks_.end(); ++it) {
    auto& trains = it->second;
    auto pos = std::find_if(trains.begin(), trains.end(),
                            [&](const Occupant& o) { return o.train_id == train_id; });
    if (pos == trains.end()) continue;
    trains.erase(pos);
    if (trains.empty()) blocks_.erase(it);
    return true;
  }
  return false;
}

std::optional<std::string> BlockOccupancy::block_of(const std::string& train_id) const {
  for (const auto& [block, trains] : blocks_) {
    for (const auto& o : trains) {
      if (o.train_id == train_id) return block;
    }
  }
  return std::nullopt;
}

std::vector<HeadOnConflict> head_on_conflict(const BlockOccupancy& occupancy) {
  std::vector<HeadOnConflict> conflicts;
  for (const auto& [block, trains] : occupancy.blocks()) {
    HeadOnConflict c{block, {}, {}};
    for (const auto& o : trains) {
      (o.direction == Direction::Up ? c.up_trains : c.down_trains).push_back(o.train_id);
    }
    if (c.up_trains.empty() || c.down_trains.empty()) continue;
    std::sort(c.up_trains.begin(), c.up_trains.end());
    std::sort(c.down_trains.begin(), c.down_trains.end());
    conflicts.push_back(std::move(c));
  }
  return conflicts;
}

double schedule_deviation(const TimetableEntry& entry, const TrackEstimate& estimate, Millis now) {
  if (!estimate.eta_s) {
    throw UnavailableEstimateError("no ETA for train '" + estimate.train_id + "'");
  }
  return to_seconds(now - entry.scheduled_arrival) + *estimate.eta_s;
}

}  // namespace crossguard
