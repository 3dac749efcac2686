#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crossguard/confirmation.hpp"
#include "crossguard/controller.hpp"
#include "crossguard/controller_json.hpp"
#include "crossguard/detector.hpp"
#include "crossguard/kinematics.hpp"
#include "crossguard/notify.hpp"

namespace crossguard {

enum class CameraRole { UpstreamA, UpstreamB, Junction, FarSide };

std::string_view to_string(CameraRole r);

// Per-channel overrides of the condition's built-in profile.
struct ProfileOverride {
  std::optional<double> true_positive_rate;
  std::optional<double> false_positive_rate;
  std::optional<double> frame_rate;

  DetectorProfile apply(DetectorProfile base) const;
};

struct CameraSpec {
  std::string id;
  CameraRole role = CameraRole::UpstreamA;
  Direction direction = Direction::Up;  // ignored for the junction camera
  ProfileOverride train;
  ProfileOverride trespasser;  // junction camera only
};

struct TrainMovement {
  std::string id;
  Direction direction = Direction::Up;
  Millis entry{0};  // head passes the first detection point
  double velocity_mps = 20.0;
  double length_m = 200.0;
};

struct TrespasserInterval {
  Millis enter{0};
  std::optional<Millis> clear;  // nullopt: never clears
};

struct OutageInterval {
  Millis start{0};
  std::optional<Millis> end;  // nullopt: lasts until the end of the run
};

struct RecipientSpec {
  Recipient recipient;
  int fail_first = 0;  // loopback only: this many attempts fail first
  bool fail_always = false;
};

struct Scenario {
  std::string id;
  std::string junction_id = "LC-1";
  TrackGeometry geometry;
  bool backup_power = false;
  double view_radius_m = 50.0;
  Millis barrier_open_duration = std::chrono::seconds{10};
  Millis unconfirmed_track_timeout = std::chrono::seconds{120};
  Millis passage_timeout = std::chrono::seconds{120};
  Condition condition = Condition::Day;
  std::vector<CameraSpec> cameras;
  std::vector<TrainMovement> trains;
  std::vector<TrespasserInterval> trespassers;
  std::vector<Millis> suspicious_activity;
  std::vector<OutageInterval> outages;
  std::vector<TimetableEntry> timetable;
  std::vector<RecipientSpec> recipients;
  ControllerConfig controller;
  WindowConfig window;
  RetryPolicy retry;
  std::uint64_t seed = 0;
  Millis duration{0};

  // Position of a camera along its approach; negative before the junction.
  double camera_position(const CameraSpec& camera) const;
};

// Throws ValidationError naming the field on any schema or invariant problem,
// including an unreadable file.
Scenario load_scenario(const std::filesystem::path& path);
Scenario scenario_from_json(const Json& j, std::string default_id = "scenario");
Json to_json(const Scenario& scenario);

// Validates invariants of an already-built scenario; also applies defaults
// (camera layout, recipients) when those lists are empty.
void finalize_scenario(Scenario& scenario);

}  // namespace crossguard
