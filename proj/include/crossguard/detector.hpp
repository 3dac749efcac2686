#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "crossguard/rng.hpp"
#include "crossguard/time.hpp"

namespace crossguard {

enum class Condition { Day, Night, BadWeather };

// What a detector channel is trained to find.
enum class Target { Train, Trespasser };

// Class label reported by a detector for one frame.
enum class ObjectClass { Train, Trespasser, Other };

std::string_view to_string(Condition c);
std::string_view to_string(Target t);
std::string_view to_string(ObjectClass c);

// Accepts "day", "night", "badweather" (case-insensitive, also "bad-weather").
Condition parse_condition(std::string_view text);
Target parse_target(std::string_view text);
ObjectClass parse_object_class(std::string_view text);

constexpr ObjectClass object_class_of(Target t) {
  return t == Target::Train ? ObjectClass::Train : ObjectClass::Trespasser;
}

struct ConfusionCounts {
  std::uint64_t true_positive = 0;
  std::uint64_t true_negative = 0;
  std::uint64_t false_positive = 0;
  std::uint64_t false_negative = 0;

  std::uint64_t total() const {
    return true_positive + true_negative + false_positive + false_negative;
  }
};

// (TP + TN) / total. Throws EmptySampleError when total() == 0.
double accuracy(const ConfusionCounts& counts);

// Accuracy in hundredths of a percent, rounded half-up using exact integer
// arithmetic (98.45% -> 9845).
std::int64_t accuracy_basis_points(const ConfusionCounts& counts);

// Renders a fraction as a percentage with two decimals, rounding half-up.
std::string format_percent(double fraction);

double per_frame_miss_rate(std::uint64_t false_negatives, std::uint64_t frames_analyzed);

// Per-frame Bernoulli model of one camera + detector channel.
struct DetectorProfile {
  Target target = Target::Train;
  double true_positive_rate = 1.0;
  double false_positive_rate = 0.001;
  double frame_rate = 5.0;

  // Throws ArgumentError on out-of-range parameters.
  void validate() const;
  Millis frame_period() const;
};

inline constexpr double kDefaultFalsePositiveRate = 0.001;
inline constexpr double kDefaultFrameRate = 5.0;

// Built-in profile calibrated from the reference per-frame accuracies.
DetectorProfile profile_for(Condition condition, Target target);

struct FrameObservation {
  std::string source_id;
  Millis timestamp{0};
  bool detected = false;
  std::optional<ObjectClass> object_class;
  std::optional<double> confidence;

  bool operator==(const FrameObservation&) const = default;
};

// Draws one frame outcome. Consumes exactly one value from `rng`. When the
// frame is a detection, the reported confidence is derived from the same draw.
FrameObservation sample_frame(bool truth_present, const DetectorProfile& profile, Rng& rng,
                              std::string source_id, Millis timestamp);

}  // namespace crossguard
