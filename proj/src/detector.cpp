#include "crossguard/detector.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <string>

#include "crossguard/errors.hpp"
#include "crossguard/reference_data.hpp"

namespace crossguard {
namespace {

std::string normalized(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    if (c == '-' || c == '_' || c == ' ') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace

std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::Day: return "day";
    case Condition::Night: return "night";
    case Condition::BadWeather: return "badweather";
  }
  return "?";
}

std::string_view to_string(Target t) { return t == Target::Train ? "train" : "trespasser"; }

std::string_view to_string(ObjectClass c) {
  switch (c) {
    case ObjectClass::Train: return "Train";
    case ObjectClass::Trespasser: return "Trespasser";
    case ObjectClass::Other: return "Other";
  }
  return "?";
}

Condition parse_condition(std::string_view text) {
  const auto key = normalized(text);
  if (key == "day" || key == "daytime") return Condition::Day;
  if (key == "night" || key == "nighttime") return Condition::Night;
  if (key == "badweather") return Condition::BadWeather;
  throw ArgumentError("unknown condition '" + std::string(text) + "'");
}

Target parse_target(std::string_view text) {
  const auto key = normalized(text);
  if (key == "train") return Target::Train;
  if (key == "trespasser") return Target::Trespasser;
  throw ArgumentError("unknown detection class '" + std::string(text) + "'");
}

// Case-sensitive: the wire protocol spells the class names exactly.
ObjectClass parse_object_class(std::string_view text) {
  if (text == "Train") return ObjectClass::Train;
  if (text == "Trespasser") return ObjectClass::Trespasser;
  if (text == "Other") return ObjectClass::Other;
  throw ArgumentError("unknown object class '" + std::string(text) + "'");
}

double accuracy(const ConfusionCounts& counts) {
  const auto total = counts.total();
  if (total == 0) throw EmptySampleError("accuracy over an empty sample");
  return static_cast<double>(counts.true_positive + counts.true_negative) /
         static_cast<double>(total);
}

std::int64_t accuracy_basis_points(const ConfusionCounts& counts) {
  const auto total = counts.total();
  if (total == 0) throw EmptySampleError("accuracy over an empty sample");
  const auto correct = counts.true_positive + counts.true_negative;
  // floor(correct * 10000 / total + 1/2)
  return static_cast<std::int64_t>((correct * 20000 + total) / (2 * total));
}

std::string format_percent(double fraction) {
  // The epsilon absorbs representation error in values like 0.98455.
  const auto hundredths = static_cast<std::int64_t>(std::floor(fraction * 10000.0 + 0.5 + 1e-9));
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%lld.%02lld%%", hundredths < 0 ? "-" : "",
                static_cast<long long>(std::llabs(hundredths) / 100),
                static_cast<long long>(std::llabs(hundredths) % 100));
  return buf;
}

double per_frame_miss_rate(std::uint64_t false_negatives, std::uint64_t frames_analyzed) {
  if (frames_analyzed == 0) throw EmptySampleError("miss rate over zero frames");
  if (false_negatives > frames_analyzed) {
    throw InconsistencyError("false negatives (" + std::to_string(false_negatives) +
                             ") exceed frames analyzed (" + std::to_string(frames_analyzed) + ")");
  }
  return static_cast<double>(false_negatives) / static_cast<double>(frames_analyzed);
}

void DetectorProfile::validate() const {
  auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!in_unit(true_positive_rate)) throw ArgumentError("true_positive_rate must lie in [0, 1]");
  if (!in_unit(false_positive_rate)) throw ArgumentError("false_positive_rate must lie in [0, 1]");
  if (!(frame_rate > 0.0) || !std::isfinite(frame_rate)) {
    throw ArgumentError("frame_rate must be positive");
  }
}

Millis DetectorProfile::frame_period() const {
  return Millis{std::max<std::int64_t>(1, std::llround(1000.0 / frame_rate))};
}

DetectorProfile profile_for(Condition condition, Target target) {
  const auto& row = reference::detector_row(condition, target);
  return DetectorProfile{target, row.per_frame_accuracy(), kDefaultFalsePositiveRate,
                         kDefaultFrameRate};
}

FrameObservation sample_frame(bool truth_present, const DetectorProfile& profile, Rng& rng,
                              std::string source_id, Millis timestamp) {
  const double u = rng.next_unit();
  const double p = truth_present ? profile.true_positive_rate : profile.false_positive_rate;
  FrameObservation obs{std::move(source_id), timestamp, u < p, std::nullopt, std::nullopt};
  if (obs.detected) {
    obs.object_class = object_class_of(profile.target);
    // u is uniform on [0, p) here, so this lands in (0.5, 1].
    obs.confidence = 1.0 - 0.5 * (u / p);
  }
  return obs;
}

}  // namespace crossguard
