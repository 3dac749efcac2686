#pragma once

// Measured detector performance used to calibrate the built-in profiles and
// checked by `crossguard tables`. Every published figure lives here and
// nowhere else; bump kReferenceDataVersion when editing.

#include <array>
#include <cstdint>
#include <string_view>

#include "crossguard/detector.hpp"

namespace crossguard::reference {

inline constexpr int kReferenceDataVersion = 1;

// Frame-level classifier results per lighting/weather condition.
struct ClassifierRow {
  std::string_view label;
  Condition condition;
  std::uint64_t images;
  std::uint64_t true_positive;
  std::uint64_t true_negative;
  std::uint64_t false_negative;
  std::uint64_t false_positive;
  std::int64_t accuracy_basis_points;  // 9845 == 98.45%

  constexpr ConfusionCounts counts() const {
    return {true_positive, true_negative, false_positive, false_negative};
  }
};

inline constexpr std::array<ClassifierRow, 3> kClassifier{{
    {"Daytime", Condition::Day, 8540, 4582, 3826, 93, 39, 9845},
    {"Night Time", Condition::Night, 3750, 2124, 1247, 319, 60, 8989},
    {"Bad Weather", Condition::BadWeather, 770, 329, 294, 96, 51, 8091},
}};

// Object detector results, per frame and over a ten-frame window.
struct DetectorRow {
  std::string_view label;
  Target target;
  Condition condition;
  std::uint64_t frames;
  std::int64_t per_frame_permille;  // 956 == 95.6%
  std::uint64_t false_negatives;
  std::int64_t windowed_permille;
  std::uint64_t windowed_false_negatives;

  constexpr double per_frame_accuracy() const { return per_frame_permille / 1000.0; }
  constexpr double windowed_accuracy() const { return windowed_permille / 1000.0; }
};

inline constexpr int kWindowFrames = 10;

inline constexpr std::array<DetectorRow, 6> kDetector{{
    {"Train (Day)", Target::Train, Condition::Day, 4533, 956, 195, 1000, 0},
    {"Train (Night)", Target::Train, Condition::Night, 2158, 843, 337, 999, 1},
    {"Train (Bad-Weather)", Target::Train, Condition::BadWeather, 1326, 827, 222, 999, 1},
    {"Trespasser (Day)", Target::Trespasser, Condition::Day, 3783, 917, 306, 1000, 0},
    {"Trespasser (Night)", Target::Trespasser, Condition::Night, 2078, 875, 269, 999, 2},
    {"Trespasser (Bad-Weather)", Target::Trespasser, Condition::BadWeather, 1129, 778, 234, 997, 3},
}};

constexpr const DetectorRow& detector_row(Condition condition, Target target) {
  for (const auto& row : kDetector) {
    if (row.condition == condition && row.target == target) return row;
  }
  return kDetector[0];  // unreachable: the table covers every pair
}

}  // namespace crossguard::reference
