#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crossguard/controller_json.hpp"
#include "crossguard/monte_carlo.hpp"

namespace crossguard {

// Largest accepted gap, in percentage points, between a recomputed windowed
// accuracy and the published one.
inline constexpr double kWindowedTolerancePp = 0.3;

struct ClassifierCheck {
  std::string label;
  std::string published;  // "98.45%"
  std::string computed;
  double delta_pp = 0.0;
  bool matches = false;
};

struct DetectorCheck {
  std::string label;
  double per_frame = 0.0;
  double published_windowed = 0.0;
  double closed_form = 0.0;
  MonteCarloResult monte_carlo;
  double closed_form_delta_pp = 0.0;  // closed form minus published
  double monte_carlo_delta_pp = 0.0;
  bool within_tolerance = false;
};

struct TablesReport {
  std::vector<ClassifierCheck> classifier;
  std::vector<DetectorCheck> detector;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;

  // Classifier rows match exactly and every windowed figure is within tolerance.
  bool passes() const;
  std::string render() const;
  Json to_json() const;
};

// Throws ArgumentError when trials == 0.
TablesReport compute_tables(std::uint64_t trials, std::uint64_t seed, unsigned threads = 0);

}  // namespace crossguard
