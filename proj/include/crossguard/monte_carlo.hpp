#pragma once

#include <cstdint>

#include "crossguard/confirmation.hpp"
#include "crossguard/detector.hpp"

namespace crossguard {

struct MonteCarloResult {
  std::uint64_t trials = 0;
  std::uint64_t confirmed = 0;
  double estimate = 0.0;
  double closed_form = 0.0;
  double standard_error = 0.0;  // of the estimate, under the closed-form p

  // |estimate - closed_form| within `sigmas` standard errors. With a zero
  // standard error the two must be equal.
  bool agrees(double sigmas = 3.0) const;
};

// Runs `trials` independent n-frame windows with the target present and
// counts how many the confirmation step fires on. Trial i draws from
// split_seed(seed, i), so the result does not depend on `threads`.
// Throws ArgumentError when trials == 0.
MonteCarloResult monte_carlo(const DetectorProfile& profile, const WindowConfig& cfg,
                             std::uint64_t trials, std::uint64_t seed, unsigned threads = 0);

}  // namespace crossguard
