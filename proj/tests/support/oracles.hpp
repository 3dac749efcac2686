#pragma once

// Reference computations written independently of the library, used as test
// oracles.

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>

namespace crossguard::oracle {

// Sums the probability of every one of the 2^n hit patterns with at least k hits.
inline double enumerate_window_probability(double p, int n, int k) {
  double total = 0.0;
  for (std::uint32_t pattern = 0; pattern < (1U << n); ++pattern) {
    const int hits = std::popcount(pattern);
    if (hits < k) continue;
    double weight = 1.0;
    for (int i = 0; i < n; ++i) weight *= (pattern >> i) & 1U ? p : 1.0 - p;
    total += weight;
  }
  return total;
}

// "98.45%" from counts by long division, rounding the third decimal half-up.
inline std::string percent_by_long_division(std::uint64_t correct, std::uint64_t total) {
  const std::uint64_t scaled = correct * 100000 / total;  // thousandths of a percent
  std::uint64_t hundredths = scaled / 10;
  if (scaled % 10 >= 5) ++hundredths;
  std::string frac = std::to_string(hundredths % 100);
  if (frac.size() < 2) frac.insert(0, "0");
  return std::to_string(hundredths / 100) + "." + frac + "%";
}

// Hand timeline for a train entering at the first detection point.
inline double arrival_seconds(double distance_m, double velocity_mps, double entry_s) {
  return entry_s + distance_m / velocity_mps;
}

// Two-sided 99% normal bound on a binomial count around its mean.
inline double binomial_bound_99(double p, std::uint64_t n) {
  return 2.5758293035489 * std::sqrt(static_cast<double>(n) * p * (1.0 - p));
}

}  // namespace crossguard::oracle
