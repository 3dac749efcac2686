#include "crossguard/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

#include "crossguard/errors.hpp"

namespace crossguard {
namespace {

bool trial_confirms(const DetectorProfile& profile, const WindowConfig& cfg, Rng& rng) {
  ConfirmationState state;
  const Millis period = profile.frame_period();
  for (int f = 0; f < cfg.window_len; ++f) {
    auto obs = sample_frame(true, profile, rng, "mc", period * f);
    auto result = update(std::move(state), obs, cfg);
    if (result.status == PresenceStatus::Confirmed) return true;
    state = std::move(result.state);
  }
  return false;
}

}  // namespace

bool MonteCarloResult::agrees(double sigmas) const {
  const double diff = std::abs(estimate - closed_form);
  if (standard_error == 0.0) return diff == 0.0;
  return diff <= sigmas * standard_error;
}

MonteCarloResult monte_carlo(const DetectorProfile& profile, const WindowConfig& cfg,
                             std::uint64_t trials, std::uint64_t seed, unsigned threads) {
  if (trials == 0) throw ArgumentError("trials must be at least 1");
  profile.validate();
  cfg.validate();

  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, trials));

  std::vector<std::uint64_t> counts(threads, 0);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      std::uint64_t hits = 0;
      for (std::uint64_t i = w; i < trials; i += threads) {
        Rng rng(split_seed(seed, i));
        hits += trial_confirms(profile, cfg, rng) ? 1 : 0;
      }
      counts[w] = hits;
    });
  }
  for (auto& t : pool) t.join();

  MonteCarloResult r;
  r.trials = trials;
  for (auto c : counts) r.confirmed += c;
  r.estimate = static_cast<double>(r.confirmed) / static_cast<double>(trials);
  r.closed_form =
      window_detection_probability(profile.true_positive_rate, cfg.window_len, cfg.required_hits);
  r.standard_error =
      std::sqrt(r.closed_form * (1.0 - r.closed_form) / static_cast<double>(trials));
  return r;
}

}  // namespace crossguard
