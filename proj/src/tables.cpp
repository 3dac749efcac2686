#include "crossguard/tables.hpp"

#include <algorithm>
#include <cmath>

#include <spdlog/fmt/fmt.h>

#include "crossguard/errors.hpp"
#include "crossguard/reference_data.hpp"

namespace crossguard {
namespace {

bool within(double delta_pp) { return std::abs(delta_pp) <= kWindowedTolerancePp + 1e-9; }

}  // namespace

bool TablesReport::passes() const {
  return std::all_of(classifier.begin(), classifier.end(), [](const auto& c) { return c.matches; }) &&
         std::all_of(detector.begin(), detector.end(), [](const auto& d) { return d.within_tolerance; });
}

TablesReport compute_tables(std::uint64_t trials, std::uint64_t seed, unsigned threads) {
  if (trials == 0) throw ArgumentError("trials must be at least 1");
  TablesReport report;
  report.trials = trials;
  report.seed = seed;

  for (const auto& row : reference::kClassifier) {
    ClassifierCheck c;
    c.label = std::string(row.label);
    const auto published = static_cast<double>(row.accuracy_basis_points) / 10000.0;
    const auto computed_bp = accuracy_basis_points(row.counts());
    c.published = format_percent(published);
    c.computed = format_percent(accuracy(row.counts()));
    c.delta_pp = static_cast<double>(computed_bp - row.accuracy_basis_points) / 100.0;
    c.matches = computed_bp == row.accuracy_basis_points && c.computed == c.published;
    report.classifier.push_back(std::move(c));
  }

  WindowConfig cfg;
  cfg.window_len = reference::kWindowFrames;
  cfg.required_hits = 1;
  for (std::size_t i = 0; i < reference::kDetector.size(); ++i) {
    const auto& row = reference::kDetector[i];
    DetectorCheck d;
    d.label = std::string(row.label);
    d.per_frame = row.per_frame_accuracy();
    d.published_windowed = row.windowed_accuracy();
    d.closed_form = window_detection_probability(d.per_frame, cfg.window_len, cfg.required_hits);
    DetectorProfile profile{row.target, d.per_frame, kDefaultFalsePositiveRate, kDefaultFrameRate};
    d.monte_carlo = monte_carlo(profile, cfg, trials, split_seed(seed, i), threads);
    d.closed_form_delta_pp = (d.closed_form - d.published_windowed) * 100.0;
    d.monte_carlo_delta_pp = (d.monte_carlo.estimate - d.published_windowed) * 100.0;
    d.within_tolerance = within(d.closed_form_delta_pp) && within(d.monte_carlo_delta_pp);
    report.detector.push_back(std::move(d));
  }
  return report;
}

std::string TablesReport::render() const {
  std::string out;
  out += "Classifier accuracy\n";
  out += fmt::format("  {:<12} {:>9} {:>9} {:>7}  {}\n", "condition", "published", "computed", "delta", "");
  for (const auto& c : classifier) {
    out += fmt::format("  {:<12} {:>9} {:>9} {:>7.2f}  {}\n", c.label, c.published, c.computed,
                       c.delta_pp, c.matches ? "ok" : "MISMATCH");
  }
  out += fmt::format("\nWindowed detection (k=1 of n={}, {} trials, seed {})\n",
                     reference::kWindowFrames, trials, seed);
  out += fmt::format("  {:<25} {:>9} {:>9} {:>11} {:>11} {:>8} {:>8}  {}\n", "channel", "frame",
                     "published", "closed", "monte carlo", "delta", "mc 3se", "");
  for (const auto& d : detector) {
    out += fmt::format("  {:<25} {:>8.1f}% {:>8.1f}% {:>10.5f}% {:>10.5f}% {:>8.3f} {:>8}  {}\n",
                       d.label, d.per_frame * 100.0, d.published_windowed * 100.0,
                       d.closed_form * 100.0, d.monte_carlo.estimate * 100.0, d.closed_form_delta_pp,
                       d.monte_carlo.agrees() ? "ok" : "outside", d.within_tolerance ? "ok" : "OUT OF TOLERANCE");
  }
  out += passes() ? "\nall figures reproduced\n" : "\nsome figures were not reproduced\n";
  return out;
}

Json TablesReport::to_json() const {
  Json j;
  j["trials"] = trials;
  j["seed"] = seed;
  j["passes"] = passes();
  j["classifier"] = Json::array();
  for (const auto& c : classifier) {
    j["classifier"].push_back({{"label", c.label},
                               {"published", c.published},
                               {"computed", c.computed},
                               {"delta_pp", c.delta_pp},
                               {"matches", c.matches}});
  }
  j["detector"] = Json::array();
  for (const auto& d : detector) {
    j["detector"].push_back({{"label", d.label},
                             {"per_frame", d.per_frame},
                             {"published_windowed", d.published_windowed},
                             {"closed_form", d.closed_form},
                             {"monte_carlo", d.monte_carlo.estimate},
                             {"monte_carlo_confirmed", d.monte_carlo.confirmed},
                             {"standard_error", d.monte_carlo.standard_error},
                             {"monte_carlo_agrees", d.monte_carlo.agrees()},
                             {"delta_pp", d.closed_form_delta_pp},
                             {"within_tolerance", d.within_tolerance}});
  }
  return j;
}

}  // namespace crossguard
