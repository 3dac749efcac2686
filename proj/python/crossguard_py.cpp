#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "crossguard/confirmation.hpp"
#include "crossguard/detector.hpp"
#include "crossguard/errors.hpp"
#include "crossguard/monte_carlo.hpp"
#include "crossguard/reference_data.hpp"
#include "crossguard/scenario.hpp"
#include "crossguard/simulator.hpp"
#include "crossguard/tables.hpp"

namespace py = pybind11;
using namespace crossguard;

namespace {

std::string run_scenario(const std::string& path, std::optional<std::uint64_t> seed) {
  RunOptions options;
  options.seed_override = seed;
  const auto result = run(load_scenario(path), options);
  Json j{{"report", result.report.to_json()}, {"log", result.log.to_jsonl()}};
  return j.dump();
}

std::string replay(const std::string& jsonl) {
  std::istringstream in(jsonl);
  return build_report(EventLog::read_jsonl(in)).to_json().dump();
}

py::dict monte_carlo_py(const std::string& condition, const std::string& target, std::uint64_t trials,
                        std::uint64_t seed, int window, int hits) {
  WindowConfig cfg;
  cfg.window_len = window;
  cfg.required_hits = hits;
  const auto profile = profile_for(parse_condition(condition), parse_target(target));
  MonteCarloResult r;
  {
    py::gil_scoped_release release;
    r = monte_carlo(profile, cfg, trials, seed);
  }
  py::dict d;
  d["trials"] = r.trials;
  d["confirmed"] = r.confirmed;
  d["estimate"] = r.estimate;
  d["closed_form"] = r.closed_form;
  d["standard_error"] = r.standard_error;
  d["agrees"] = r.agrees();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "crossguard level-crossing controller bindings";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<FieldError>(m, "FieldError", error.ptr());
  py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);

  m.attr("REFERENCE_DATA_VERSION") = reference::kReferenceDataVersion;

  m.def("window_detection_probability", &window_detection_probability, py::arg("p"), py::arg("n"),
        py::arg("k"));
  m.def(
      "accuracy",
      [](std::uint64_t tp, std::uint64_t tn, std::uint64_t fp, std::uint64_t fn) {
        return accuracy(ConfusionCounts{tp, tn, fp, fn});
      },
      py::arg("tp"), py::arg("tn"), py::arg("fp"), py::arg("fn"));
  m.def("format_percent", &format_percent, py::arg("fraction"));
  m.def(
      "per_frame_rate",
      [](const std::string& condition, const std::string& target) {
        return profile_for(parse_condition(condition), parse_target(target)).true_positive_rate;
      },
      py::arg("condition"), py::arg("target"));
  m.def("monte_carlo", &monte_carlo_py, py::arg("condition"), py::arg("target"),
        py::arg("trials") = 100000, py::arg("seed") = 1, py::arg("window") = 10, py::arg("hits") = 1);
  m.def("_run_scenario", &run_scenario, py::arg("path"), py::arg("seed") = std::nullopt,
        py::call_guard<py::gil_scoped_release>());
  m.def("_replay", &replay, py::arg("jsonl"));
  m.def(
      "_tables", [](std::uint64_t trials, std::uint64_t seed) { return compute_tables(trials, seed).to_json().dump(); },
      py::arg("trials") = 100000, py::arg("seed") = 1, py::call_guard<py::gil_scoped_release>());
}
