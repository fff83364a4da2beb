#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "couplerlab/coupler.hpp"
#include "couplerlab/errors.hpp"
#include "couplerlab/link.hpp"
#include "couplerlab/sweep.hpp"

namespace couplerlab::report {

enum class ExperimentKind { TransferFunction, LoadSweep, LineSweep, Compare, ToleranceMc };

std::string_view to_string(ExperimentKind k);  // tf, load-sweep, line-sweep, compare, tolerance-mc
std::optional<ExperimentKind> parse_experiment(std::string_view s);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::TransferFunction;
  // load-sweep
  std::size_t load = 0;  // 0 = Za
  std::vector<double> load_values;
  // single-frequency studies: load-sweep point, line-sweep spread reference
  double frequency = 10e6;
  // compare
  std::vector<coupler::Topology> tx_set;
  std::vector<coupler::Topology> rx_set;
  sweep::Band passband;
  // tolerance-mc
  double tolerance = 0.1;
  std::size_t trials = 200;
  std::uint64_t seed = 1;
  cascade::Method method = cascade::Method::Cascade;

  ExperimentSpec();
  bool operator==(const ExperimentSpec&) const = default;
};

struct OutputSpec {
  std::string directory = "results";
  bool raw_complex = false;  // (re, im) columns instead of (dB, degrees)
  bool operator==(const OutputSpec&) const = default;
};

struct ScenarioSpec {
  sweep::FrequencyGrid grid;
  coupler::BackToBackSpec link;
  std::vector<double> line_sweep{30.0, 50.0, 100.0, 300.0, 1000.0};
  ExperimentSpec experiment;
  OutputSpec output;
  bool operator==(const ScenarioSpec&) const = default;
};

struct ScenarioIssue {
  std::string where;  // "line 12" or "--set 2"
  std::string message;
};

// Carries every problem found in a scenario, not just the first.
class ScenarioError : public Error {
 public:
  explicit ScenarioError(std::vector<ScenarioIssue> issues);
  const std::vector<ScenarioIssue>& issues() const { return issues_; }

 private:
  std::vector<ScenarioIssue> issues_;
};

// `overrides` are "section.key=value" strings applied after the file; they
// replace file values for the same key.
ScenarioSpec parse_scenario(std::string_view text, std::span<const std::string> overrides = {});

// Canonical text listing every parameter, defaults included.
std::string print_scenario(const ScenarioSpec& spec);

}  // namespace couplerlab::report
