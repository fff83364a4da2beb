#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "couplerlab/scenario.hpp"

namespace couplerlab::report {

inline constexpr std::string_view kVersion = "0.1.0";

struct OutputFile {
  std::string name;  // relative to the output directory
  std::string content;
};

// Everything a run produces, in memory; written out by write_bundle.
struct ResultBundle {
  std::vector<OutputFile> files;
  std::string summary;  // one or two human-readable lines for the terminal
  const OutputFile* find(std::string_view name) const;
};

// Runs the experiment named in the scenario.  Output content depends only on
// the scenario, never on the thread count.
ResultBundle run(const ScenarioSpec& spec, unsigned threads = 0);

// Manifest text: a comment header plus the canonical scenario, so that
// parse_scenario(manifest) reproduces the run.
std::string manifest_text(const ScenarioSpec& spec);

// Writes each file via a temporary sibling and rename, so a crash never
// leaves a half-written result in place.
void write_bundle(const ResultBundle& bundle, const std::filesystem::path& directory);

enum class NetlistPart { Link, Tx, Rx };
std::optional<NetlistPart> parse_netlist_part(std::string_view s);
std::string emit_netlist(const ScenarioSpec& spec, NetlistPart part);

// CSV building blocks, exposed for tests.
std::string csv_number(double v);
std::string write_transfer_csv(const cascade::TransferFunctionSet& set, bool raw_complex);

}  // namespace couplerlab::report
