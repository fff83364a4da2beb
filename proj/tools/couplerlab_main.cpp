#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "couplerlab/errors.hpp"
#include "couplerlab/report.hpp"
#include "couplerlab/scenario.hpp"

namespace {

using namespace couplerlab;

struct Options {
  std::string scenario;
  std::vector<std::string> overrides;
  std::string output_dir;
  bool raw = false;
  unsigned threads = 0;
  std::string part = "link";
  std::string netlist_output;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInputError("cannot open scenario file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

report::ScenarioSpec load(const Options& o, std::string_view experiment) {
  const std::string text = o.scenario.empty() ? std::string() : read_file(o.scenario);
  std::vector<std::string> overrides = o.overrides;
  if (!experiment.empty()) overrides.push_back("experiment.type=" + std::string(experiment));
  if (!o.output_dir.empty()) overrides.push_back("output.directory=" + o.output_dir);
  if (o.raw) overrides.push_back("output.complex=re-im");
  return report::parse_scenario(text, overrides);
}

int run_experiment(const Options& o, std::string_view experiment) {
  const auto spec = load(o, experiment);
  const auto bundle = report::run(spec, o.threads);
  report::write_bundle(bundle, spec.output.directory);
  std::cout << bundle.summary << "\n";
  for (const auto& f : bundle.files) std::cout << "  wrote " << spec.output.directory << "/" << f.name << "\n";
  return 0;
}

int run_netlist(const Options& o) {
  const auto spec = load(o, "");
  const auto part = report::parse_netlist_part(o.part);
  if (!part) throw InvalidInputError("--part must be link, tx or rx");
  const std::string text = report::emit_netlist(spec, *part);
  if (o.netlist_output.empty() || o.netlist_output == "-") {
    std::cout << text;
  } else {
    report::OutputFile f{"", text};
    const std::filesystem::path p(o.netlist_output);
    f.name = p.filename().string();
    report::write_bundle({{f}, {}}, p.has_parent_path() ? p.parent_path() : std::filesystem::path("."));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"couplerlab: MIMO power-line coupler circuit analysis"};
  app.set_version_flag("--version", std::string(couplerlab::report::kVersion));
  app.require_subcommand(1);

  Options o;
  auto common = [&o](CLI::App* sub, bool writes_results) {
    sub->add_option("--scenario", o.scenario, "scenario INI file (defaults apply when omitted)");
    sub->add_option("--set", o.overrides, "override, section.key=value (repeatable)");
    sub->add_option("--threads", o.threads, "worker threads, 0 = all cores");
    if (writes_results) {
      sub->add_option("--output-dir", o.output_dir, "directory for CSV files and the manifest");
      sub->add_flag("--raw", o.raw, "write complex values as (re, im) instead of (dB, degrees)");
    }
  };

  struct Verb {
    const char* name;
    const char* experiment;
    const char* help;
  };
  const Verb verbs[] = {
      {"tf", "tf", "transfer-function matrix over the frequency grid"},
      {"sweep-load", "load-sweep", "output deviation as one receiver load is swept"},
      {"sweep-line", "line-sweep", "transfer function for a family of line impedances"},
      {"compare", "compare", "rank TX x RX topology configurations over the passband"},
      {"mc", "tolerance-mc", "component tolerance Monte Carlo"},
  };
  std::string chosen_experiment;
  for (const auto& v : verbs) {
    auto* sub = app.add_subcommand(v.name, v.help);
    common(sub, true);
    sub->callback([&chosen_experiment, v] { chosen_experiment = v.experiment; });
  }
  auto* net = app.add_subcommand("netlist", "print the netlist a run would solve");
  common(net, false);
  net->add_option("--part", o.part, "link, tx or rx")->check(CLI::IsMember({"link", "tx", "rx"}));
  net->add_option("--output", o.netlist_output, "write to this file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (net->parsed()) return run_netlist(o);
    return run_experiment(o, chosen_experiment);
  } catch (const couplerlab::report::ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const couplerlab::SingularSystemError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const couplerlab::DegenerateCaseError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const couplerlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
