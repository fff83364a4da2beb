#include "couplerlab/scenario.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "couplerlab/si_units.hpp"

namespace couplerlab::report {

using coupler::Topology;

std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::TransferFunction: return "tf";
    case ExperimentKind::LoadSweep: return "load-sweep";
    case ExperimentKind::LineSweep: return "line-sweep";
    case ExperimentKind::Compare: return "compare";
    case ExperimentKind::ToleranceMc: return "tolerance-mc";
  }
  return "?";
}

std::optional<ExperimentKind> parse_experiment(std::string_view s) {
  if (s == "tf") return ExperimentKind::TransferFunction;
  if (s == "load-sweep" || s == "sweep-load") return ExperimentKind::LoadSweep;
  if (s == "line-sweep" || s == "sweep-line") return ExperimentKind::LineSweep;
  if (s == "compare") return ExperimentKind::Compare;
  if (s == "tolerance-mc" || s == "mc") return ExperimentKind::ToleranceMc;
  return std::nullopt;
}

ExperimentSpec::ExperimentSpec() : tx_set(sweep::default_tx_set()), rx_set(sweep::default_rx_set()) {
  // 0..300 ohm in 5 ohm steps; i * 300 / 60 is exact for every point.
  for (int i = 0; i <= 60; ++i) load_values.push_back(300.0 * i / 60.0);
}

namespace {

std::string issues_text(const std::vector<ScenarioIssue>& issues) {
  std::string s = "scenario has " + std::to_string(issues.size()) + " error" + (issues.size() == 1 ? "" : "s") + ":";
  for (const auto& i : issues) s += "\n  " + i.where + ": " + i.message;
  return s;
}

}  // namespace

ScenarioError::ScenarioError(std::vector<ScenarioIssue> issues)
    : Error(issues_text(issues)), issues_(std::move(issues)) {}

namespace {

struct Entry {
  std::string section;
  std::string key;
  std::string value;
  std::string where;
};

const std::vector<std::string> kSections = {"frequency", "tx", "line", "rx", "experiment", "output"};

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> split_list(std::string_view v) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    std::size_t comma = v.find(',', start);
    if (comma == std::string_view::npos) comma = v.size();
    out.emplace_back(trim(v.substr(start, comma - start)));
    start = comma + 1;
  }
  if (out.size() == 1 && out[0].empty()) out.clear();
  return out;
}

// Parsers return an error message, empty on success.
using Setter = std::function<std::string(const std::string&)>;

Setter number(double& target) {
  return [&target](const std::string& v) -> std::string {
    auto x = parse_si(v);
    if (!x) return "malformed number '" + v + "'";
    target = *x;
    return {};
  };
}

Setter complex_value(Complex& target) {
  return [&target](const std::string& v) -> std::string {
    auto x = parse_complex(v);
    if (!x) return "malformed complex value '" + v + "'";
    target = *x;
    return {};
  };
}

Setter complex_triple(std::array<Complex, 3>& target) {
  return [&target](const std::string& v) -> std::string {
    const auto parts = split_list(v);
    if (parts.size() != 1 && parts.size() != 3) return "expected one or three complex values, got '" + v + "'";
    std::array<Complex, 3> out;
    for (std::size_t k = 0; k < 3; ++k) {
      const auto& p = parts[parts.size() == 1 ? 0 : k];
      auto x = parse_complex(p);
      if (!x) return "malformed complex value '" + p + "'";
      out[k] = *x;
    }
    target = out;
    return {};
  };
}

Setter boolean(bool& target) {
  return [&target](const std::string& v) -> std::string {
    const std::string l = lower(v);
    if (l == "true" || l == "yes" || l == "on" || l == "1") target = true;
    else if (l == "false" || l == "no" || l == "off" || l == "0") target = false;
    else return "expected true or false, got '" + v + "'";
    return {};
  };
}

template <class Int>
Setter integer(Int& target) {
  return [&target](const std::string& v) -> std::string {
    Int x{};
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || p != v.data() + v.size()) return "expected a non-negative integer, got '" + v + "'";
    target = x;
    return {};
  };
}

Setter topology(Topology& target) {
  return [&target](const std::string& v) -> std::string {
    auto t = coupler::parse_topology(v);
    if (!t) return "unknown topology '" + v + "' (star, triangle, T)";
    target = *t;
    return {};
  };
}

Setter topology_list(std::vector<Topology>& target) {
  return [&target](const std::string& v) -> std::string {
    std::vector<Topology> out;
    for (const auto& p : split_list(v)) {
      auto t = coupler::parse_topology(p);
      if (!t) return "unknown topology '" + p + "' (star, triangle, T)";
      out.push_back(*t);
    }
    if (out.empty()) return "topology list is empty";
    target = out;
    return {};
  };
}

// "v1, v2, ..." or "start:stop:count" (inclusive, evenly spaced).
Setter number_list(std::vector<double>& target) {
  return [&target](const std::string& v) -> std::string {
    std::vector<double> out;
    if (v.find(':') != std::string::npos && v.find(',') == std::string::npos) {
      std::vector<std::string> parts;
      std::size_t s = 0;
      for (;;) {
        auto c = v.find(':', s);
        parts.emplace_back(trim(std::string_view(v).substr(s, c == std::string::npos ? std::string::npos : c - s)));
        if (c == std::string::npos) break;
        s = c + 1;
      }
      if (parts.size() != 3) return "range must read start:stop:count, got '" + v + "'";
      auto a = parse_si(parts[0]);
      auto b = parse_si(parts[1]);
      std::size_t n = 0;
      auto [p, ec] = std::from_chars(parts[2].data(), parts[2].data() + parts[2].size(), n);
      if (!a || !b || ec != std::errc{} || p != parts[2].data() + parts[2].size() || n < 2)
        return "malformed range '" + v + "'";
      for (std::size_t i = 0; i < n; ++i) out.push_back(*a + (*b - *a) * static_cast<double>(i) / static_cast<double>(n - 1));
    } else {
      for (const auto& p : split_list(v)) {
        auto x = parse_si(p);
        if (!x) return "malformed number '" + p + "'";
        out.push_back(*x);
      }
    }
    if (out.empty()) return "list is empty";
    target = out;
    return {};
  };
}

std::string join_numbers(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_number(v[i]);
  }
  return s;
}

std::string join_complex(const std::array<Complex, 3>& v) {
  return format_complex(v[0]) + ", " + format_complex(v[1]) + ", " + format_complex(v[2]);
}

std::string join_topologies(const std::vector<Topology>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += coupler::to_string(v[i]);
  }
  return s;
}

std::string yes_no(bool b) { return b ? "true" : "false"; }

void block_setters(std::map<std::string, Setter>& m, coupler::BlockParams& p) {
  m["protection_resistance"] = number(p.protection.resistance);
  m["protection_inductance"] = number(p.protection.inductance);
  m["protection_bypass"] = boolean(p.protection.bypass);
  m["capacitance"] = number(p.filter.capacitance);
  m["filter_bypass"] = boolean(p.filter.bypass);
  m["cm_inductance"] = number(p.common_mode.inductance);
  m["cm_coupling"] = number(p.common_mode.coupling);
  m["cm_neutral_resistance"] = number(p.common_mode.neutral_resistance);
  m["cm_load"] = complex_value(p.common_mode.load);
  m["cm_bypass"] = boolean(p.common_mode.bypass);
  m["turns_ratio"] = number(p.uncoupling.turns_ratio);
  m["inductance"] = number(p.uncoupling.inductance);
  m["coupling"] = number(p.uncoupling.coupling);
  m["ideal_transformers"] = boolean(p.uncoupling.ideal);
  m["impedances"] = complex_triple(p.terminations);
}

void print_block(std::ostringstream& os, const coupler::CouplerSpec& c) {
  const auto& p = c.params;
  os << "topology = " << coupler::to_string(c.topology) << "\n";
  os << "mimo = " << coupler::to_string(c.mimo) << "\n";
  os << "protection_resistance = " << format_number(p.protection.resistance) << "\n";
  os << "protection_inductance = " << format_number(p.protection.inductance) << "\n";
  os << "protection_bypass = " << yes_no(p.protection.bypass) << "\n";
  os << "capacitance = " << format_number(p.filter.capacitance) << "\n";
  os << "filter_bypass = " << yes_no(p.filter.bypass) << "\n";
  os << "cm_inductance = " << format_number(p.common_mode.inductance) << "\n";
  os << "cm_coupling = " << format_number(p.common_mode.coupling) << "\n";
  os << "cm_neutral_resistance = " << format_number(p.common_mode.neutral_resistance) << "\n";
  os << "cm_load = " << format_complex(p.common_mode.load) << "\n";
  os << "cm_bypass = " << yes_no(p.common_mode.bypass) << "\n";
  os << "turns_ratio = " << format_number(p.uncoupling.turns_ratio) << "\n";
  os << "inductance = " << format_number(p.uncoupling.inductance) << "\n";
  os << "coupling = " << format_number(p.uncoupling.coupling) << "\n";
  os << "ideal_transformers = " << yes_no(p.uncoupling.ideal) << "\n";
  os << "impedances = " << join_complex(p.terminations) << "\n";
}

}  // namespace

ScenarioSpec parse_scenario(std::string_view text, std::span<const std::string> overrides) {
  std::vector<ScenarioIssue> issues;
  std::vector<Entry> entries;

  // Pass 1: tokenise.
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const std::string where = "line " + std::to_string(line_no);
    if (auto hash = raw.find(" #"); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        issues.push_back({where, "malformed section header '" + std::string(line) + "'"});
        section.clear();
        continue;
      }
      section = lower(trim(line.substr(1, line.size() - 2)));
      if (std::find(kSections.begin(), kSections.end(), section) == kSections.end()) {
        issues.push_back({where, "unknown section [" + section + "]"});
        section = "?";
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      issues.push_back({where, "expected 'key = value', got '" + std::string(line) + "'"});
      continue;
    }
    if (section.empty()) {
      // A bare "experiment = <type>" ahead of the sections is accepted as shorthand.
      if (lower(trim(line.substr(0, eq))) == "experiment") {
        entries.push_back({"experiment", "type", std::string(trim(line.substr(eq + 1))), where});
        continue;
      }
      issues.push_back({where, "key outside of any section"});
      continue;
    }
    if (section == "?") continue;  // already reported
    Entry e{section, lower(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))), where};
    for (const auto& prev : entries)
      if (prev.section == e.section && prev.key == e.key)
        issues.push_back({where, "duplicate key '" + e.key + "' in [" + e.section + "] (first at " + prev.where + ")"});
    entries.push_back(std::move(e));
  }

  for (std::size_t i = 0; i < overrides.size(); ++i) {
    const std::string where = "--set " + std::to_string(i + 1);
    const std::string& o = overrides[i];
    const auto dot = o.find('.');
    const auto eq = o.find('=');
    if (dot == std::string::npos || eq == std::string::npos || dot > eq) {
      issues.push_back({where, "override must read section.key=value, got '" + o + "'"});
      continue;
    }
    Entry e{lower(trim(std::string_view(o).substr(0, dot))), lower(trim(std::string_view(o).substr(dot + 1, eq - dot - 1))),
            std::string(trim(std::string_view(o).substr(eq + 1))), where};
    if (std::find(kSections.begin(), kSections.end(), e.section) == kSections.end()) {
      issues.push_back({where, "unknown section [" + e.section + "]"});
      continue;
    }
    auto it = std::find_if(entries.begin(), entries.end(),
                           [&](const Entry& x) { return x.section == e.section && x.key == e.key; });
    if (it != entries.end()) *it = std::move(e);
    else entries.push_back(std::move(e));
  }

  // Pass 2: apply onto defaults.
  ScenarioSpec spec;
  auto& tx = spec.link.tx;
  auto& rx = spec.link.rx;
  std::string grid_scale = "log";
  std::string tx_mimo, rx_mimo, experiment_type, load_name = "a", method = "cascade", complex_format = "db-deg";
  bool full_set = false;
  const Entry* tx_mimo_entry = nullptr;
  const Entry* rx_mimo_entry = nullptr;

  // Pass-through resets a whole block set, so it is applied before the
  // individual keys of its section regardless of file order.
  for (const auto& e : entries) {
    if (e.key != "pass_through" || (e.section != "tx" && e.section != "rx")) continue;
    bool on = false;
    if (auto err = boolean(on)(e.value); !err.empty()) {
      issues.push_back({e.where, err});
      continue;
    }
    if (!on) continue;
    auto& params = e.section == "tx" ? tx.params : rx.params;
    const auto terms = params.terminations;
    params = coupler::BlockParams::pass_through();
    params.terminations = terms;
  }

  std::map<std::string, std::map<std::string, Setter>> table;
  {
    auto& f = table["frequency"];
    f["start"] = number(spec.grid.start);
    f["stop"] = number(spec.grid.stop);
    f["points"] = integer(spec.grid.points);
    f["scale"] = [&](const std::string& v) -> std::string {
      const auto l = lower(v);
      if (l != "log" && l != "linear") return "scale must be log or linear, got '" + v + "'";
      grid_scale = l;
      return {};
    };
  }
  for (auto* side : {&tx, &rx}) {
    auto& m = table[side == &tx ? "tx" : "rx"];
    block_setters(m, side->params);
    m["topology"] = topology(side->topology);
    m["pass_through"] = [](const std::string&) { return std::string{}; };
  }
  table["tx"]["mimo"] = [&](const std::string& v) { tx_mimo = v; return std::string{}; };
  table["rx"]["mimo"] = [&](const std::string& v) { rx_mimo = v; return std::string{}; };
  table["tx"]["sources"] = complex_triple(tx.excitation);
  table["tx"]["drive_common_mode"] = boolean(tx.drive_common_mode);
  table["tx"]["allow_emi_infeasible"] = boolean(tx.allow_emi_infeasible);
  table["line"]["impedances"] = complex_triple(spec.link.line);
  table["line"]["sweep"] = number_list(spec.line_sweep);
  {
    auto& x = table["experiment"];
    auto& ex = spec.experiment;
    x["type"] = [&](const std::string& v) { experiment_type = v; return std::string{}; };
    x["load"] = [&](const std::string& v) { load_name = lower(v); return std::string{}; };
    x["values"] = number_list(ex.load_values);
    x["frequency"] = number(ex.frequency);
    x["tx_set"] = topology_list(ex.tx_set);
    x["rx_set"] = topology_list(ex.rx_set);
    x["full"] = boolean(full_set);
    x["passband_low"] = number(ex.passband.low);
    x["passband_high"] = number(ex.passband.high);
    x["tolerance"] = number(ex.tolerance);
    x["trials"] = integer(ex.trials);
    x["seed"] = integer(ex.seed);
    x["method"] = [&](const std::string& v) { method = lower(v); return std::string{}; };
  }
  {
    auto& o = table["output"];
    o["directory"] = [&](const std::string& v) -> std::string {
      if (v.empty()) return "output directory is empty";
      spec.output.directory = v;
      return {};
    };
    o["complex"] = [&](const std::string& v) { complex_format = lower(v); return std::string{}; };
  }

  for (const auto& e : entries) {
    auto& section_table = table[e.section];
    auto it = section_table.find(e.key);
    if (it == section_table.end()) {
      issues.push_back({e.where, "unknown key '" + e.key + "' in [" + e.section + "]"});
      continue;
    }
    if (auto err = it->second(e.value); !err.empty()) issues.push_back({e.where, err});
    if (e.section == "tx" && e.key == "mimo") tx_mimo_entry = &e;
    if (e.section == "rx" && e.key == "mimo") rx_mimo_entry = &e;
  }

  // Cross-field resolution and validation.
  spec.grid.scale = grid_scale == "linear" ? sweep::GridScale::Linear : sweep::GridScale::Log;
  auto where_of = [&](const std::string& sec, const std::string& key) {
    for (const auto& e : entries)
      if (e.section == sec && e.key == key) return e.where;
    return std::string("[" + sec + "]");
  };

  {
    std::optional<coupler::MimoMode> mt, mr;
    if (tx_mimo_entry) {
      mt = coupler::parse_mimo(tx_mimo);
      if (!mt) issues.push_back({tx_mimo_entry->where, "unknown MIMO mode '" + tx_mimo + "' (2x3, 2x4, 3x3, 3x4)"});
    }
    if (rx_mimo_entry) {
      mr = coupler::parse_mimo(rx_mimo);
      if (!mr) issues.push_back({rx_mimo_entry->where, "unknown MIMO mode '" + rx_mimo + "' (2x3, 2x4, 3x3, 3x4)"});
    }
    if (mt && mr && *mt != *mr)
      issues.push_back({rx_mimo_entry->where, "conflicting sections: [tx] mimo = " + tx_mimo + " but [rx] mimo = " + rx_mimo});
    const auto mode = mt ? mt : mr;
    if (mode) tx.mimo = rx.mimo = *mode;
  }

  if (!experiment_type.empty()) {
    if (auto k = parse_experiment(experiment_type)) spec.experiment.kind = *k;
    else issues.push_back({where_of("experiment", "type"), "unknown experiment type '" + experiment_type +
                                                               "' (tf, load-sweep, line-sweep, compare, tolerance-mc)"});
  }
  if (load_name == "a" || load_name == "za") spec.experiment.load = 0;
  else if (load_name == "b" || load_name == "zb") spec.experiment.load = 1;
  else if (load_name == "c" || load_name == "zc") spec.experiment.load = 2;
  else issues.push_back({where_of("experiment", "load"), "load must be a, b or c, got '" + load_name + "'"});
  if (method == "cascade") spec.experiment.method = cascade::Method::Cascade;
  else if (method == "monolithic") spec.experiment.method = cascade::Method::Monolithic;
  else issues.push_back({where_of("experiment", "method"), "method must be cascade or monolithic"});
  if (complex_format == "db-deg") spec.output.raw_complex = false;
  else if (complex_format == "re-im") spec.output.raw_complex = true;
  else issues.push_back({where_of("output", "complex"), "complex must be db-deg or re-im"});
  if (full_set) {
    spec.experiment.tx_set = sweep::all_topologies();
    spec.experiment.rx_set = sweep::all_topologies();
  }

  if (spec.grid.points < 2) issues.push_back({where_of("frequency", "points"), "points >= 2 required"});
  if (!(spec.grid.start > 0.0)) issues.push_back({where_of("frequency", "start"), "start must be > 0"});
  if (!(spec.grid.stop > spec.grid.start)) issues.push_back({where_of("frequency", "stop"), "stop must exceed start"});

  const auto& ex = spec.experiment;
  if (!(ex.frequency > 0.0)) issues.push_back({where_of("experiment", "frequency"), "frequency must be > 0"});
  if (!(ex.passband.low > 0.0 && ex.passband.high > ex.passband.low))
    issues.push_back({where_of("experiment", "passband_low"), "passband needs 0 < low < high"});
  if (!(ex.tolerance >= 0.0 && ex.tolerance <= 0.5))
    issues.push_back({where_of("experiment", "tolerance"), "tolerance must lie in [0, 0.5]"});
  if (ex.trials < 1) issues.push_back({where_of("experiment", "trials"), "trials >= 1 required"});
  {
    bool up = true, down = true;
    for (std::size_t i = 1; i < ex.load_values.size(); ++i) {
      up = up && ex.load_values[i] > ex.load_values[i - 1];
      down = down && ex.load_values[i] < ex.load_values[i - 1];
    }
    if (!up && !down) issues.push_back({where_of("experiment", "values"), "load values must be strictly monotone"});
    for (double v : ex.load_values)
      if (!(v >= 0.0)) {
        issues.push_back({where_of("experiment", "values"), "load values must be >= 0"});
        break;
      }
  }
  for (double z : spec.line_sweep)
    if (!(z >= 0.0)) {
      issues.push_back({where_of("line", "sweep"), "line sweep impedances must be >= 0"});
      break;
    }

  for (auto* side : {&tx, &rx}) {
    const std::string name = side == &tx ? "tx" : "rx";
    try {
      coupler::check_spec(*side);
    } catch (const Error& e) {
      issues.push_back({"[" + name + "]", e.what()});
    }
  }

  if (!issues.empty()) throw ScenarioError(std::move(issues));
  return spec;
}

std::string print_scenario(const ScenarioSpec& spec) {
  std::ostringstream os;
  os << "[frequency]\n";
  os << "start = " << format_number(spec.grid.start) << "\n";
  os << "stop = " << format_number(spec.grid.stop) << "\n";
  os << "points = " << spec.grid.points << "\n";
  os << "scale = " << (spec.grid.scale == sweep::GridScale::Log ? "log" : "linear") << "\n\n";

  os << "[tx]\n";
  print_block(os, spec.link.tx);
  os << "sources = " << join_complex(spec.link.tx.excitation) << "\n";
  os << "drive_common_mode = " << yes_no(spec.link.tx.drive_common_mode) << "\n";
  os << "allow_emi_infeasible = " << yes_no(spec.link.tx.allow_emi_infeasible) << "\n\n";

  os << "[line]\n";
  os << "impedances = " << join_complex(spec.link.line) << "\n";
  os << "sweep = " << join_numbers(spec.line_sweep) << "\n\n";

  os << "[rx]\n";
  print_block(os, spec.link.rx);
  os << "\n";

  const auto& ex = spec.experiment;
  os << "[experiment]\n";
  os << "type = " << to_string(ex.kind) << "\n";
  os << "load = " << static_cast<char>('a' + ex.load) << "\n";
  os << "values = " << join_numbers(ex.load_values) << "\n";
  os << "frequency = " << format_number(ex.frequency) << "\n";
  os << "tx_set = " << join_topologies(ex.tx_set) << "\n";
  os << "rx_set = " << join_topologies(ex.rx_set) << "\n";
  os << "passband_low = " << format_number(ex.passband.low) << "\n";
  os << "passband_high = " << format_number(ex.passband.high) << "\n";
  os << "tolerance = " << format_number(ex.tolerance) << "\n";
  os << "trials = " << ex.trials << "\n";
  os << "seed = " << ex.seed << "\n";
  os << "method = " << (ex.method == cascade::Method::Cascade ? "cascade" : "monolithic") << "\n\n";

  os << "[output]\n";
  os << "directory = " << spec.output.directory << "\n";
  os << "complex = " << (spec.output.raw_complex ? "re-im" : "db-deg") << "\n";
  return os.str();
}

}  // namespace couplerlab::report
