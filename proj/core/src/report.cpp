#include "couplerlab/report.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "couplerlab/netlist_io.hpp"
#include "couplerlab/si_units.hpp"

namespace couplerlab::report {

namespace fs = std::filesystem;

const OutputFile* ResultBundle::find(std::string_view name) const {
  for (const auto& f : files)
    if (f.name == name) return &f;
  return nullptr;
}

std::string csv_number(double v) { return format_number(v, 12); }

namespace {

std::string join(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) s += ',';
    s += cells[i];
  }
  s += '\n';
  return s;
}

sweep::SweepOptions sweep_options(const ScenarioSpec& spec, unsigned threads) {
  return {.method = spec.experiment.method, .threads = threads};
}

ResultBundle run_transfer(const ScenarioSpec& spec, unsigned threads) {
  ResultBundle b;
  const auto set = sweep::frequency_sweep(spec.link, spec.grid, sweep_options(spec, threads));
  b.files.push_back({"transfer.csv", write_transfer_csv(set, spec.output.raw_complex)});
  b.summary = set.configuration + ": " + std::to_string(set.frequencies.size()) + " frequencies, " +
              std::to_string(set.outputs.size()) + "x" + std::to_string(set.inputs.size()) + " transfer matrix, " +
              std::to_string(set.fallback_count()) + " cascade fallbacks";
  return b;
}

ResultBundle run_load_sweep(const ScenarioSpec& spec) {
  ResultBundle b;
  const auto& ex = spec.experiment;
  const auto r = sweep::load_mismatch_sweep(spec.link, ex.load, ex.load_values, ex.frequency);
  std::string csv;
  std::vector<std::string> header{r.axis_name};
  for (const auto& c : r.curves) header.push_back(c.name + "_pct");
  csv += join(header);
  for (std::size_t i = 0; i < r.axis.size(); ++i) {
    std::vector<std::string> row{csv_number(r.axis[i])};
    for (const auto& c : r.curves) row.push_back(c.values[i] ? csv_number(*c.values[i]) : "undefined");
    csv += join(row);
  }
  b.files.push_back({"load_sweep.csv", csv});
  b.summary = r.description;
  return b;
}

ResultBundle run_line_sweep(const ScenarioSpec& spec, unsigned threads) {
  ResultBundle b;
  const auto r = sweep::line_impedance_sweep(spec.link, spec.line_sweep, spec.grid, spec.experiment.frequency,
                                             sweep_options(spec, threads));
  std::vector<std::vector<double>> curves;
  std::vector<std::string> header{"frequency_hz"};
  for (std::size_t k = 0; k < r.impedances.size(); ++k) {
    header.push_back("gain_db_zline_" + format_number(r.impedances[k]));
    curves.push_back(sweep::gain_curve_db(r.family[k]));
  }
  std::string csv = join(header);
  const auto& f = r.family.front().frequencies;
  for (std::size_t i = 0; i < f.size(); ++i) {
    std::vector<std::string> row{csv_number(f[i])};
    for (const auto& c : curves) row.push_back(csv_number(c[i]));
    csv += join(row);
  }
  b.files.push_back({"line_sweep.csv", csv});

  std::string summary = join({"line_impedance_ohm", "gain_at_reference_db", "cascade_fallbacks"});
  for (std::size_t k = 0; k < r.impedances.size(); ++k)
    summary += join({csv_number(r.impedances[k]), csv_number(r.gain_at_reference_db[k]),
                     std::to_string(r.family[k].fallback_count())});
  b.files.push_back({"line_sweep_summary.csv", summary});
  b.files.push_back({"line_sweep_spread.csv", join({"reference_frequency_hz", "spread_db"}) +
                                                  join({csv_number(r.reference_frequency), csv_number(r.spread_db)})});
  b.summary = "gain spread at " + format_frequency(r.reference_frequency) + ": " + format_number(r.spread_db, 4) + " dB";
  return b;
}

ResultBundle run_compare(const ScenarioSpec& spec, unsigned threads) {
  ResultBundle b;
  const auto& ex = spec.experiment;
  sweep::CompareOptions opt;
  opt.tx_params = spec.link.tx.params;
  opt.rx_params = spec.link.rx.params;
  opt.mimo = spec.link.tx.mimo;
  opt.excitation = spec.link.tx.excitation;
  opt.passband = ex.passband;
  opt.sweep = sweep_options(spec, threads);
  const auto r = sweep::compare_configurations(ex.tx_set, ex.rx_set, spec.link.line[0], spec.grid, opt);

  std::string ranking = join({"rank", "configuration", "tx", "rx", "feasible", "mean_passband_db"});
  for (std::size_t i = 0; i < r.ranking.size(); ++i) {
    const auto& e = r.entry(r.ranking[i]);
    ranking += join({std::to_string(i + 1), e.name, std::string(coupler::to_string(e.tx)),
                     std::string(coupler::to_string(e.rx)), e.feasible ? "true" : "false",
                     csv_number(e.mean_passband_db)});
  }
  b.files.push_back({"compare_ranking.csv", ranking});

  std::vector<std::string> header{"frequency_hz"};
  for (const auto& e : r.entries) header.push_back(e.name + "_db");
  std::string curves = join(header);
  for (std::size_t i = 0; i < r.frequencies.size(); ++i) {
    std::vector<std::string> row{csv_number(r.frequencies[i])};
    for (const auto& e : r.entries) row.push_back(csv_number(e.curve_db[i]));
    curves += join(row);
  }
  b.files.push_back({"compare_curves.csv", curves});
  b.summary = "ranking (best first):";
  for (const auto& n : r.ranking) b.summary += " " + n + (r.entry(n).feasible ? "" : "*");
  return b;
}

ResultBundle run_tolerance(const ScenarioSpec& spec, unsigned threads) {
  ResultBundle b;
  const auto& ex = spec.experiment;
  const auto st = sweep::tolerance_monte_carlo(spec.link, ex.tolerance, ex.trials, ex.seed, spec.grid, ex.passband,
                                               sweep_options(spec, threads));
  std::string trials = join({"trial", "max_deviation_db"});
  for (std::size_t t = 0; t < st.per_trial_db.size(); ++t)
    trials += join({std::to_string(t), csv_number(st.per_trial_db[t])});
  b.files.push_back({"tolerance_trials.csv", trials});
  std::string summary = join({"quantity", "value"});
  summary += join({"tolerance", csv_number(st.tolerance)});
  summary += join({"trials", std::to_string(st.trials)});
  summary += join({"seed", std::to_string(st.seed)});
  summary += join({"max_deviation_db", csv_number(st.max_deviation_db)});
  summary += join({"p95_deviation_db", csv_number(st.p95_deviation_db)});
  summary += join({"resampled_draws", std::to_string(st.resampled)});
  b.files.push_back({"tolerance_summary.csv", summary});
  b.summary = std::to_string(st.trials) + " trials at +/-" + format_number(100.0 * st.tolerance, 4) +
              "%: max " + format_number(st.max_deviation_db, 4) + " dB, p95 " +
              format_number(st.p95_deviation_db, 4) + " dB";
  return b;
}

}  // namespace

std::string write_transfer_csv(const cascade::TransferFunctionSet& set, bool raw_complex) {
  std::vector<std::string> header{"frequency_hz"};
  for (const auto& o : set.outputs)
    for (const auto& i : set.inputs) {
      const std::string base = "H_" + o + "_" + i;
      header.push_back(base + (raw_complex ? "_re" : "_db"));
      header.push_back(base + (raw_complex ? "_im" : "_deg"));
    }
  header.push_back("cascade_fallback");
  std::string csv = join(header);
  for (std::size_t k = 0; k < set.frequencies.size(); ++k) {
    std::vector<std::string> row{csv_number(set.frequencies[k])};
    const auto& h = set.responses[k];
    for (std::size_t o = 0; o < set.outputs.size(); ++o)
      for (std::size_t i = 0; i < set.inputs.size(); ++i) {
        const Complex v = h(o, i);
        if (raw_complex) {
          row.push_back(csv_number(v.real()));
          row.push_back(csv_number(v.imag()));
        } else {
          row.push_back(csv_number(20.0 * std::log10(std::abs(v))));
          row.push_back(csv_number(std::arg(v) * 180.0 / std::numbers::pi));
        }
      }
    row.push_back(k < set.fallback.size() && set.fallback[k] ? "1" : "0");
    csv += join(row);
  }
  return csv;
}

std::string manifest_text(const ScenarioSpec& spec) {
  return "# couplerlab " + std::string(kVersion) + " run manifest\n# rerun with: couplerlab <verb> --scenario manifest.ini\n\n" +
         print_scenario(spec);
}

ResultBundle run(const ScenarioSpec& spec, unsigned threads) {
  ResultBundle b;
  switch (spec.experiment.kind) {
    case ExperimentKind::TransferFunction: b = run_transfer(spec, threads); break;
    case ExperimentKind::LoadSweep: b = run_load_sweep(spec); break;
    case ExperimentKind::LineSweep: b = run_line_sweep(spec, threads); break;
    case ExperimentKind::Compare: b = run_compare(spec, threads); break;
    case ExperimentKind::ToleranceMc: b = run_tolerance(spec, threads); break;
  }
  b.files.push_back({"netlist.cir", emit_netlist(spec, NetlistPart::Link)});
  b.files.push_back({"manifest.ini", manifest_text(spec)});
  return b;
}

void write_bundle(const ResultBundle& bundle, const fs::path& directory) {
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw Error("cannot create output directory " + directory.string() + ": " + ec.message());
  for (const auto& f : bundle.files) {
    const fs::path target = directory / f.name;
    fs::path tmp = target;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << f.content;
      out.flush();
      if (!out) throw Error("cannot write " + tmp.string());
    }
    fs::rename(tmp, target, ec);
    if (ec) {
      fs::remove(tmp);
      throw Error("cannot move " + tmp.string() + " into place: " + ec.message());
    }
  }
}

std::optional<NetlistPart> parse_netlist_part(std::string_view s) {
  if (s == "link") return NetlistPart::Link;
  if (s == "tx") return NetlistPart::Tx;
  if (s == "rx") return NetlistPart::Rx;
  return std::nullopt;
}

std::string emit_netlist(const ScenarioSpec& spec, NetlistPart part) {
  std::string head = "* couplerlab " + std::string(kVersion) + " ";
  switch (part) {
    case NetlistPart::Link:
      return head + coupler::configuration_name(spec.link) + " back-to-back link\n" +
             circuit::print_netlist(coupler::connect_back_to_back(spec.link));
    case NetlistPart::Tx:
      return head + std::string(coupler::to_string(spec.link.tx.topology)) + " transmitter coupler\n" +
             circuit::print_netlist(coupler::build_coupler(spec.link.tx));
    case NetlistPart::Rx:
      return head + std::string(coupler::to_string(spec.link.rx.topology)) + " receiver coupler\n" +
             circuit::print_netlist(coupler::build_coupler(spec.link.rx));
  }
  return {};
}

}  // namespace couplerlab::report
