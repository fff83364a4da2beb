#include "couplerlab/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "couplerlab/errors.hpp"
#include "couplerlab/parallel.hpp"
#include "couplerlab/si_units.hpp"

namespace couplerlab::sweep {

using coupler::Topology;

void FrequencyGrid::validate() const {
  if (!(start > 0.0) || !std::isfinite(start)) throw InvalidInputError("frequency grid: start must be > 0");
  if (!(stop > start) || !std::isfinite(stop)) throw InvalidInputError("frequency grid: stop must exceed start");
  if (points < 2) throw InvalidInputError("frequency grid: points >= 2 required");
}

std::vector<double> FrequencyGrid::values() const {
  validate();
  std::vector<double> f(points);
  const double last = static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / last;
    if (scale == GridScale::Log) f[i] = start * std::pow(stop / start, t);
    else f[i] = start + (stop - start) * t;
  }
  f.front() = start;
  f.back() = stop;
  return f;
}

double rms_gain_db(const CMatrix& h) {
  if (h.empty()) throw InvalidInputError("rms_gain_db of an empty matrix");
  const double entries = static_cast<double>(h.rows() * h.cols());
  return 20.0 * std::log10(h.frobenius_norm() / std::sqrt(entries));
}

std::vector<double> gain_curve_db(const TransferFunctionSet& set) {
  std::vector<double> out;
  out.reserve(set.responses.size());
  for (const auto& h : set.responses) out.push_back(rms_gain_db(h));
  return out;
}

double band_mean_db(std::span<const double> frequencies, std::span<const double> curve_db, Band band) {
  if (frequencies.size() != curve_db.size()) throw InvalidInputError("band_mean_db: length mismatch");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    if (!band.contains(frequencies[i])) continue;
    sum += curve_db[i];
    ++n;
  }
  if (n == 0) throw InvalidInputError("no grid frequency falls inside the passband");
  return sum / static_cast<double>(n);
}

TransferFunctionSet frequency_sweep(const cascade::LinkModel& model, std::span<const double> frequencies,
                                    SweepOptions options) {
  TransferFunctionSet set;
  set.configuration = coupler::configuration_name(model.spec());
  set.inputs = model.ports().inputs;
  set.outputs = model.ports().outputs;
  set.frequencies.assign(frequencies.begin(), frequencies.end());
  set.responses.resize(frequencies.size());
  std::vector<char> fallback(frequencies.size(), 0);
  parallel_for(
      frequencies.size(),
      [&](std::size_t i) {
        bool fb = false;
        try {
          set.responses[i] = model.transfer(frequencies[i], options.method, &fb);
        } catch (const SingularSystemError& e) {
          throw SingularSystemError(e.unknown(), e.pivot(),
                                    set.configuration + " at " + format_frequency(frequencies[i]));
        }
        fallback[i] = fb;
      },
      options.threads);
  set.fallback.assign(fallback.begin(), fallback.end());
  return set;
}

TransferFunctionSet frequency_sweep(const BackToBackSpec& spec, const FrequencyGrid& grid, SweepOptions options) {
  const cascade::LinkModel model(spec);
  const auto f = grid.values();
  return frequency_sweep(model, f, options);
}

bool is_closed_form_case(const BackToBackSpec& spec) {
  return spec.tx.topology == Topology::Star && spec.rx.topology == Topology::Star &&
         spec.tx.params.is_pass_through() && spec.rx.params.is_pass_through() && !spec.tx.drive_common_mode &&
         !coupler::mimo_port_map(spec.rx.mimo).rx_common_mode;
}

oracle::StarStarCase closed_form_case(const BackToBackSpec& spec) {
  oracle::StarStarCase c;
  const std::size_t driven = coupler::driven_ports(spec.tx);
  for (std::size_t k = 0; k < 3; ++k) {
    c.sources[k] = k < driven ? spec.tx.excitation[k] : Complex{};
    c.source_impedances[k] = spec.tx.params.terminations[k] + spec.line[k];
    c.load_impedances[k] = spec.rx.params.terminations[k];
  }
  return c;
}

namespace {

oracle::Triple received_outputs(const BackToBackSpec& spec, double frequency) {
  if (is_closed_form_case(spec)) return oracle::star_star_outputs(closed_form_case(spec));
  const cascade::LinkModel model(spec);
  const CMatrix h = model.transfer(frequency, cascade::Method::Cascade);
  const std::size_t driven = coupler::driven_ports(spec.tx);
  oracle::Triple s{};
  for (std::size_t o = 0; o < 3; ++o)
    for (std::size_t j = 0; j < driven; ++j) s[o] += h(o, j) * spec.tx.excitation[j];
  return s;
}

void require_monotone(std::span<const double> axis) {
  bool up = true, down = true;
  for (std::size_t i = 1; i < axis.size(); ++i) {
    up = up && axis[i] > axis[i - 1];
    down = down && axis[i] < axis[i - 1];
  }
  if (!up && !down) throw InvalidInputError("sweep axis must be strictly monotone");
}

}  // namespace

SweepResult load_mismatch_sweep(const BackToBackSpec& nominal, std::size_t load_index, std::span<const double> values,
                                double frequency) {
  if (load_index > 2) throw InvalidInputError("swept load must be Za, Zb or Zc");
  if (values.empty()) throw InvalidInputError("load sweep needs at least one value");
  require_monotone(values);

  const char name = static_cast<char>('a' + load_index);
  SweepResult r;
  r.axis_name = std::string("Z") + name + "_ohm";
  r.axis.assign(values.begin(), values.end());
  r.description = "load mismatch, " + coupler::configuration_name(nominal) +
                  (is_closed_form_case(nominal) ? " (closed form)" : " (MNA)") + " at " + format_frequency(frequency);
  for (char c : {'a', 'b', 'c'}) r.curves.push_back({std::string("S_") + c, {}});

  const oracle::Triple s0 = received_outputs(nominal, frequency);
  std::vector<oracle::Triple> s(values.size());
  parallel_for(values.size(), [&](std::size_t i) {
    BackToBackSpec spec = nominal;
    spec.rx.params.terminations[load_index] = values[i];
    s[i] = received_outputs(spec, frequency);
  });
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t k = 0; k < 3; ++k) {
      const double ref = std::abs(s0[k]);
      if (ref == 0.0) r.curves[k].values.push_back(std::nullopt);
      else r.curves[k].values.push_back(100.0 * (std::abs(s[i][k]) - ref) / ref);
    }
  }
  return r;
}

LineSweepResult line_impedance_sweep(const BackToBackSpec& base, std::span<const double> line_values,
                                     const FrequencyGrid& grid, double reference_frequency, SweepOptions options) {
  if (line_values.empty()) throw InvalidInputError("line sweep needs at least one impedance");
  LineSweepResult r;
  r.impedances.assign(line_values.begin(), line_values.end());
  r.reference_frequency = reference_frequency;
  const auto f = grid.values();
  for (double z : line_values) {
    BackToBackSpec spec = base;
    spec.line = {Complex{z}, Complex{z}, Complex{z}};
    const cascade::LinkModel model(spec);
    r.family.push_back(frequency_sweep(model, f, options));
    r.family.back().configuration += " Zline=" + format_number(z);
    r.gain_at_reference_db.push_back(rms_gain_db(model.transfer(reference_frequency, options.method)));
  }
  const auto lo = std::min_element(line_values.begin(), line_values.end()) - line_values.begin();
  const auto hi = std::max_element(line_values.begin(), line_values.end()) - line_values.begin();
  r.spread_db = r.gain_at_reference_db[lo] - r.gain_at_reference_db[hi];
  return r;
}

const ComparisonEntry& ComparisonReport::entry(std::string_view name) const {
  for (const auto& e : entries)
    if (e.name == name) return e;
  throw InvalidInputError("no configuration named '" + std::string(name) + "'");
}

std::vector<Topology> default_tx_set() { return {Topology::Star, Topology::Triangle, Topology::T}; }
std::vector<Topology> default_rx_set() { return {Topology::Triangle, Topology::T}; }
std::vector<Topology> all_topologies() { return {Topology::Star, Topology::Triangle, Topology::T}; }

ComparisonReport compare_configurations(std::span<const Topology> tx_set, std::span<const Topology> rx_set,
                                        Complex line, const FrequencyGrid& grid, const CompareOptions& options) {
  if (tx_set.empty() || rx_set.empty()) throw InvalidInputError("comparison needs non-empty TX and RX sets");
  ComparisonReport report;
  report.passband = options.passband;
  report.frequencies = grid.values();

  std::vector<BackToBackSpec> specs;
  for (Topology tx : tx_set)
    for (Topology rx : rx_set) {
      BackToBackSpec s;
      s.tx = {.topology = tx, .role = coupler::Role::Tx, .params = options.tx_params, .mimo = options.mimo,
              .excitation = options.excitation};
      s.rx = {.topology = rx, .role = coupler::Role::Rx, .params = options.rx_params, .mimo = options.mimo};
      s.line = {line, line, line};
      specs.push_back(s);
    }

  report.entries.resize(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto set = frequency_sweep(cascade::LinkModel(specs[i]), report.frequencies, options.sweep);
    auto& e = report.entries[i];
    e.name = coupler::configuration_name(specs[i]);
    e.tx = specs[i].tx.topology;
    e.rx = specs[i].rx.topology;
    e.feasible = !coupler::injects_common_mode(specs[i].tx);
    e.curve_db = gain_curve_db(set);
    e.mean_passband_db = band_mean_db(report.frequencies, e.curve_db, options.passband);
  }

  std::vector<std::size_t> order(report.entries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return report.entries[a].mean_passband_db > report.entries[b].mean_passband_db;
  });
  for (std::size_t i : order) report.ranking.push_back(report.entries[i].name);
  return report;
}

std::vector<std::string> toleranced_components(const circuit::Netlist& netlist) {
  std::vector<std::string> out;
  for (const auto& e : netlist.elements()) {
    const char block = coupler::component_block(circuit::label_of(e));
    if (block != 'B' && block != 'C' && block != 'D' && block != 'E') continue;
    if (const auto* r = std::get_if<circuit::Resistor>(&e); r && r->ohms == 0.0) continue;  // ideal short
    if (std::holds_alternative<circuit::Resistor>(e) || std::holds_alternative<circuit::Capacitor>(e) ||
        std::holds_alternative<circuit::Inductor>(e))
      out.push_back(circuit::label_of(e));
  }
  return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// [0, 1) from the top 53 bits; avoids the implementation-defined
// std::uniform_real_distribution so streams match across standard libraries.
double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::unordered_map<std::string, double> draw_perturbation(const circuit::Netlist& netlist, double tolerance,
                                                          std::uint64_t seed, std::uint64_t trial,
                                                          std::size_t* resampled) {
  if (!(tolerance >= 0.0 && tolerance <= 0.5)) throw InvalidInputError("tolerance must lie in [0, 0.5]");
  std::mt19937_64 rng(splitmix64(seed ^ splitmix64(trial)));
  std::unordered_map<std::string, double> factors;
  for (const auto& label : toleranced_components(netlist)) {
    double f = 0.0;
    // Every R, L, C must stay strictly positive; redraw (and count) otherwise.
    for (;;) {
      f = 1.0 + tolerance * (2.0 * unit_draw(rng) - 1.0);
      if (f > 0.0 && std::isfinite(f)) break;
      if (resampled) ++*resampled;
    }
    factors.emplace(label, f);
  }
  return factors;
}

ToleranceStats tolerance_monte_carlo(const BackToBackSpec& spec, double tolerance, std::size_t trials,
                                     std::uint64_t seed, const FrequencyGrid& grid, Band passband,
                                     SweepOptions options) {
  if (trials < 1) throw InvalidInputError("Monte Carlo needs at least one trial");
  if (!(tolerance >= 0.0 && tolerance <= 0.5)) throw InvalidInputError("tolerance must lie in [0, 0.5]");
  ToleranceStats st;
  st.tolerance = tolerance;
  st.trials = trials;
  st.seed = seed;

  std::vector<double> band_f;
  for (double f : grid.values())
    if (passband.contains(f)) band_f.push_back(f);
  if (band_f.empty()) throw InvalidInputError("no grid frequency falls inside the passband");

  const cascade::LinkModel nominal(spec);
  std::vector<double> nominal_db(band_f.size());
  for (std::size_t i = 0; i < band_f.size(); ++i)
    nominal_db[i] = rms_gain_db(nominal.transfer(band_f[i], options.method));

  // Trials run in parallel; each worker evaluates its trial serially.
  st.per_trial_db.assign(trials, 0.0);
  std::vector<std::size_t> resampled(trials, 0);
  parallel_for(
      trials,
      [&](std::size_t t) {
        const auto factors = draw_perturbation(nominal.netlist(), tolerance, seed, t, &resampled[t]);
        const cascade::LinkModel model = nominal.scaled(factors);
        double worst = 0.0;
        for (std::size_t i = 0; i < band_f.size(); ++i)
          worst = std::max(worst, std::abs(rms_gain_db(model.transfer(band_f[i], options.method)) - nominal_db[i]));
        st.per_trial_db[t] = worst;
      },
      options.threads);

  for (auto n : resampled) st.resampled += n;
  st.max_deviation_db = *std::max_element(st.per_trial_db.begin(), st.per_trial_db.end());
  std::vector<double> sorted = st.per_trial_db;
  std::sort(sorted.begin(), sorted.end());
  // Nearest-rank percentile.
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(trials)));
  st.p95_deviation_db = sorted[std::max<std::size_t>(rank, 1) - 1];
  return st;
}

}  // namespace couplerlab::sweep
