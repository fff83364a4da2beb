#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "couplerlab/coupler.hpp"
#include "couplerlab/link.hpp"
#include "couplerlab/star_star.hpp"

namespace couplerlab::sweep {

using cascade::TransferFunctionSet;
using coupler::BackToBackSpec;

enum class GridScale { Linear, Log };

struct FrequencyGrid {
  double start = 10e3;
  double stop = 300e6;
  std::size_t points = 601;
  GridScale scale = GridScale::Log;

  // Throws InvalidInputError unless 0 < start < stop and points >= 2.
  void validate() const;
  std::vector<double> values() const;
  bool operator==(const FrequencyGrid&) const = default;
};

struct Band {
  double low = 1e6;
  double high = 100e6;
  bool contains(double f) const { return f >= low && f <= high; }
  bool operator==(const Band&) const = default;
};

struct SweepOptions {
  cascade::Method method = cascade::Method::Cascade;
  unsigned threads = 0;  // 0 = hardware concurrency
};

// 20 log10(|H|_F / sqrt(entries)): RMS path gain of a MIMO transfer matrix.
double rms_gain_db(const CMatrix& h);
std::vector<double> gain_curve_db(const TransferFunctionSet& set);
// Mean of the gain curve (dB) over grid points inside the band.
double band_mean_db(std::span<const double> frequencies, std::span<const double> curve_db, Band band);

TransferFunctionSet frequency_sweep(const BackToBackSpec& spec, const FrequencyGrid& grid, SweepOptions options = {});
TransferFunctionSet frequency_sweep(const cascade::LinkModel& model, std::span<const double> frequencies,
                                    SweepOptions options = {});

struct NamedCurve {
  std::string name;
  std::vector<std::optional<double>> values;  // nullopt = undefined at that point
};

struct SweepResult {
  std::string axis_name;
  std::vector<double> axis;
  std::vector<NamedCurve> curves;
  std::string description;
};

// True for a star-star link with pass-through blocks, which the closed-form
// solution describes exactly.
bool is_closed_form_case(const BackToBackSpec& spec);
// Line impedances fold into the source impedances.
oracle::StarStarCase closed_form_case(const BackToBackSpec& spec);

// Percent deviation of |S_a|, |S_b|, |S_c| (receiver ports rx1..rx3) as load
// `load_index` (0 = Za) takes each value; the transmitter is driven with its
// excitation vector.
SweepResult load_mismatch_sweep(const BackToBackSpec& nominal, std::size_t load_index, std::span<const double> values,
                                double frequency = 10e6);

struct LineSweepResult {
  std::vector<double> impedances;
  std::vector<TransferFunctionSet> family;
  double reference_frequency = 10e6;
  std::vector<double> gain_at_reference_db;
  // Gain at the reference frequency for the smallest minus the largest impedance.
  double spread_db = 0.0;
};

LineSweepResult line_impedance_sweep(const BackToBackSpec& base, std::span<const double> line_values,
                                     const FrequencyGrid& grid, double reference_frequency = 10e6,
                                     SweepOptions options = {});

struct ComparisonEntry {
  std::string name;
  coupler::Topology tx;
  coupler::Topology rx;
  bool feasible = true;
  double mean_passband_db = 0.0;
  std::vector<double> curve_db;
};

struct ComparisonReport {
  std::vector<double> frequencies;
  std::vector<ComparisonEntry> entries;
  std::vector<std::string> ranking;  // names, best first
  Band passband;
  const ComparisonEntry& entry(std::string_view name) const;
};

struct CompareOptions {
  coupler::BlockParams tx_params;
  coupler::BlockParams rx_params;
  coupler::MimoMode mimo = coupler::MimoMode::M2x4;
  std::array<Complex, 3> excitation{Complex{1.0}, Complex{}, Complex{}};
  Band passband;
  SweepOptions sweep;
};

std::vector<coupler::Topology> default_tx_set();  // S, D, T
std::vector<coupler::Topology> default_rx_set();  // D, T
std::vector<coupler::Topology> all_topologies();

ComparisonReport compare_configurations(std::span<const coupler::Topology> tx_set,
                                        std::span<const coupler::Topology> rx_set, Complex line,
                                        const FrequencyGrid& grid, const CompareOptions& options = {});

struct ToleranceStats {
  double tolerance = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<double> per_trial_db;  // max |gain change| over the band, per trial
  double max_deviation_db = 0.0;
  double p95_deviation_db = 0.0;
  std::size_t resampled = 0;
};

// Labels of the coupler components a Monte Carlo trial perturbs (R, L, C of
// blocks B-E on both sides; terminations, line, couplings and turns ratios
// stay fixed).
std::vector<std::string> toleranced_components(const circuit::Netlist& netlist);

// Factor per toleranced label for one trial, uniform in [1 - tol, 1 + tol].
std::unordered_map<std::string, double> draw_perturbation(const circuit::Netlist& netlist, double tolerance,
                                                          std::uint64_t seed, std::uint64_t trial,
                                                          std::size_t* resampled = nullptr);

ToleranceStats tolerance_monte_carlo(const BackToBackSpec& spec, double tolerance, std::size_t trials,
                                     std::uint64_t seed, const FrequencyGrid& grid, Band passband = {},
                                     SweepOptions options = {});

}  // namespace couplerlab::sweep
