#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "couplerlab/cascade.hpp"
#include "couplerlab/coupler.hpp"
#include "couplerlab/dense.hpp"

namespace couplerlab::cascade {

enum class Method { Cascade, Monolithic };

// Transfer matrices H(f) (outputs x inputs) over a frequency list.
struct TransferFunctionSet {
  std::string configuration;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<double> frequencies;
  std::vector<CMatrix> responses;
  // Frequencies at which the cascade path hit a singular step and the
  // monolithic solve was used instead.
  std::vector<bool> fallback;

  std::size_t fallback_count() const;
};

// Back-to-back link prepared once (netlists built and validated) and then
// evaluated at any frequency.  Evaluation is const and thread-safe.
class LinkModel {
 public:
  explicit LinkModel(coupler::BackToBackSpec spec);

  // Same link with component values scaled by label (see
  // circuit::scale_components); applies to the monolithic netlist and to
  // every cascade fragment alike.
  LinkModel scaled(const std::unordered_map<std::string, double>& factors) const;

  const coupler::BackToBackSpec& spec() const { return spec_; }
  const circuit::Netlist& netlist() const { return netlist_; }
  const coupler::LinkPorts& ports() const { return ports_; }
  const coupler::LinkFragments& fragments() const { return fragments_; }

  CMatrix monolithic(double frequency) const;
  // Throws SingularSystemError when a chain step is singular.
  CMatrix cascaded(double frequency) const;
  // Cascade with monolithic fallback; reports whether the fallback was taken.
  CMatrix transfer(double frequency, Method method, bool* used_fallback = nullptr) const;

 private:
  coupler::BackToBackSpec spec_;
  circuit::Netlist netlist_;
  coupler::LinkPorts ports_;
  coupler::LinkFragments fragments_;
};

}  // namespace couplerlab::cascade
