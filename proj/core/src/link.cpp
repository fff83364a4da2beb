#include "couplerlab/link.hpp"

#include <algorithm>

#include "couplerlab/errors.hpp"

namespace couplerlab::cascade {

std::size_t TransferFunctionSet::fallback_count() const {
  return static_cast<std::size_t>(std::count(fallback.begin(), fallback.end(), true));
}

LinkModel::LinkModel(coupler::BackToBackSpec spec)
    : spec_(std::move(spec)),
      netlist_(coupler::connect_back_to_back(spec_)),
      ports_(coupler::link_ports(spec_)),
      fragments_(coupler::build_link_fragments(spec_)) {
  circuit::require_valid(netlist_);
}

LinkModel LinkModel::scaled(const std::unordered_map<std::string, double>& factors) const {
  LinkModel m = *this;
  m.netlist_ = circuit::scale_components(netlist_, factors);
  auto& fr = m.fragments_;
  fr.tx_termination = circuit::scale_components(fr.tx_termination, factors);
  fr.rx_termination = circuit::scale_components(fr.rx_termination, factors);
  for (auto& b : fr.chain) b.netlist = circuit::scale_components(b.netlist, factors);
  circuit::require_valid(m.netlist_);
  return m;
}

CMatrix LinkModel::monolithic(double frequency) const {
  return monolithic_transfer(netlist_, frequency, ports_.source_labels, ports_.outputs);
}

CMatrix LinkModel::cascaded(double frequency) const {
  const auto& fr = fragments_;
  std::vector<MultiportTMatrix> blocks;
  blocks.reserve(fr.chain.size());
  for (const auto& b : fr.chain) blocks.push_back(block_to_tmatrix(b.netlist, frequency, b.input_ports, b.output_ports));
  const MultiportTMatrix t = cascade(blocks);
  const auto src = SourceTermination::characterize(fr.tx_termination, frequency, fr.tx_ports, fr.tx_sources);
  const auto load = LoadTermination::characterize(fr.rx_termination, frequency, fr.rx_ports, fr.rx_outputs);
  return tmatrix_to_transfer(t, src, load);
}

CMatrix LinkModel::transfer(double frequency, Method method, bool* used_fallback) const {
  if (used_fallback) *used_fallback = false;
  if (method == Method::Monolithic) return monolithic(frequency);
  try {
    return cascaded(frequency);
  } catch (const SingularSystemError&) {
    if (used_fallback) *used_fallback = true;
    return monolithic(frequency);
  }
}

}  // namespace couplerlab::cascade
