#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "couplerlab/dense.hpp"
#include "couplerlab/netlist.hpp"

namespace couplerlab::circuit {

struct AssembleOptions {
  // Replace every voltage source with a short (used for port probing).
  bool zero_sources = false;
  // Callers that already validated the same netlist may skip the check.
  bool skip_validation = false;
};

// Modified nodal analysis system A x = b at one frequency.  Unknowns are the
// non-reference node voltages followed by auxiliary branch currents, one per
// voltage source, ideal transformer, inductor and zero-valued R/Z short.
struct MnaSystem {
  double frequency = 0.0;
  CMatrix matrix;
  CVector rhs;
  std::vector<std::string> unknown_labels;
  std::size_t node_unknowns = 0;
  std::unordered_map<std::string, std::size_t> aux_index;

  std::size_t dimension() const { return rhs.size(); }
  // Unknown index of a node voltage; nullopt for the reference node.
  std::optional<std::size_t> node_unknown(NodeId id) const {
    if (id.is_reference()) return std::nullopt;
    return id.index - 1;
  }
};

// Validates first; throws InvalidInputError for a netlist that fails validate().
MnaSystem assemble(const Netlist& netlist, double frequency, AssembleOptions options = {});

struct SolveResult {
  double frequency = 0.0;
  CVector node_voltages;  // indexed by NodeId::index, [0] is the reference (0 V)
  std::vector<std::string> aux_labels;
  CVector aux_currents;

  Complex voltage(NodeId id) const { return node_voltages.at(id.index); }
  Complex voltage_between(NodeId pos, NodeId neg) const { return voltage(pos) - voltage(neg); }
  // Auxiliary current of a source / inductor / transformer / short, flowing
  // from its first terminal through the element.
  Complex aux_current(const std::string& label) const;
};

SolveResult solve(const MnaSystem& system);
SolveResult solve(const Netlist& netlist, double frequency);

// Solves the same matrix against several right-hand sides at once.
std::vector<SolveResult> solve_many(const MnaSystem& system, std::span<const CVector> rhs);

// Current flowing from the first terminal into the element.  For an ideal
// transformer `winding` selects primary (0) or secondary (1).
Complex element_current(const Netlist& netlist, const SolveResult& result, const Element& e, int winding = 0);

// Largest per-node |sum of branch currents| divided by the size of the terms
// summed there: per branch, the larger of |i| and |y| max(|v_a|, |v_b|).
double max_kcl_residual(const Netlist& netlist, const SolveResult& result);

// Open-circuit impedance matrix between the named ports (all ports when the
// list is empty): column j holds the port voltages for 1 A driven into port j
// with all internal sources zeroed.
CMatrix port_probe(const Netlist& netlist, double frequency, std::span<const std::string> ports = {});

}  // namespace couplerlab::circuit
