#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "couplerlab/dense.hpp"

namespace couplerlab::circuit {

// Index into a netlist's node table; index 0 is the reference node.
struct NodeId {
  std::size_t index = 0;
  bool is_reference() const { return index == 0; }
  auto operator<=>(const NodeId&) const = default;
};

inline constexpr NodeId kReference{0};

struct Resistor {
  std::string label;
  NodeId a, b;
  double ohms = 0.0;  // 0 is a short, stamped through an auxiliary current
  bool operator==(const Resistor&) const = default;
};

struct Capacitor {
  std::string label;
  NodeId a, b;
  double farads = 0.0;
  bool operator==(const Capacitor&) const = default;
};

// Every inductor carries an auxiliary branch current, so it is a short at DC
// and mutual coupling can be written on its branch row.
struct Inductor {
  std::string label;
  NodeId a, b;
  double henries = 0.0;
  bool operator==(const Inductor&) const = default;
};

// Fixed complex impedance (line sections, terminations).  Zero is a short.
struct Impedance {
  std::string label;
  NodeId a, b;
  Complex ohms;
  bool operator==(const Impedance&) const = default;
};

// Pairwise coupling between two inductors, M = k sqrt(L1 L2).
struct MutualCoupling {
  std::string label;
  std::string first, second;
  double k = 0.0;
  bool operator==(const MutualCoupling&) const = default;
};

// Ideal 1:n transformer: v_s = n v_p, i_p = -n i_s (currents into the +
// terminals of each winding).
struct IdealTransformer {
  std::string label;
  NodeId p_pos, p_neg, s_pos, s_neg;
  double ratio = 1.0;
  bool operator==(const IdealTransformer&) const = default;
};

struct VoltageSource {
  std::string label;
  NodeId pos, neg;
  Complex volts;
  bool operator==(const VoltageSource&) const = default;
};

using Element = std::variant<Resistor, Capacitor, Inductor, Impedance, MutualCoupling, IdealTransformer, VoltageSource>;

const std::string& label_of(const Element& e);
char kind_letter(const Element& e);

// Declarative port: stamps nothing during an ordinary solve.  Current is
// counted positive when it enters the network at `pos`.
struct Port {
  std::string label;
  NodeId pos, neg;
  Complex z_ref{50.0, 0.0};
  bool operator==(const Port&) const = default;
};

class Netlist {
 public:
  Netlist();

  // Returns the node with that name, creating it if needed.  "0" and "gnd"
  // name the reference node.
  NodeId node(std::string_view name);
  std::optional<NodeId> find_node(std::string_view name) const;
  const std::string& node_name(NodeId id) const;
  // Includes the reference node.
  std::size_t node_count() const { return node_names_.size(); }

  void add(Element e);
  void add_port(Port p);

  // Convenience builders using node names.
  void add_resistor(std::string label, std::string_view a, std::string_view b, double ohms);
  void add_capacitor(std::string label, std::string_view a, std::string_view b, double farads);
  void add_inductor(std::string label, std::string_view a, std::string_view b, double henries);
  void add_impedance(std::string label, std::string_view a, std::string_view b, Complex ohms);
  void add_coupling(std::string label, std::string first, std::string second, double k);
  void add_transformer(std::string label, std::string_view p_pos, std::string_view p_neg, std::string_view s_pos,
                       std::string_view s_neg, double ratio);
  void add_source(std::string label, std::string_view pos, std::string_view neg, Complex volts);
  void add_port(std::string label, std::string_view pos, std::string_view neg, Complex z_ref = 50.0);

  const std::vector<Element>& elements() const { return elements_; }
  std::vector<Element>& mutable_elements() { return elements_; }
  const std::vector<Port>& ports() const { return ports_; }

  const Element* find_element(std::string_view label) const;
  const Port* find_port(std::string_view label) const;
  const Port& port(std::string_view label) const;  // throws if absent

  // Sets the amplitude of a named voltage source.
  void set_source(std::string_view label, Complex volts);
  std::vector<std::string> source_labels() const;

  // Structural equality: same node names, elements and ports in order.
  bool operator==(const Netlist& other) const;

 private:
  std::vector<std::string> node_names_;
  std::unordered_map<std::string, std::size_t> node_index_;
  std::vector<Element> elements_;
  std::vector<Port> ports_;
};

enum class ViolationCode {
  DuplicateLabel,
  NonPositiveValue,
  NegativeResistance,
  InvalidCoupling,
  UnknownInductor,
  ZeroTurnsRatio,
  SelfLoop,
  UnknownNode,
  InvalidPortImpedance,
  DuplicatePort,
  UnreachableNode,
};

struct Violation {
  ViolationCode code;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  bool has(ViolationCode code) const;
  std::string summary() const;
};

ValidationReport validate(const Netlist& netlist);

// Copy with the values of the named resistors, capacitors and inductors
// multiplied by the given factors; other labels are ignored.
Netlist scale_components(const Netlist& netlist, const std::unordered_map<std::string, double>& factors);
// Throws InvalidInputError with the summary when validation fails.
void require_valid(const Netlist& netlist);

}  // namespace couplerlab::circuit
