#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "couplerlab/dense.hpp"
#include "couplerlab/netlist.hpp"

namespace couplerlab::coupler {

enum class Topology { Star, Triangle, T };
enum class Role { Tx, Rx };
// Driven transmitter ports x received ports ("x4" adds the common-mode output).
enum class MimoMode { M2x3, M2x4, M3x3, M3x4 };
// Coupler stages between the mains conductors (A) and the modem (E).
enum class BlockKind { Protection, Filter, CommonMode, Uncoupling };

std::string_view to_string(Topology t);
std::string_view to_string(Role r);
std::string_view to_string(MimoMode m);
std::string_view to_string(BlockKind b);
std::optional<Topology> parse_topology(std::string_view s);
std::optional<MimoMode> parse_mimo(std::string_view s);
// One-letter code used in configuration names: S, D (triangle), T.
char topology_code(Topology t);

struct ProtectionParams {
  double resistance = 0.05;
  double inductance = 50e-9;
  bool bypass = false;  // pass-through: zero-ohm link
  bool operator==(const ProtectionParams&) const = default;
};

struct FilterParams {
  double capacitance = 100e-9;
  bool bypass = false;  // pass-through: the capacitor becomes a short
  bool operator==(const FilterParams&) const = default;
};

// Resistive artificial neutral from each conductor into the primary of a
// common-mode transformer; the secondary is terminated in `load` and its
// voltage is the common-mode output.
struct CommonModeParams {
  double inductance = 1e-3;
  double coupling = 0.999;
  double neutral_resistance = 100.0;
  Complex load{50.0, 0.0};
  bool bypass = false;  // pass-through: block omitted
  bool operator==(const CommonModeParams&) const = default;
};

struct UncouplingParams {
  double turns_ratio = 1.0;
  double inductance = 1e-3;
  double coupling = 0.9999;
  bool ideal = false;  // ideal 1:n transformers instead of coupled inductors
  bool operator==(const UncouplingParams&) const = default;
};

struct BlockParams {
  ProtectionParams protection;
  FilterParams filter;
  CommonModeParams common_mode;
  UncouplingParams uncoupling;
  // Signal-side terminations Za, Zb, Zc: source impedances on a transmitter,
  // load impedances on a receiver.
  std::array<Complex, 3> terminations{Complex{50.0}, Complex{50.0}, Complex{50.0}};

  static BlockParams defaults() { return {}; }
  // B -> short, C -> short, D omitted, E ideal 1:1.
  static BlockParams pass_through();
  bool is_pass_through() const;
  bool operator==(const BlockParams&) const = default;
};

struct CouplerSpec {
  Topology topology = Topology::Triangle;
  Role role = Role::Tx;
  BlockParams params;
  MimoMode mimo = MimoMode::M2x4;
  // Transmitter source amplitudes per driven port (volts).
  std::array<Complex, 3> excitation{Complex{1.0}, Complex{}, Complex{}};
  // Transmitter drives the common-mode port too.  Rejected unless
  // `allow_emi_infeasible` is set, because it radiates.
  bool drive_common_mode = false;
  bool allow_emi_infeasible = false;
  bool operator==(const CouplerSpec&) const = default;
};

struct PortMap {
  std::size_t tx_ports = 2;
  std::size_t rx_ports = 3;
  bool rx_common_mode = false;
};

PortMap mimo_port_map(MimoMode mode);
std::size_t driven_ports(const CouplerSpec& spec);
// Transmitter port labels (tx1.., plus txcm) or receiver port labels
// (rx1.., plus rxcm), in matrix order.
std::vector<std::string> signal_ports(const CouplerSpec& spec);
// True when a transmitter drives current that returns through the reference
// (earth) conductor, i.e. a common-mode launch.
bool injects_common_mode(const CouplerSpec& spec);

// Throws InvalidInputError / EmiInfeasibleError for unrealisable requests.
void check_spec(const CouplerSpec& spec);

// One stage as a stand-alone fragment with ports a1..a3 on the mains side
// and e1..e3 on the equipment side (plus "cm" for the common-mode block).
// The uncoupling block is built as three conductor-to-reference
// transformers; topology wiring happens in build_coupler.
struct Fragment {
  circuit::Netlist netlist;
  std::vector<std::string> mains_ports;
  std::vector<std::string> equipment_ports;
};

Fragment build_block(BlockKind kind, const BlockParams& params);

// Complete coupler: blocks B, C, D and the topology-specific E stage with its
// terminations (sources for TX, loads for RX).  Ports L1..L3 sit on the
// mains terminals; the signal ports are named as in signal_ports().
circuit::Netlist build_coupler(const CouplerSpec& spec);

inline CouplerSpec make_coupler_spec(Topology t, Role r) {
  CouplerSpec s;
  s.topology = t;
  s.role = r;
  return s;
}

struct BackToBackSpec {
  CouplerSpec tx = make_coupler_spec(Topology::Triangle, Role::Tx);
  std::array<Complex, 3> line{Complex{50.0}, Complex{50.0}, Complex{50.0}};
  CouplerSpec rx = make_coupler_spec(Topology::T, Role::Rx);
  bool operator==(const BackToBackSpec&) const = default;
};

// Name such as "DT" (triangle transmitter, T receiver).
std::string configuration_name(const BackToBackSpec& spec);

// TX and RX couplers joined by three series line impedances.  Declares the
// TX and RX signal ports only.
circuit::Netlist connect_back_to_back(const BackToBackSpec& spec);

// How inputs and outputs of a back-to-back netlist are addressed.
struct LinkPorts {
  std::vector<std::string> inputs;          // tx1, tx2, ...
  std::vector<std::string> source_labels;   // voltage source element per input
  std::vector<std::string> outputs;         // rx1, rx2, rx3, rxcm
};
LinkPorts link_ports(const BackToBackSpec& spec);

// Pieces for cascade analysis, each a separate netlist:
// source termination -> chain blocks -> load termination.
struct ChainBlock {
  std::string name;
  circuit::Netlist netlist;
  std::vector<std::string> input_ports;
  std::vector<std::string> output_ports;
};

struct LinkFragments {
  circuit::Netlist tx_termination;  // sources inside, ports p1..p3
  std::vector<std::string> tx_ports;
  std::vector<std::string> tx_sources;
  std::vector<ChainBlock> chain;
  circuit::Netlist rx_termination;  // ports p1..p3 plus the output ports
  std::vector<std::string> rx_ports;
  std::vector<std::string> rx_outputs;
  LinkPorts ports;
};
LinkFragments build_link_fragments(const BackToBackSpec& spec);

// Element labels follow "<side>.<block>.<name>" where block is one of
// B, C, D, E (coupler components), T (terminations and sources) or the
// side is "line".  Returns the block letter, or 0 for other labels.
char component_block(std::string_view label);

}  // namespace couplerlab::coupler
