#include "couplerlab/coupler.hpp"

#include <cctype>

#include "couplerlab/errors.hpp"

namespace couplerlab::coupler {

std::string_view to_string(Topology t) {
  switch (t) {
    case Topology::Star: return "star";
    case Topology::Triangle: return "triangle";
    case Topology::T: return "T";
  }
  return "?";
}

std::string_view to_string(Role r) { return r == Role::Tx ? "tx" : "rx"; }

std::string_view to_string(MimoMode m) {
  switch (m) {
    case MimoMode::M2x3: return "2x3";
    case MimoMode::M2x4: return "2x4";
    case MimoMode::M3x3: return "3x3";
    case MimoMode::M3x4: return "3x4";
  }
  return "?";
}

std::string_view to_string(BlockKind b) {
  switch (b) {
    case BlockKind::Protection: return "B";
    case BlockKind::Filter: return "C";
    case BlockKind::CommonMode: return "D";
    case BlockKind::Uncoupling: return "E";
  }
  return "?";
}

std::optional<Topology> parse_topology(std::string_view s) {
  std::string l(s);
  for (auto& c : l) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (l == "star" || l == "s" || l == "wye" || l == "y") return Topology::Star;
  if (l == "triangle" || l == "delta" || l == "d") return Topology::Triangle;
  if (l == "t") return Topology::T;
  return std::nullopt;
}

std::optional<MimoMode> parse_mimo(std::string_view s) {
  if (s == "2x3") return MimoMode::M2x3;
  if (s == "2x4") return MimoMode::M2x4;
  if (s == "3x3") return MimoMode::M3x3;
  if (s == "3x4") return MimoMode::M3x4;
  return std::nullopt;
}

char topology_code(Topology t) {
  switch (t) {
    case Topology::Star: return 'S';
    case Topology::Triangle: return 'D';
    case Topology::T: return 'T';
  }
  return '?';
}

BlockParams BlockParams::pass_through() {
  BlockParams p;
  p.protection.resistance = 0.0;
  p.protection.bypass = true;
  p.filter.bypass = true;
  p.common_mode.bypass = true;
  p.uncoupling.ideal = true;
  p.uncoupling.turns_ratio = 1.0;
  return p;
}

bool BlockParams::is_pass_through() const {
  return protection.bypass && filter.bypass && common_mode.bypass && uncoupling.ideal && uncoupling.turns_ratio == 1.0;
}

PortMap mimo_port_map(MimoMode mode) {
  switch (mode) {
    case MimoMode::M2x3: return {2, 3, false};
    case MimoMode::M2x4: return {2, 3, true};
    case MimoMode::M3x3: return {3, 3, false};
    case MimoMode::M3x4: return {3, 3, true};
  }
  throw InvalidInputError("unknown MIMO mode");
}

std::size_t driven_ports(const CouplerSpec& spec) { return mimo_port_map(spec.mimo).tx_ports; }

std::vector<std::string> signal_ports(const CouplerSpec& spec) {
  const PortMap map = mimo_port_map(spec.mimo);
  std::vector<std::string> out;
  if (spec.role == Role::Tx) {
    for (std::size_t j = 0; j < map.tx_ports; ++j) out.push_back("tx" + std::to_string(j + 1));
    if (spec.drive_common_mode) out.push_back("txcm");
  } else {
    for (std::size_t j = 0; j < map.rx_ports; ++j) out.push_back("rx" + std::to_string(j + 1));
    if (map.rx_common_mode) out.push_back("rxcm");
  }
  return out;
}

bool injects_common_mode(const CouplerSpec& spec) {
  if (spec.role != Role::Tx) return false;
  if (spec.drive_common_mode) return true;
  if (spec.topology == Topology::Star) return true;
  // The third T port sits between the centre tap and the reference.
  return spec.topology == Topology::T && driven_ports(spec) == 3;
}

void check_spec(const CouplerSpec& spec) {
  const BlockParams& p = spec.params;
  if (spec.role == Role::Tx && spec.topology == Topology::Triangle && driven_ports(spec) > 2)
    throw InvalidInputError("a triangle transmitter has only two independent windings; " +
                            std::string(to_string(spec.mimo)) + " needs three driven ports");
  if (spec.role == Role::Tx && spec.drive_common_mode && !spec.allow_emi_infeasible)
    throw EmiInfeasibleError("driving the common-mode port from the transmitter launches a common-mode "
                             "signal on the mains (EMI-infeasible); set the override to model it anyway");
  const bool needs_cm = (spec.role == Role::Rx && mimo_port_map(spec.mimo).rx_common_mode) ||
                        (spec.role == Role::Tx && spec.drive_common_mode);
  if (needs_cm && p.common_mode.bypass)
    throw InvalidInputError("the common-mode port needs block D, which is bypassed");
  if (!p.protection.bypass && !(p.protection.inductance > 0.0))
    throw InvalidInputError("block B inductance must be positive");
  if (!(p.protection.resistance >= 0.0)) throw InvalidInputError("block B resistance must be >= 0");
  if (!p.filter.bypass && !(p.filter.capacitance > 0.0)) throw InvalidInputError("block C capacitance must be positive");
  if (!p.common_mode.bypass) {
    if (!(p.common_mode.inductance > 0.0)) throw InvalidInputError("block D inductance must be positive");
    if (!(p.common_mode.coupling >= 0.0 && p.common_mode.coupling < 1.0))
      throw InvalidInputError("block D coupling must lie in [0, 1)");
    if (!(p.common_mode.neutral_resistance > 0.0))
      throw InvalidInputError("block D neutral resistance must be positive");
  }
  if (!(p.uncoupling.turns_ratio != 0.0)) throw InvalidInputError("block E turns ratio must be non-zero");
  if (!p.uncoupling.ideal) {
    if (!(p.uncoupling.inductance > 0.0)) throw InvalidInputError("block E inductance must be positive");
    if (!(p.uncoupling.coupling >= 0.0 && p.uncoupling.coupling < 1.0))
      throw InvalidInputError("block E coupling must lie in [0, 1)");
  }
}

namespace {

using Nodes3 = std::array<std::string, 3>;

std::string idx(std::size_t k) { return std::to_string(k + 1); }

Nodes3 nodes(const std::string& pre, const std::string& base) {
  return {pre + base + "1", pre + base + "2", pre + base + "3"};
}

void add_protection(circuit::Netlist& net, const std::string& pre, const Nodes3& mains, const Nodes3& out,
                    const ProtectionParams& p) {
  for (std::size_t k = 0; k < 3; ++k) {
    if (p.bypass) {
      net.add_resistor(pre + "B.R" + idx(k), mains[k], out[k], 0.0);
      continue;
    }
    const std::string mid = pre + "b" + idx(k);
    net.add_resistor(pre + "B.R" + idx(k), mains[k], mid, p.resistance);
    net.add_inductor(pre + "B.L" + idx(k), mid, out[k], p.inductance);
  }
}

void add_filter(circuit::Netlist& net, const std::string& pre, const Nodes3& in, const Nodes3& out,
                const FilterParams& p) {
  for (std::size_t k = 0; k < 3; ++k) {
    if (p.bypass) net.add_resistor(pre + "C.S" + idx(k), in[k], out[k], 0.0);
    else net.add_capacitor(pre + "C.C" + idx(k), in[k], out[k], p.capacitance);
  }
}

enum class CmEnd { Load, Source, Open };

// Returns the common-mode node name ("" when bypassed).
std::string add_common_mode(circuit::Netlist& net, const std::string& pre, const Nodes3& at,
                            const CommonModeParams& p, CmEnd end, Complex source_impedance) {
  if (p.bypass) return {};
  const std::string m = pre + "m";
  const std::string cm = pre + "cm";
  for (std::size_t k = 0; k < 3; ++k) net.add_resistor(pre + "D.R" + idx(k), at[k], m, p.neutral_resistance);
  net.add_inductor(pre + "D.Lp", m, "0", p.inductance);
  net.add_inductor(pre + "D.Ls", cm, "0", p.inductance);
  net.add_coupling(pre + "D.K", pre + "D.Lp", pre + "D.Ls", p.coupling);
  if (end == CmEnd::Load) {
    net.add_impedance(pre + "T.ZCM", cm, "0", p.load);
  } else if (end == CmEnd::Source) {
    net.add_source(pre + "T.ECM", pre + "vcm", "0", Complex{});
    net.add_impedance(pre + "T.ZSCM", pre + "vcm", cm, source_impedance);
  }
  return cm;
}

void add_winding_pair(circuit::Netlist& net, const std::string& base, const std::string& a, const std::string& b,
                      const std::string& sig, const UncouplingParams& p) {
  if (p.ideal) {
    net.add_transformer(base + "X", a, b, sig, "0", p.turns_ratio);
    return;
  }
  net.add_inductor(base + "Lp", a, b, p.inductance);
  net.add_inductor(base + "Ls", sig, "0", p.turns_ratio * p.turns_ratio * p.inductance);
  net.add_coupling(base + "K", base + "Lp", base + "Ls", p.coupling);
}

// Centre-tapped primary a - ct - b against one secondary.
void add_center_tapped(circuit::Netlist& net, const std::string& base, const std::string& a, const std::string& ct,
                       const std::string& b, const std::string& sig, const UncouplingParams& p) {
  if (p.ideal) {
    // Each half sees half the primary voltage: two 1:2n transformers whose
    // secondaries sit in parallel form an ideal centre-tapped 1:n.
    net.add_transformer(base + "Xa", a, ct, sig, "0", 2.0 * p.turns_ratio);
    net.add_transformer(base + "Xb", ct, b, sig, "0", 2.0 * p.turns_ratio);
    return;
  }
  const double n2 = p.turns_ratio * p.turns_ratio;
  net.add_inductor(base + "La", a, ct, p.inductance / 4.0);
  net.add_inductor(base + "Lb", ct, b, p.inductance / 4.0);
  net.add_inductor(base + "Ls", sig, "0", n2 * p.inductance);
  net.add_coupling(base + "Kab", base + "La", base + "Lb", p.coupling);
  net.add_coupling(base + "Kas", base + "La", base + "Ls", p.coupling);
  net.add_coupling(base + "Kbs", base + "Lb", base + "Ls", p.coupling);
}

struct StageOut {
  std::vector<std::string> ports;     // signal port labels
  std::vector<std::string> port_nodes;
  std::vector<std::string> sources;   // TX voltage source labels, per port
};

// Topology windings on the conductor nodes `d`, their signal-side
// terminations and the common-mode block when `with_cm` is set.
StageOut add_equipment_side(circuit::Netlist& net, const std::string& pre, const CouplerSpec& spec, const Nodes3& d,
                            bool with_cm) {
  const BlockParams& p = spec.params;
  const bool tx = spec.role == Role::Tx;
  const std::size_t driven = tx ? driven_ports(spec) : 3;
  StageOut out;

  std::string cm;
  if (with_cm)
    cm = add_common_mode(net, pre, d, p.common_mode, tx && spec.drive_common_mode ? CmEnd::Source : CmEnd::Load,
                         p.terminations[0]);

  std::size_t windings = 3;
  if (tx && spec.topology == Topology::Triangle) windings = 2;
  const std::string star = tx ? std::string("0") : pre + "star";
  const std::string ct = pre + "ct";
  const Nodes3 s = nodes(pre, "s");

  for (std::size_t j = 0; j < windings; ++j) {
    const std::string base = pre + "E.W" + idx(j);
    switch (spec.topology) {
      case Topology::Star:
        add_winding_pair(net, base, d[j], star, s[j], p.uncoupling);
        break;
      case Topology::Triangle:
        add_winding_pair(net, base, d[j], d[(j + 1) % 3], s[j], p.uncoupling);
        break;
      case Topology::T:
        if (j == 0) add_center_tapped(net, base, d[0], ct, d[1], s[j], p.uncoupling);
        else if (j == 1) add_winding_pair(net, base, d[2], ct, s[j], p.uncoupling);
        else add_winding_pair(net, base, ct, "0", s[j], p.uncoupling);
        break;
    }
    if (tx) {
      if (j < driven) {
        const std::string v = pre + "v" + idx(j);
        net.add_source(pre + "T.E" + idx(j), v, "0", spec.excitation[j]);
        net.add_impedance(pre + "T.ZS" + idx(j), v, s[j], p.terminations[j]);
        out.ports.push_back("tx" + idx(j));
        out.port_nodes.push_back(s[j]);
        out.sources.push_back(pre + "T.E" + idx(j));
      } else {
        // Undriven winding stays terminated in its source impedance.
        net.add_impedance(pre + "T.ZS" + idx(j), s[j], "0", p.terminations[j]);
      }
    } else {
      net.add_impedance(pre + "T.ZL" + idx(j), s[j], "0", p.terminations[j]);
      out.ports.push_back("rx" + idx(j));
      out.port_nodes.push_back(s[j]);
    }
  }
  if (tx && spec.drive_common_mode) {
    out.ports.push_back("txcm");
    out.port_nodes.push_back(cm);
    out.sources.push_back(pre + "T.ECM");
  }
  if (!tx && mimo_port_map(spec.mimo).rx_common_mode) {
    out.ports.push_back("rxcm");
    out.port_nodes.push_back(cm);
  }
  return out;
}

std::string side_prefix(Role r) { return r == Role::Tx ? "tx." : "rx."; }

// Whole coupler into `net`; mains terminals are <pre>L1..3.
StageOut add_coupler(circuit::Netlist& net, const CouplerSpec& spec) {
  check_spec(spec);
  const std::string pre = side_prefix(spec.role);
  const Nodes3 mains = nodes(pre, "L");
  const Nodes3 c = nodes(pre, "c");
  const Nodes3 d = nodes(pre, "d");
  add_protection(net, pre, mains, c, spec.params.protection);
  add_filter(net, pre, c, d, spec.params.filter);
  return add_equipment_side(net, pre, spec, d, true);
}

void add_line(circuit::Netlist& net, const std::array<Complex, 3>& line) {
  for (std::size_t k = 0; k < 3; ++k) net.add_impedance("line.Z" + idx(k), "tx.L" + idx(k), "rx.L" + idx(k), line[k]);
}

void add_ports3(circuit::Netlist& net, const std::string& label, const Nodes3& at, std::vector<std::string>& names) {
  for (std::size_t k = 0; k < 3; ++k) {
    net.add_port(label + idx(k), at[k], "0");
    names.push_back(label + idx(k));
  }
}

}  // namespace

Fragment build_block(BlockKind kind, const BlockParams& params) {
  Fragment f;
  const Nodes3 a{"a1", "a2", "a3"};
  const Nodes3 e{"e1", "e2", "e3"};
  auto& net = f.netlist;
  switch (kind) {
    case BlockKind::Protection:
      add_protection(net, "", a, e, params.protection);
      break;
    case BlockKind::Filter:
      add_filter(net, "", a, e, params.filter);
      break;
    case BlockKind::CommonMode: {
      // Shunt block: both port sets share the conductor nodes.
      if (params.common_mode.bypass) throw InvalidInputError("block D is bypassed");
      add_common_mode(net, "", a, params.common_mode, CmEnd::Open, {});
      for (std::size_t k = 0; k < 3; ++k) net.add_port("a" + idx(k), a[k], "0");
      for (std::size_t k = 0; k < 3; ++k) net.add_port("e" + idx(k), a[k], "0");
      net.add_port("cm", "cm", "0");
      f.mains_ports = {"a1", "a2", "a3"};
      f.equipment_ports = {"e1", "e2", "e3"};
      return f;
    }
    case BlockKind::Uncoupling:
      for (std::size_t k = 0; k < 3; ++k) add_winding_pair(net, "E.W" + idx(k), a[k], "0", e[k], params.uncoupling);
      break;
  }
  add_ports3(net, "a", a, f.mains_ports);
  add_ports3(net, "e", e, f.equipment_ports);
  return f;
}

circuit::Netlist build_coupler(const CouplerSpec& spec) {
  circuit::Netlist net;
  const StageOut out = add_coupler(net, spec);
  const std::string pre = side_prefix(spec.role);
  for (std::size_t k = 0; k < 3; ++k) net.add_port("L" + idx(k), pre + "L" + idx(k), "0");
  for (std::size_t j = 0; j < out.ports.size(); ++j) net.add_port(out.ports[j], out.port_nodes[j], "0");
  return net;
}

std::string configuration_name(const BackToBackSpec& spec) {
  return std::string{topology_code(spec.tx.topology), topology_code(spec.rx.topology)};
}

namespace {

void check_link(const BackToBackSpec& spec) {
  if (spec.tx.role != Role::Tx || spec.rx.role != Role::Rx)
    throw InvalidInputError("back-to-back needs a transmitter and a receiver coupler");
  if (spec.tx.mimo != spec.rx.mimo) throw InvalidInputError("transmitter and receiver disagree on the MIMO mode");
}

}  // namespace

circuit::Netlist connect_back_to_back(const BackToBackSpec& spec) {
  check_link(spec);
  circuit::Netlist net;
  const StageOut tx = add_coupler(net, spec.tx);
  const StageOut rx = add_coupler(net, spec.rx);
  add_line(net, spec.line);
  for (std::size_t j = 0; j < tx.ports.size(); ++j) net.add_port(tx.ports[j], tx.port_nodes[j], "0");
  for (std::size_t j = 0; j < rx.ports.size(); ++j) net.add_port(rx.ports[j], rx.port_nodes[j], "0");
  return net;
}

LinkPorts link_ports(const BackToBackSpec& spec) {
  check_link(spec);
  check_spec(spec.tx);
  check_spec(spec.rx);
  LinkPorts lp;
  lp.inputs = signal_ports(spec.tx);
  for (std::size_t j = 0; j < driven_ports(spec.tx); ++j) lp.source_labels.push_back("tx.T.E" + idx(j));
  if (spec.tx.drive_common_mode) lp.source_labels.push_back("tx.T.ECM");
  lp.outputs = signal_ports(spec.rx);
  return lp;
}

LinkFragments build_link_fragments(const BackToBackSpec& spec) {
  LinkFragments lf;
  lf.ports = link_ports(spec);

  const Nodes3 txd = nodes("tx.", "d");
  const Nodes3 txc = nodes("tx.", "c");
  const Nodes3 txl = nodes("tx.", "L");
  const Nodes3 rxl = nodes("rx.", "L");
  const Nodes3 rxc = nodes("rx.", "c");
  const Nodes3 rxd = nodes("rx.", "d");

  // The transmitter's D block only joins the chain when it is a passive
  // shunt; a driven common-mode port keeps it inside the source termination.
  const bool tx_cm_in_chain = !spec.tx.params.common_mode.bypass && !spec.tx.drive_common_mode;

  {
    auto& net = lf.tx_termination;
    const StageOut s = add_equipment_side(net, "tx.", spec.tx, txd, !tx_cm_in_chain);
    add_ports3(net, "p", txd, lf.tx_ports);
    lf.tx_sources = s.sources;
  }

  auto chain_block = [&](std::string name, const Nodes3& in, const Nodes3& out, auto&& add) {
    ChainBlock b;
    b.name = std::move(name);
    add(b.netlist);
    add_ports3(b.netlist, "in", in, b.input_ports);
    add_ports3(b.netlist, "out", out, b.output_ports);
    lf.chain.push_back(std::move(b));
  };

  if (tx_cm_in_chain)
    chain_block("tx.D", txd, txd, [&](circuit::Netlist& n) {
      add_common_mode(n, "tx.", txd, spec.tx.params.common_mode, CmEnd::Load, {});
    });
  chain_block("tx.C", txd, txc, [&](circuit::Netlist& n) { add_filter(n, "tx.", txc, txd, spec.tx.params.filter); });
  chain_block("tx.B", txc, txl,
              [&](circuit::Netlist& n) { add_protection(n, "tx.", txl, txc, spec.tx.params.protection); });
  chain_block("line", txl, rxl, [&](circuit::Netlist& n) { add_line(n, spec.line); });
  chain_block("rx.B", rxl, rxc,
              [&](circuit::Netlist& n) { add_protection(n, "rx.", rxl, rxc, spec.rx.params.protection); });
  chain_block("rx.C", rxc, rxd, [&](circuit::Netlist& n) { add_filter(n, "rx.", rxc, rxd, spec.rx.params.filter); });

  {
    auto& net = lf.rx_termination;
    const StageOut s = add_equipment_side(net, "rx.", spec.rx, rxd, true);
    add_ports3(net, "p", rxd, lf.rx_ports);
    for (std::size_t j = 0; j < s.ports.size(); ++j) net.add_port(s.ports[j], s.port_nodes[j], "0");
    lf.rx_outputs = s.ports;
  }
  return lf;
}

char component_block(std::string_view label) {
  const auto dot = label.find('.');
  if (dot == std::string_view::npos || dot + 2 >= label.size() || label[dot + 2] != '.') return 0;
  const std::string_view side = label.substr(0, dot);
  if (side != "tx" && side != "rx") return 0;
  return label[dot + 1];
}

}  // namespace couplerlab::coupler
