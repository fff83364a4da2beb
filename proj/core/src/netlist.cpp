#include "couplerlab/netlist.hpp"

#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

#include "couplerlab/errors.hpp"

namespace couplerlab::circuit {

const std::string& label_of(const Element& e) {
  return std::visit([](const auto& x) -> const std::string& { return x.label; }, e);
}

char kind_letter(const Element& e) {
  struct Visitor {
    char operator()(const Resistor&) const { return 'R'; }
    char operator()(const Capacitor&) const { return 'C'; }
    char operator()(const Inductor&) const { return 'L'; }
    char operator()(const Impedance&) const { return 'Z'; }
    char operator()(const MutualCoupling&) const { return 'K'; }
    char operator()(const IdealTransformer&) const { return 'X'; }
    char operator()(const VoltageSource&) const { return 'V'; }
  };
  return std::visit(Visitor{}, e);
}

Netlist::Netlist() {
  node_names_.push_back("0");
  node_index_.emplace("0", 0);
}

NodeId Netlist::node(std::string_view name) {
  if (name == "0" || name == "gnd" || name == "GND") return kReference;
  if (name.empty()) throw InvalidInputError("empty node name");
  auto it = node_index_.find(std::string(name));
  if (it != node_index_.end()) return NodeId{it->second};
  const std::size_t idx = node_names_.size();
  node_names_.emplace_back(name);
  node_index_.emplace(std::string(name), idx);
  return NodeId{idx};
}

std::optional<NodeId> Netlist::find_node(std::string_view name) const {
  if (name == "0" || name == "gnd" || name == "GND") return kReference;
  auto it = node_index_.find(std::string(name));
  if (it == node_index_.end()) return std::nullopt;
  return NodeId{it->second};
}

const std::string& Netlist::node_name(NodeId id) const {
  if (id.index >= node_names_.size()) throw InvalidInputError("node id out of range");
  return node_names_[id.index];
}

void Netlist::add(Element e) { elements_.push_back(std::move(e)); }
void Netlist::add_port(Port p) { ports_.push_back(std::move(p)); }

void Netlist::add_resistor(std::string label, std::string_view a, std::string_view b, double ohms) {
  add(Resistor{std::move(label), node(a), node(b), ohms});
}
void Netlist::add_capacitor(std::string label, std::string_view a, std::string_view b, double farads) {
  add(Capacitor{std::move(label), node(a), node(b), farads});
}
void Netlist::add_inductor(std::string label, std::string_view a, std::string_view b, double henries) {
  add(Inductor{std::move(label), node(a), node(b), henries});
}
void Netlist::add_impedance(std::string label, std::string_view a, std::string_view b, Complex ohms) {
  add(Impedance{std::move(label), node(a), node(b), ohms});
}
void Netlist::add_coupling(std::string label, std::string first, std::string second, double k) {
  add(MutualCoupling{std::move(label), std::move(first), std::move(second), k});
}
void Netlist::add_transformer(std::string label, std::string_view p_pos, std::string_view p_neg,
                              std::string_view s_pos, std::string_view s_neg, double ratio) {
  add(IdealTransformer{std::move(label), node(p_pos), node(p_neg), node(s_pos), node(s_neg), ratio});
}
void Netlist::add_source(std::string label, std::string_view pos, std::string_view neg, Complex volts) {
  add(VoltageSource{std::move(label), node(pos), node(neg), volts});
}
void Netlist::add_port(std::string label, std::string_view pos, std::string_view neg, Complex z_ref) {
  add_port(Port{std::move(label), node(pos), node(neg), z_ref});
}

const Element* Netlist::find_element(std::string_view label) const {
  for (const auto& e : elements_)
    if (label_of(e) == label) return &e;
  return nullptr;
}

const Port* Netlist::find_port(std::string_view label) const {
  for (const auto& p : ports_)
    if (p.label == label) return &p;
  return nullptr;
}

const Port& Netlist::port(std::string_view label) const {
  const Port* p = find_port(label);
  if (!p) throw InvalidInputError("unknown port '" + std::string(label) + "'");
  return *p;
}

void Netlist::set_source(std::string_view label, Complex volts) {
  for (auto& e : elements_) {
    if (auto* v = std::get_if<VoltageSource>(&e); v && v->label == label) {
      v->volts = volts;
      return;
    }
  }
  throw InvalidInputError("unknown voltage source '" + std::string(label) + "'");
}

std::vector<std::string> Netlist::source_labels() const {
  std::vector<std::string> out;
  for (const auto& e : elements_)
    if (const auto* v = std::get_if<VoltageSource>(&e)) out.push_back(v->label);
  return out;
}

bool Netlist::operator==(const Netlist& other) const {
  return node_names_ == other.node_names_ && elements_ == other.elements_ && ports_ == other.ports_;
}

bool ValidationReport::has(ViolationCode code) const {
  for (const auto& v : violations)
    if (v.code == code) return true;
  return false;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  os << "invalid netlist (" << violations.size() << " violation" << (violations.size() == 1 ? "" : "s") << ")";
  for (const auto& v : violations) os << "\n  - " << v.message;
  return os.str();
}

namespace {

// Minimal union-find for connectivity.
struct DisjointSet {
  std::vector<std::size_t> parent;
  explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void join(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

}  // namespace

ValidationReport validate(const Netlist& netlist) {
  ValidationReport report;
  auto add = [&](ViolationCode code, std::string msg) { report.violations.push_back({code, std::move(msg)}); };

  const std::size_t n = netlist.node_count();
  DisjointSet ds(n);
  std::set<std::string> labels;
  std::set<std::string> inductors;
  for (const auto& e : netlist.elements())
    if (const auto* l = std::get_if<Inductor>(&e)) inductors.insert(l->label);

  auto check_node = [&](const std::string& label, NodeId id) {
    if (id.index >= n) {
      add(ViolationCode::UnknownNode, "element '" + label + "' references an unknown node");
      return false;
    }
    return true;
  };
  auto two_terminal = [&](const std::string& label, NodeId a, NodeId b) {
    if (!check_node(label, a) || !check_node(label, b)) return;
    if (a == b) add(ViolationCode::SelfLoop, "element '" + label + "' has both terminals on node '" +
                                                 netlist.node_name(a) + "'");
    ds.join(a.index, b.index);
  };

  for (const auto& e : netlist.elements()) {
    const std::string& label = label_of(e);
    if (label.empty()) add(ViolationCode::DuplicateLabel, "element with empty label");
    if (!labels.insert(label).second) add(ViolationCode::DuplicateLabel, "duplicate label '" + label + "'");

    if (const auto* r = std::get_if<Resistor>(&e)) {
      if (!(r->ohms >= 0.0) || !std::isfinite(r->ohms))
        add(ViolationCode::NegativeResistance, "negative or non-finite resistance on '" + label + "'");
      two_terminal(label, r->a, r->b);
    } else if (const auto* c = std::get_if<Capacitor>(&e)) {
      if (!(c->farads > 0.0) || !std::isfinite(c->farads))
        add(ViolationCode::NonPositiveValue, "non-positive capacitance on '" + label + "'");
      two_terminal(label, c->a, c->b);
    } else if (const auto* l = std::get_if<Inductor>(&e)) {
      if (!(l->henries > 0.0) || !std::isfinite(l->henries))
        add(ViolationCode::NonPositiveValue, "non-positive inductance on '" + label + "'");
      two_terminal(label, l->a, l->b);
    } else if (const auto* z = std::get_if<Impedance>(&e)) {
      if (!std::isfinite(z->ohms.real()) || !std::isfinite(z->ohms.imag()) || z->ohms.real() < 0.0)
        add(ViolationCode::NegativeResistance, "impedance with negative or non-finite real part on '" + label + "'");
      two_terminal(label, z->a, z->b);
    } else if (const auto* k = std::get_if<MutualCoupling>(&e)) {
      if (!(k->k >= 0.0 && k->k < 1.0))
        add(ViolationCode::InvalidCoupling, "coupling '" + label + "' outside [0, 1)");
      if (!inductors.count(k->first) || !inductors.count(k->second))
        add(ViolationCode::UnknownInductor, "coupling '" + label + "' references an unknown inductor");
      else if (k->first == k->second)
        add(ViolationCode::InvalidCoupling, "coupling '" + label + "' couples an inductor to itself");
    } else if (const auto* x = std::get_if<IdealTransformer>(&e)) {
      if (!(x->ratio != 0.0) || !std::isfinite(x->ratio))
        add(ViolationCode::ZeroTurnsRatio, "zero or non-finite turns ratio on '" + label + "'");
      two_terminal(label, x->p_pos, x->p_neg);
      two_terminal(label, x->s_pos, x->s_neg);
    } else if (const auto* v = std::get_if<VoltageSource>(&e)) {
      two_terminal(label, v->pos, v->neg);
    }
  }

  std::set<std::string> port_labels;
  for (const auto& p : netlist.ports()) {
    if (!port_labels.insert(p.label).second) add(ViolationCode::DuplicatePort, "duplicate port '" + p.label + "'");
    if (!(p.z_ref.real() > 0.0))
      add(ViolationCode::InvalidPortImpedance, "port '" + p.label + "' reference impedance needs a positive real part");
    if (p.pos.index >= n || p.neg.index >= n) add(ViolationCode::UnknownNode, "port '" + p.label + "' references an unknown node");
    else if (p.pos == p.neg) add(ViolationCode::SelfLoop, "port '" + p.label + "' has both terminals on one node");
    else ds.join(p.pos.index, p.neg.index);  // a port is an external connection point
  }

  const std::size_t ground = ds.find(0);
  for (std::size_t i = 1; i < n; ++i)
    if (ds.find(i) != ground)
      add(ViolationCode::UnreachableNode, "unreachable node '" + netlist.node_name(NodeId{i}) +
                                              "' has no path to the reference node");
  return report;
}

Netlist scale_components(const Netlist& netlist, const std::unordered_map<std::string, double>& factors) {
  Netlist out = netlist;
  for (auto& e : out.mutable_elements()) {
    auto it = factors.find(label_of(e));
    if (it == factors.end()) continue;
    if (auto* r = std::get_if<Resistor>(&e)) r->ohms *= it->second;
    else if (auto* c = std::get_if<Capacitor>(&e)) c->farads *= it->second;
    else if (auto* l = std::get_if<Inductor>(&e)) l->henries *= it->second;
  }
  return out;
}

void require_valid(const Netlist& netlist) {
  auto report = validate(netlist);
  if (!report.ok()) throw InvalidInputError(report.summary());
}

}  // namespace couplerlab::circuit
