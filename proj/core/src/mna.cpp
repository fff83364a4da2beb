#include "couplerlab/mna.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "couplerlab/errors.hpp"

namespace couplerlab::circuit {

namespace {

bool needs_aux(const Element& e) {
  if (const auto* r = std::get_if<Resistor>(&e)) return r->ohms == 0.0;
  if (const auto* z = std::get_if<Impedance>(&e)) return z->ohms == Complex{};
  return std::holds_alternative<Inductor>(e) || std::holds_alternative<VoltageSource>(e) ||
         std::holds_alternative<IdealTransformer>(e);
}

class Stamper {
 public:
  explicit Stamper(MnaSystem& s) : s_(s) {}

  void add(std::optional<std::size_t> r, std::optional<std::size_t> c, Complex v) {
    if (r && c) s_.matrix(*r, *c) += v;
  }
  void admittance(NodeId a, NodeId b, Complex y) {
    auto ia = s_.node_unknown(a);
    auto ib = s_.node_unknown(b);
    add(ia, ia, y);
    add(ib, ib, y);
    add(ia, ib, -y);
    add(ib, ia, -y);
  }
  // Branch current k leaves node a and enters node b; the branch row reads
  // v_a - v_b (+ whatever the caller adds).
  void branch(NodeId a, NodeId b, std::size_t k) {
    auto ia = s_.node_unknown(a);
    auto ib = s_.node_unknown(b);
    add(ia, k, 1.0);
    add(ib, k, -1.0);
    add(k, ia, 1.0);
    add(k, ib, -1.0);
  }

 private:
  MnaSystem& s_;
};

}  // namespace

MnaSystem assemble(const Netlist& netlist, double frequency, AssembleOptions options) {
  if (!options.skip_validation) require_valid(netlist);
  if (!(frequency >= 0.0) || !std::isfinite(frequency)) throw InvalidInputError("frequency must be finite and >= 0");

  MnaSystem s;
  s.frequency = frequency;
  s.node_unknowns = netlist.node_count() - 1;
  for (std::size_t i = 1; i < netlist.node_count(); ++i)
    s.unknown_labels.push_back("V(" + netlist.node_name(NodeId{i}) + ")");
  std::size_t next = s.node_unknowns;
  for (const auto& e : netlist.elements()) {
    if (!needs_aux(e)) continue;
    s.aux_index.emplace(label_of(e), next++);
    s.unknown_labels.push_back("I(" + label_of(e) + ")");
  }
  s.matrix = CMatrix(next, next);
  s.rhs.assign(next, Complex{});

  const Complex jw(0.0, 2.0 * std::numbers::pi * frequency);
  Stamper st(s);

  for (const auto& e : netlist.elements()) {
    if (const auto* r = std::get_if<Resistor>(&e)) {
      if (r->ohms == 0.0) st.branch(r->a, r->b, s.aux_index.at(r->label));
      else st.admittance(r->a, r->b, 1.0 / r->ohms);
    } else if (const auto* z = std::get_if<Impedance>(&e)) {
      if (z->ohms == Complex{}) st.branch(z->a, z->b, s.aux_index.at(z->label));
      else st.admittance(z->a, z->b, 1.0 / z->ohms);
    } else if (const auto* c = std::get_if<Capacitor>(&e)) {
      st.admittance(c->a, c->b, jw * c->farads);
    } else if (const auto* l = std::get_if<Inductor>(&e)) {
      const std::size_t k = s.aux_index.at(l->label);
      st.branch(l->a, l->b, k);
      s.matrix(k, k) -= jw * l->henries;
    } else if (const auto* v = std::get_if<VoltageSource>(&e)) {
      const std::size_t k = s.aux_index.at(v->label);
      st.branch(v->pos, v->neg, k);
      s.rhs[k] = options.zero_sources ? Complex{} : v->volts;
    } else if (const auto* x = std::get_if<IdealTransformer>(&e)) {
      // Aux current i_p enters p_pos; i_s = -i_p / n enters s_pos.  The
      // constraint row v_p - v_s / n = 0 keeps the matrix symmetric.
      const std::size_t k = s.aux_index.at(x->label);
      st.branch(x->p_pos, x->p_neg, k);
      const double inv_n = 1.0 / x->ratio;
      auto sp = s.node_unknown(x->s_pos);
      auto sn = s.node_unknown(x->s_neg);
      st.add(sp, k, -inv_n);
      st.add(sn, k, inv_n);
      st.add(k, sp, -inv_n);
      st.add(k, sn, inv_n);
    }
  }
  // Couplings last: they refer to inductor branch rows.
  for (const auto& e : netlist.elements()) {
    const auto* m = std::get_if<MutualCoupling>(&e);
    if (!m) continue;
    const auto* l1 = std::get_if<Inductor>(netlist.find_element(m->first));
    const auto* l2 = std::get_if<Inductor>(netlist.find_element(m->second));
    if (!l1 || !l2) throw InvalidInputError("coupling '" + m->label + "' references an unknown inductor");
    const Complex zm = jw * (m->k * std::sqrt(l1->henries * l2->henries));
    const std::size_t k1 = s.aux_index.at(l1->label);
    const std::size_t k2 = s.aux_index.at(l2->label);
    s.matrix(k1, k2) -= zm;
    s.matrix(k2, k1) -= zm;
  }
  return s;
}

Complex SolveResult::aux_current(const std::string& label) const {
  for (std::size_t i = 0; i < aux_labels.size(); ++i)
    if (aux_labels[i] == label) return aux_currents[i];
  throw InvalidInputError("no auxiliary current for '" + label + "'");
}

namespace {

SolveResult unpack(const MnaSystem& system, const CVector& x) {
  SolveResult r;
  r.frequency = system.frequency;
  r.node_voltages.assign(system.node_unknowns + 1, Complex{});
  for (std::size_t i = 0; i < system.node_unknowns; ++i) r.node_voltages[i + 1] = x[i];
  r.aux_labels.resize(system.dimension() - system.node_unknowns);
  r.aux_currents.resize(r.aux_labels.size());
  for (const auto& [label, idx] : system.aux_index) {
    r.aux_labels[idx - system.node_unknowns] = label;
    r.aux_currents[idx - system.node_unknowns] = x[idx];
  }
  return r;
}

std::string solve_context(const MnaSystem& system) {
  return "MNA solve at " + std::to_string(system.frequency) + " Hz";
}

}  // namespace

SolveResult solve(const MnaSystem& system) {
  LuDecomposition lu(system.matrix, system.unknown_labels, solve_context(system));
  return unpack(system, lu.solve(system.rhs));
}

SolveResult solve(const Netlist& netlist, double frequency) { return solve(assemble(netlist, frequency)); }

std::vector<SolveResult> solve_many(const MnaSystem& system, std::span<const CVector> rhs) {
  LuDecomposition lu(system.matrix, system.unknown_labels, solve_context(system));
  std::vector<SolveResult> out;
  out.reserve(rhs.size());
  for (const auto& b : rhs) out.push_back(unpack(system, lu.solve(b)));
  return out;
}

Complex element_current(const Netlist& netlist, const SolveResult& result, const Element& e, int winding) {
  (void)netlist;
  const Complex jw(0.0, 2.0 * std::numbers::pi * result.frequency);
  if (const auto* r = std::get_if<Resistor>(&e)) {
    if (r->ohms == 0.0) return result.aux_current(r->label);
    return result.voltage_between(r->a, r->b) / r->ohms;
  }
  if (const auto* z = std::get_if<Impedance>(&e)) {
    if (z->ohms == Complex{}) return result.aux_current(z->label);
    return result.voltage_between(z->a, z->b) / z->ohms;
  }
  if (const auto* c = std::get_if<Capacitor>(&e)) return jw * c->farads * result.voltage_between(c->a, c->b);
  if (const auto* x = std::get_if<IdealTransformer>(&e)) {
    const Complex ip = result.aux_current(x->label);
    return winding == 0 ? ip : -ip / x->ratio;
  }
  if (std::holds_alternative<MutualCoupling>(e)) return Complex{};
  return result.aux_current(label_of(e));
}

double max_kcl_residual(const Netlist& netlist, const SolveResult& result) {
  const std::size_t n = netlist.node_count();
  CVector sum(n);
  std::vector<double> scale(n, 0.0);
  // The scale at a node is the size of the terms being summed there.  For a
  // two-terminal branch that is |y| max(|v_a|, |v_b|): when both terminals
  // sit at nearly the same potential the branch current itself is only the
  // rounding residue of v_a - v_b and would make a meaningless denominator.
  auto leave = [&](NodeId a, NodeId b, Complex i, double term = 0.0) {
    sum[a.index] += i;
    sum[b.index] -= i;
    const double s = std::max(std::abs(i), term);
    scale[a.index] = std::max(scale[a.index], s);
    scale[b.index] = std::max(scale[b.index], s);
  };
  auto term = [&](NodeId a, NodeId b, double admittance) {
    return admittance * std::max(std::abs(result.voltage(a)), std::abs(result.voltage(b)));
  };
  const double w = 2.0 * std::numbers::pi * result.frequency;
  for (const auto& e : netlist.elements()) {
    if (const auto* r = std::get_if<Resistor>(&e)) {
      leave(r->a, r->b, element_current(netlist, result, e), r->ohms > 0.0 ? term(r->a, r->b, 1.0 / r->ohms) : 0.0);
    } else if (const auto* z = std::get_if<Impedance>(&e)) {
      const double m = std::abs(z->ohms);
      leave(z->a, z->b, element_current(netlist, result, e), m > 0.0 ? term(z->a, z->b, 1.0 / m) : 0.0);
    } else if (const auto* c = std::get_if<Capacitor>(&e)) {
      leave(c->a, c->b, element_current(netlist, result, e), term(c->a, c->b, w * c->farads));
    } else if (const auto* l = std::get_if<Inductor>(&e)) {
      leave(l->a, l->b, element_current(netlist, result, e), w > 0.0 ? term(l->a, l->b, 1.0 / (w * l->henries)) : 0.0);
    } else if (const auto* v = std::get_if<VoltageSource>(&e)) {
      leave(v->pos, v->neg, element_current(netlist, result, e));
    } else if (const auto* x = std::get_if<IdealTransformer>(&e)) {
      leave(x->p_pos, x->p_neg, element_current(netlist, result, e, 0));
      leave(x->s_pos, x->s_neg, element_current(netlist, result, e, 1));
    }
  }
  double worst = 0.0;
  for (std::size_t i = 1; i < n; ++i)
    if (scale[i] > 0.0) worst = std::max(worst, std::abs(sum[i]) / scale[i]);
  return worst;
}

CMatrix port_probe(const Netlist& netlist, double frequency, std::span<const std::string> ports) {
  std::vector<const Port*> selected;
  if (ports.empty()) {
    for (const auto& p : netlist.ports()) selected.push_back(&p);
  } else {
    for (const auto& name : ports) selected.push_back(&netlist.port(name));
  }
  if (selected.empty()) throw InvalidInputError("port_probe: netlist declares no ports");

  const MnaSystem system = assemble(netlist, frequency, {.zero_sources = true});
  std::vector<CVector> rhs;
  for (const Port* p : selected) {
    CVector b(system.dimension());
    if (auto i = system.node_unknown(p->pos)) b[*i] += 1.0;
    if (auto i = system.node_unknown(p->neg)) b[*i] -= 1.0;
    rhs.push_back(std::move(b));
  }
  const auto results = solve_many(system, rhs);
  CMatrix z(selected.size(), selected.size());
  for (std::size_t j = 0; j < selected.size(); ++j)
    for (std::size_t i = 0; i < selected.size(); ++i)
      z(i, j) = results[j].voltage_between(selected[i]->pos, selected[i]->neg);
  return z;
}

}  // namespace couplerlab::circuit
