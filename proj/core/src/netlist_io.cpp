#include "couplerlab/netlist_io.hpp"

#include <sstream>
#include <vector>

#include "couplerlab/errors.hpp"
#include "couplerlab/si_units.hpp"

namespace couplerlab::circuit {

namespace {

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

void append_complex_parts(std::string& s, Complex v) {
  s += format_number(v.real());
  if (v.imag() != 0.0) {
    s += ' ';
    s += format_number(v.imag());
  }
}

}  // namespace

std::string print_netlist(const Netlist& netlist) {
  std::string out;
  out += ".nodes";
  for (std::size_t i = 1; i < netlist.node_count(); ++i) {
    out += ' ';
    out += netlist.node_name(NodeId{i});
  }
  out += '\n';
  auto nn = [&](NodeId id) { return netlist.node_name(id); };
  for (const auto& e : netlist.elements()) {
    std::string line = label_of(e);
    line += ' ';
    line += kind_letter(e);
    line += ' ';
    if (const auto* r = std::get_if<Resistor>(&e)) {
      line += nn(r->a) + " " + nn(r->b) + " " + format_number(r->ohms);
    } else if (const auto* c = std::get_if<Capacitor>(&e)) {
      line += nn(c->a) + " " + nn(c->b) + " " + format_number(c->farads);
    } else if (const auto* l = std::get_if<Inductor>(&e)) {
      line += nn(l->a) + " " + nn(l->b) + " " + format_number(l->henries);
    } else if (const auto* z = std::get_if<Impedance>(&e)) {
      line += nn(z->a) + " " + nn(z->b) + " ";
      append_complex_parts(line, z->ohms);
    } else if (const auto* v = std::get_if<VoltageSource>(&e)) {
      line += nn(v->pos) + " " + nn(v->neg) + " ";
      append_complex_parts(line, v->volts);
    } else if (const auto* k = std::get_if<MutualCoupling>(&e)) {
      line += k->first + " " + k->second + " " + format_number(k->k);
    } else if (const auto* x = std::get_if<IdealTransformer>(&e)) {
      line += nn(x->p_pos) + " " + nn(x->p_neg) + " " + nn(x->s_pos) + " " + nn(x->s_neg) + " " +
              format_number(x->ratio);
    }
    out += line;
    out += '\n';
  }
  for (const auto& p : netlist.ports()) {
    out += ".port " + p.label + " " + nn(p.pos) + " " + nn(p.neg) + " ";
    append_complex_parts(out, p.z_ref);
    out += '\n';
  }
  return out;
}

Netlist parse_netlist(std::string_view text) {
  Netlist net;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '*') {
      if (end == text.size()) break;
      continue;
    }
    const auto tok = split_ws(line);
    auto fail = [&](const std::string& why) -> void {
      throw InvalidInputError("netlist line " + std::to_string(line_no) + ": " + why + " in '" + std::string(line) + "'");
    };
    auto real = [&](const std::string& s) {
      auto v = parse_si(s);
      if (!v) fail("bad number '" + s + "'");
      return *v;
    };
    auto complex_from = [&](std::size_t first) {
      Complex v(real(tok[first]), 0.0);
      if (tok.size() > first + 1) v.imag(real(tok[first + 1]));
      if (tok.size() > first + 2) fail("too many fields");
      return v;
    };

    if (tok[0] == ".nodes") {
      for (std::size_t i = 1; i < tok.size(); ++i) net.node(tok[i]);
    } else if (tok[0] == ".port") {
      if (tok.size() < 5) fail("expected '.port LABEL node+ node- Zref'");
      net.add_port(tok[1], tok[2], tok[3], complex_from(4));
    } else {
      if (tok.size() < 2 || tok[1].size() != 1) fail("expected 'LABEL KIND ...'");
      const char kind = static_cast<char>(std::toupper(static_cast<unsigned char>(tok[1][0])));
      switch (kind) {
        case 'R':
        case 'C':
        case 'L':
          if (tok.size() != 5) fail("expected 'LABEL KIND node+ node- value'");
          if (kind == 'R') net.add_resistor(tok[0], tok[2], tok[3], real(tok[4]));
          if (kind == 'C') net.add_capacitor(tok[0], tok[2], tok[3], real(tok[4]));
          if (kind == 'L') net.add_inductor(tok[0], tok[2], tok[3], real(tok[4]));
          break;
        case 'Z':
        case 'V':
          if (tok.size() < 5) fail("expected 'LABEL KIND node+ node- value [value2]'");
          if (kind == 'Z') net.add_impedance(tok[0], tok[2], tok[3], complex_from(4));
          else net.add_source(tok[0], tok[2], tok[3], complex_from(4));
          break;
        case 'K':
          if (tok.size() != 5) fail("expected 'LABEL K inductor1 inductor2 k'");
          net.add_coupling(tok[0], tok[2], tok[3], real(tok[4]));
          break;
        case 'X':
          if (tok.size() != 7) fail("expected 'LABEL X p+ p- s+ s- n'");
          net.add_transformer(tok[0], tok[2], tok[3], tok[4], tok[5], real(tok[6]));
          break;
        default:
          fail("unknown element kind '" + tok[1] + "'");
      }
    }
    if (end == text.size()) break;
  }
  return net;
}

}  // namespace couplerlab::circuit
