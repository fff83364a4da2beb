#include "couplerlab/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "couplerlab/errors.hpp"
#include "couplerlab/mna.hpp"

namespace couplerlab::cascade {

namespace {

using circuit::MnaSystem;
using circuit::NodeId;
using OptIndex = std::optional<std::size_t>;

struct PortRef {
  OptIndex pos, neg;
};

std::vector<PortRef> resolve_ports(const circuit::Netlist& net, const MnaSystem& sys,
                                   std::span<const std::string> labels) {
  std::vector<PortRef> out;
  for (const auto& l : labels) {
    const auto& p = net.port(l);
    out.push_back({sys.node_unknown(p.pos), sys.node_unknown(p.neg)});
  }
  return out;
}

Complex port_voltage(const CVector& x, const PortRef& p) {
  Complex v{};
  if (p.pos) v += x[*p.pos];
  if (p.neg) v -= x[*p.neg];
  return v;
}

std::string join(std::span<const std::string> labels) {
  std::string s = "{";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) s += ", ";
    s += labels[i];
  }
  return s + "}";
}

// MNA of `net` with sources zeroed, extended by one current unknown and one
// voltage-constraint row per listed port.  The extra unknown is the current
// entering the network at the port's positive node.
struct PortDrivenSystem {
  MnaSystem sys;
  std::vector<PortRef> ports;
  CMatrix matrix;
  std::vector<std::string> labels;

  PortDrivenSystem(const circuit::Netlist& net, double f, std::span<const std::string> port_labels)
      : sys(circuit::assemble(net, f, {.zero_sources = true})), ports(resolve_ports(net, sys, port_labels)) {
    const std::size_t n = sys.dimension();
    const std::size_t np = ports.size();
    matrix = CMatrix(n + np, n + np);
    matrix.set_block(0, 0, sys.matrix);
    labels = sys.unknown_labels;
    for (std::size_t k = 0; k < np; ++k) {
      const std::size_t col = n + k;
      // Current injected at pos: moves to the left-hand side with a minus.
      if (ports[k].pos) matrix(*ports[k].pos, col) -= 1.0;
      if (ports[k].neg) matrix(*ports[k].neg, col) += 1.0;
      if (ports[k].pos) matrix(col, *ports[k].pos) += 1.0;
      if (ports[k].neg) matrix(col, *ports[k].neg) -= 1.0;
      labels.push_back("I(" + port_labels[k] + ")");
    }
  }
};

}  // namespace

MultiportTMatrix MultiportTMatrix::identity(std::size_t n, double frequency) {
  return {n, CMatrix::identity(2 * n), frequency};
}

double MultiportTMatrix::reciprocity_defect() const {
  const std::size_t n = ports_per_side;
  CMatrix j(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    j(i, n + i) = 1.0;
    j(n + i, i) = -1.0;
  }
  const CMatrix r = matrix * j * matrix.transpose() - j;
  const double scale = std::max(1.0, matrix.max_abs() * matrix.max_abs());
  return r.max_abs() / scale;
}

MultiportTMatrix series_tmatrix(std::span<const Complex> z, double frequency) {
  const std::size_t n = z.size();
  MultiportTMatrix t = MultiportTMatrix::identity(n, frequency);
  for (std::size_t i = 0; i < n; ++i) t.matrix(i, n + i) = z[i];
  return t;
}

MultiportTMatrix shunt_tmatrix(const CMatrix& y, double frequency) {
  if (y.rows() != y.cols()) throw InvalidInputError("shunt admittance must be square");
  const std::size_t n = y.rows();
  MultiportTMatrix t = MultiportTMatrix::identity(n, frequency);
  t.matrix.set_block(n, 0, y);
  return t;
}

MultiportTMatrix block_to_tmatrix(const circuit::Netlist& fragment, double frequency,
                                  std::span<const std::string> input_ports,
                                  std::span<const std::string> output_ports) {
  const std::size_t np = input_ports.size();
  if (np == 0 || np != output_ports.size())
    throw InvalidInputError("block_to_tmatrix needs equal, non-empty input and output port sets");

  const MnaSystem sys = circuit::assemble(fragment, frequency, {.zero_sources = true});
  const auto in = resolve_ports(fragment, sys, input_ports);
  const auto out = resolve_ports(fragment, sys, output_ports);
  const std::size_t n = sys.dimension();

  CMatrix a(n + np, n + np);
  a.set_block(0, 0, sys.matrix);
  std::vector<std::string> labels = sys.unknown_labels;
  for (std::size_t k = 0; k < np; ++k) {
    const std::size_t col = n + k;
    if (in[k].pos) a(*in[k].pos, col) -= 1.0;
    if (in[k].neg) a(*in[k].neg, col) += 1.0;
    // Output port voltage constraint occupies the same extra row index.
    if (out[k].pos) a(col, *out[k].pos) += 1.0;
    if (out[k].neg) a(col, *out[k].neg) -= 1.0;
    labels.push_back("I(" + input_ports[k] + ")");
  }
  const std::string context = "T-matrix extraction, inputs " + join(input_ports) + " / outputs " + join(output_ports);
  LuDecomposition lu(std::move(a), std::move(labels), context);

  MultiportTMatrix t{np, CMatrix(2 * np, 2 * np), frequency};
  for (std::size_t j = 0; j < 2 * np; ++j) {
    CVector b(n + np);
    if (j < np) {
      b[n + j] = 1.0;  // V2 = e_j, I2 = 0
    } else {
      const auto& p = out[j - np];  // V2 = 0, I2 = e_j leaving at pos
      if (p.pos) b[*p.pos] -= 1.0;
      if (p.neg) b[*p.neg] += 1.0;
    }
    const CVector x = lu.solve(b);
    for (std::size_t k = 0; k < np; ++k) {
      t.matrix(k, j) = port_voltage(x, in[k]);
      t.matrix(np + k, j) = x[n + k];
    }
  }
  return t;
}

MultiportTMatrix cascade(std::span<const MultiportTMatrix> blocks) {
  if (blocks.empty()) throw InvalidInputError("cascade of zero blocks");
  MultiportTMatrix t = blocks.front();
  for (std::size_t i = 1; i < blocks.size(); ++i) {
    if (blocks[i].ports_per_side != t.ports_per_side)
      throw InvalidInputError("cascade: blocks disagree on port count");
    if (blocks[i].frequency != t.frequency) throw InvalidInputError("cascade: blocks evaluated at different frequencies");
    t.matrix = t.matrix * blocks[i].matrix;
  }
  return t;
}

SourceTermination SourceTermination::series(std::span<const Complex> zs) {
  CVector y(zs.size());
  for (std::size_t i = 0; i < zs.size(); ++i) {
    if (zs[i] == Complex{}) throw InvalidInputError("series source termination needs non-zero impedance");
    y[i] = 1.0 / zs[i];
  }
  return {CMatrix::diagonal(y), CMatrix::diagonal(y)};
}

SourceTermination SourceTermination::characterize(const circuit::Netlist& netlist, double frequency,
                                                   std::span<const std::string> ports,
                                                   std::span<const std::string> sources) {
  PortDrivenSystem ps(netlist, frequency, ports);
  const std::size_t n = ps.sys.dimension();
  const std::size_t np = ports.size();
  LuDecomposition lu(ps.matrix, ps.labels, "source termination at " + std::to_string(frequency) + " Hz");

  SourceTermination st{CMatrix(np, sources.size()), CMatrix(np, np)};
  for (std::size_t s = 0; s < sources.size(); ++s) {
    auto it = ps.sys.aux_index.find(sources[s]);
    if (it == ps.sys.aux_index.end()) throw InvalidInputError("unknown source '" + sources[s] + "'");
    CVector b(n + np);
    b[it->second] = 1.0;
    const CVector x = lu.solve(b);
    // Short-circuit current delivered out of the termination.
    for (std::size_t k = 0; k < np; ++k) st.norton(k, s) = -x[n + k];
  }
  for (std::size_t j = 0; j < np; ++j) {
    CVector b(n + np);
    b[n + j] = 1.0;
    const CVector x = lu.solve(b);
    for (std::size_t k = 0; k < np; ++k) st.admittance(k, j) = x[n + k];
  }
  return st;
}

LoadTermination LoadTermination::shunt(std::span<const Complex> zl) {
  CVector y(zl.size());
  for (std::size_t i = 0; i < zl.size(); ++i) {
    if (zl[i] == Complex{}) throw InvalidInputError("shunt load needs non-zero impedance");
    y[i] = 1.0 / zl[i];
  }
  return {CMatrix::diagonal(y), CMatrix::identity(zl.size())};
}

LoadTermination LoadTermination::characterize(const circuit::Netlist& netlist, double frequency,
                                              std::span<const std::string> ports,
                                              std::span<const std::string> outputs) {
  PortDrivenSystem ps(netlist, frequency, ports);
  const std::size_t n = ps.sys.dimension();
  const std::size_t np = ports.size();
  const auto outs = resolve_ports(netlist, ps.sys, outputs);
  LuDecomposition lu(ps.matrix, ps.labels, "load termination at " + std::to_string(frequency) + " Hz");

  LoadTermination lt{CMatrix(np, np), CMatrix(outputs.size(), np)};
  for (std::size_t j = 0; j < np; ++j) {
    CVector b(n + np);
    b[n + j] = 1.0;
    const CVector x = lu.solve(b);
    for (std::size_t k = 0; k < np; ++k) lt.admittance(k, j) = x[n + k];
    for (std::size_t o = 0; o < outs.size(); ++o) lt.output_map(o, j) = port_voltage(x, outs[o]);
  }
  return lt;
}

CMatrix tmatrix_to_transfer(const MultiportTMatrix& t, const SourceTermination& source, const LoadTermination& load) {
  const std::size_t n = t.ports_per_side;
  if (source.admittance.rows() != n || load.admittance.rows() != n || load.output_map.cols() != n ||
      source.norton.rows() != n)
    throw InvalidInputError("termination dimensions do not match the chain");
  // (C + D Yl) V2 = In e - Ys (A + B Yl) V2
  const CMatrix m = (t.c() + t.d() * load.admittance) + source.admittance * (t.a() + t.b() * load.admittance);
  LuDecomposition lu(m, {}, "terminated chain at " + std::to_string(t.frequency) + " Hz");
  return load.output_map * lu.solve(source.norton);
}

CMatrix tmatrix_to_transfer(const MultiportTMatrix& t, std::span<const Complex> source_impedances,
                            std::span<const Complex> load_impedances) {
  return tmatrix_to_transfer(t, SourceTermination::series(source_impedances), LoadTermination::shunt(load_impedances));
}

CMatrix monolithic_transfer(const circuit::Netlist& netlist, double frequency, std::span<const std::string> sources,
                            std::span<const std::string> output_ports) {
  const MnaSystem sys = circuit::assemble(netlist, frequency, {.zero_sources = true});
  std::vector<CVector> rhs;
  for (const auto& s : sources) {
    auto it = sys.aux_index.find(s);
    if (it == sys.aux_index.end() || !std::holds_alternative<circuit::VoltageSource>(*netlist.find_element(s)))
      throw InvalidInputError("unknown voltage source '" + s + "'");
    CVector b(sys.dimension());
    b[it->second] = 1.0;
    rhs.push_back(std::move(b));
  }
  const auto results = circuit::solve_many(sys, rhs);
  CMatrix h(output_ports.size(), sources.size());
  for (std::size_t o = 0; o < output_ports.size(); ++o) {
    const auto& p = netlist.port(output_ports[o]);
    for (std::size_t j = 0; j < sources.size(); ++j) h(o, j) = results[j].voltage_between(p.pos, p.neg);
  }
  return h;
}

}  // namespace couplerlab::cascade
