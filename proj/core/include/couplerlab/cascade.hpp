#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "couplerlab/dense.hpp"
#include "couplerlab/netlist.hpp"

namespace couplerlab::cascade {

// Chain matrix of a 2N-port: [V1; I1] = T [V2; I2], with I1 flowing into the
// block on the input side and I2 flowing out of it on the output side.  All
// ports share the reference node as their negative terminal.
struct MultiportTMatrix {
  std::size_t ports_per_side = 0;
  CMatrix matrix;  // 2N x 2N
  double frequency = 0.0;

  static MultiportTMatrix identity(std::size_t n, double frequency = 0.0);

  CMatrix a() const { return matrix.block(0, 0, ports_per_side, ports_per_side); }
  CMatrix b() const { return matrix.block(0, ports_per_side, ports_per_side, ports_per_side); }
  CMatrix c() const { return matrix.block(ports_per_side, 0, ports_per_side, ports_per_side); }
  CMatrix d() const { return matrix.block(ports_per_side, ports_per_side, ports_per_side, ports_per_side); }

  // Norm of T J T^T - J (J = [[0, I], [-I, 0]]) relative to max(1, |T|^2).
  // Zero for reciprocal blocks; for N = 1 this is |det T - 1|.
  double reciprocity_defect() const;
};

// Series impedance in every line (diagonal) and shunt admittance matrix
// helpers, mostly for tests and hand-built chains.
MultiportTMatrix series_tmatrix(std::span<const Complex> z, double frequency = 0.0);
MultiportTMatrix shunt_tmatrix(const CMatrix& y, double frequency = 0.0);

// Extracts T from a fragment by driving its output side with each unit
// voltage (open output current) and unit current (shorted output voltage),
// leaving the input currents as unknowns.  Internal sources are zeroed.
// Throws SingularSystemError naming the port sets when T does not exist.
MultiportTMatrix block_to_tmatrix(const circuit::Netlist& fragment, double frequency,
                                  std::span<const std::string> input_ports,
                                  std::span<const std::string> output_ports);

// Chain product in order.  Empty input is rejected; frequencies and port
// counts must agree.
MultiportTMatrix cascade(std::span<const MultiportTMatrix> blocks);

// Norton view of whatever drives the chain input: I1 = In e - Ys V1, with e
// the vector of source amplitudes.
struct SourceTermination {
  CMatrix norton;      // N x inputs (A per V)
  CMatrix admittance;  // N x N

  // Source k in series with zs[k] on line k.
  static SourceTermination series(std::span<const Complex> zs);
  // Probes a netlist with ports `ports` (sharing the chain's nodes) and the
  // named internal voltage sources as inputs.
  static SourceTermination characterize(const circuit::Netlist& netlist, double frequency,
                                        std::span<const std::string> ports, std::span<const std::string> sources);
};

// Whatever loads the chain output: I2 = Yl V2, observed outputs y = G V2.
struct LoadTermination {
  CMatrix admittance;  // N x N
  CMatrix output_map;  // outputs x N

  // Load zl[k] from line k to the reference; outputs are the line voltages.
  static LoadTermination shunt(std::span<const Complex> zl);
  static LoadTermination characterize(const circuit::Netlist& netlist, double frequency,
                                      std::span<const std::string> ports, std::span<const std::string> outputs);
};

// Transfer matrix (outputs x inputs) of the terminated chain.
CMatrix tmatrix_to_transfer(const MultiportTMatrix& t, const SourceTermination& source, const LoadTermination& load);

// Convenience: series source impedances and shunt loads.
CMatrix tmatrix_to_transfer(const MultiportTMatrix& t, std::span<const Complex> source_impedances,
                            std::span<const Complex> load_impedances);

// Direct MNA of a whole netlist: column j holds the output port voltages
// when source j alone is set to 1 V.
CMatrix monolithic_transfer(const circuit::Netlist& netlist, double frequency, std::span<const std::string> sources,
                            std::span<const std::string> output_ports);

}  // namespace couplerlab::cascade
