#pragma once

#include <string>
#include <string_view>

#include "couplerlab/netlist.hpp"

namespace couplerlab::circuit {

// Line-oriented text form, one element per line:
//
//   * comment
//   .nodes n1 n2 ...              (optional, fixes node numbering order)
//   R1 R a b 50                   resistor, ohms (0 = short)
//   C1 C a b 100n                 capacitor, farads
//   L1 L a b 1m                   inductor, henries
//   Z1 Z a b 50 [10]              impedance, real [imag] ohms
//   V1 V a b 1 [0]                voltage source, real [imag] volts
//   K1 K L1 L2 0.999              coupling between two named inductors
//   X1 X p+ p- s+ s- 2            ideal 1:n transformer
//   .port P1 a 0 50 [imag]        port with reference impedance
//
// Numbers accept SI suffixes (f p n u m k meg g t).
std::string print_netlist(const Netlist& netlist);

// Throws InvalidInputError naming the offending line.
Netlist parse_netlist(std::string_view text);

}  // namespace couplerlab::circuit
