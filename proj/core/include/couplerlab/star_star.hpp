#pragma once

#include <array>
#include <optional>

#include "couplerlab/dense.hpp"
#include "couplerlab/netlist.hpp"

namespace couplerlab::oracle {

using Triple = std::array<Complex, 3>;
using Matrix3 = std::array<Triple, 3>;

// Three branches a, b, c between a grounded transmitter star point and a
// floating receiver star point.  Branch k holds source E_k, source-side
// impedance Zs_k and load Zl_k; the received signal is S_k = i_k Zl_k.
struct StarStarCase {
  Triple sources{Complex{1.0}, Complex{}, Complex{}};
  Triple source_impedances{Complex{50.0}, Complex{50.0}, Complex{50.0}};
  Triple load_impedances{Complex{50.0}, Complex{50.0}, Complex{50.0}};
};

struct StarStarSolution {
  Triple currents;
  Triple outputs;
};

// Z_k = Zs_k + Zl_k.
Triple branch_impedances(const StarStarCase& c);

// D = Z1 Z2 + Z2 Z3 + Z1 Z3.
Complex determinant(const StarStarCase& c);

// Symmetric matrix M with i = M E / D.
Matrix3 current_matrix(const StarStarCase& c);

// Throws DegenerateCaseError when |D| vanishes relative to the branch
// impedance products.
StarStarSolution solve_star_star(const StarStarCase& c);
Triple star_star_outputs(const StarStarCase& c);

// Percent change of |S_k| against a nominal case.  nullopt where the
// nominal output is exactly zero (the ratio is undefined there).
std::array<std::optional<double>, 3> deviation_from_nominal(const StarStarCase& c, const StarStarCase& nominal);

// The same circuit written as a netlist (sources "E1".."E3", loads
// "ZL1".."ZL3", output ports "S1".."S3" across each load), for
// cross-checks against the MNA engine.
circuit::Netlist star_star_netlist(const StarStarCase& c);

}  // namespace couplerlab::oracle
