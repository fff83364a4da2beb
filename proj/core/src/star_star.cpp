#include "couplerlab/star_star.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "couplerlab/errors.hpp"
#include "couplerlab/si_units.hpp"

namespace couplerlab::oracle {

Triple branch_impedances(const StarStarCase& c) {
  Triple z;
  for (int k = 0; k < 3; ++k) z[k] = c.source_impedances[k] + c.load_impedances[k];
  return z;
}

Complex determinant(const StarStarCase& c) {
  const Triple z = branch_impedances(c);
  return z[0] * z[1] + z[1] * z[2] + z[0] * z[2];
}

Matrix3 current_matrix(const StarStarCase& c) {
  const Triple z = branch_impedances(c);
  return Matrix3{{
      {z[1] + z[2], -z[2], -z[1]},
      {-z[2], z[0] + z[2], -z[0]},
      {-z[1], -z[0], z[0] + z[1]},
  }};
}

StarStarSolution solve_star_star(const StarStarCase& c) {
  const Triple z = branch_impedances(c);
  const Complex d = determinant(c);
  const double scale = std::max({std::abs(z[0] * z[1]), std::abs(z[1] * z[2]), std::abs(z[0] * z[2])});
  if (!(std::abs(d) > 1e-12 * scale) || scale == 0.0)
    throw DegenerateCaseError("star-star determinant vanishes (Z1Z2 + Z2Z3 + Z1Z3 = 0) for branch impedances Z1=" +
                              format_complex(z[0]) + ", Z2=" + format_complex(z[1]) + ", Z3=" + format_complex(z[2]));
  const Matrix3 m = current_matrix(c);
  StarStarSolution s;
  for (int r = 0; r < 3; ++r) {
    Complex acc{};
    for (int k = 0; k < 3; ++k) acc += m[r][k] * c.sources[k];
    s.currents[r] = acc / d;
    s.outputs[r] = s.currents[r] * c.load_impedances[r];
  }
  return s;
}

Triple star_star_outputs(const StarStarCase& c) { return solve_star_star(c).outputs; }

std::array<std::optional<double>, 3> deviation_from_nominal(const StarStarCase& c, const StarStarCase& nominal) {
  const Triple s = star_star_outputs(c);
  const Triple s0 = star_star_outputs(nominal);
  std::array<std::optional<double>, 3> out;
  for (int k = 0; k < 3; ++k) {
    const double ref = std::abs(s0[k]);
    if (ref == 0.0) continue;
    out[k] = 100.0 * (std::abs(s[k]) - ref) / ref;
  }
  return out;
}

circuit::Netlist star_star_netlist(const StarStarCase& c) {
  circuit::Netlist net;
  for (int k = 0; k < 3; ++k) {
    const std::string n = std::to_string(k + 1);
    net.add_source("E" + n, "e" + n, "0", c.sources[k]);
    net.add_impedance("ZS" + n, "e" + n, "s" + n, c.source_impedances[k]);
    net.add_impedance("ZL" + n, "s" + n, "star", c.load_impedances[k]);
    net.add_port("S" + n, "s" + n, "star");
  }
  return net;
}

}  // namespace couplerlab::oracle
