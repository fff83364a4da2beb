#include <doctest.h>

#include "couplerlab/errors.hpp"
#include "couplerlab/mna.hpp"
#include "couplerlab/star_star.hpp"
#include "test_support.hpp"

using namespace couplerlab;
using namespace couplerlab::oracle;

namespace {

Triple mna_currents(const StarStarCase& c) {
  const auto net = star_star_netlist(c);
  const auto r = circuit::solve(net, 1e6);
  Triple i;
  for (int k = 0; k < 3; ++k)
    i[k] = circuit::element_current(net, r, *net.find_element("ZL" + std::to_string(k + 1)));
  return i;
}

StarStarCase make(Triple e, Triple zs, Triple zl) {
  StarStarCase c;
  c.sources = e;
  c.source_impedances = zs;
  c.load_impedances = zl;
  return c;
}

const Triple k50{Complex{50.0}, Complex{50.0}, Complex{50.0}};

}  // namespace

TEST_CASE("symmetric excitation drives no current") {
  const auto c = make({1.0, 1.0, 1.0}, k50, k50);
  const auto s = solve_star_star(c);
  for (int k = 0; k < 3; ++k) {
    CHECK(std::abs(s.currents[k]) <= 1e-15);
    CHECK(std::abs(s.outputs[k]) <= 1e-15);
  }
}

TEST_CASE("single unit source into a matched star") {
  const auto c = make({1.0, 0.0, 0.0}, k50, k50);
  CHECK(determinant(c) == Complex(30000.0));
  const auto s = solve_star_star(c);
  // 1/150, -1/300, -1/300 A; outputs 50x.
  CHECK(std::abs(s.currents[0] - 1.0 / 150.0) < 1e-15);
  CHECK(std::abs(s.currents[1] + 1.0 / 300.0) < 1e-15);
  CHECK(std::abs(s.currents[2] + 1.0 / 300.0) < 1e-15);
  CHECK(std::abs(s.outputs[0] - 1.0 / 3.0) < 1e-14);
  CHECK(std::abs(s.outputs[1] + 1.0 / 6.0) < 1e-14);
}

TEST_CASE("unequal source impedances, mixed excitation") {
  const auto c = make({1.0, 0.5, -0.5}, {Complex{50.0}, Complex{75.0}, Complex{100.0}}, k50);
  // Frozen from the node-potential evaluation: 21/3700, 2/3700, -23/3700 A.
  const Triple frozen{21.0 / 3700.0, 2.0 / 3700.0, -23.0 / 3700.0};
  CHECK(testing::rel_error(solve_star_star(c).currents, frozen) < 1e-13);
  CHECK(testing::rel_error(testing::node_potential_currents(c), frozen) < 1e-13);
  CHECK(std::abs(frozen[0] - 5.6757e-3) < 1e-7);
  CHECK(std::abs(frozen[1] - 0.54054e-3) < 1e-8);
  CHECK(std::abs(frozen[2] + 6.2162e-3) < 1e-7);
}

TEST_CASE("zero load forces zero output, deviation -100 %") {
  const auto nominal = make({1.0, 0.3, -0.2}, k50, k50);
  auto c = nominal;
  c.load_impedances[0] = 0.0;
  CHECK(solve_star_star(c).outputs[0] == Complex{});
  const auto dev = deviation_from_nominal(c, nominal);
  CHECK(*dev[0] == doctest::Approx(-100.0));
  const auto same = deviation_from_nominal(nominal, nominal);
  for (const auto& d : same) CHECK(*d == 0.0);
}

TEST_CASE("deviation is undefined where the nominal output vanishes") {
  const auto nominal = make({1.0, 1.0, 1.0}, k50, k50);
  auto c = nominal;
  c.load_impedances[0] = 80.0;
  const auto dev = deviation_from_nominal(c, nominal);
  CHECK_FALSE(dev[0].has_value());
}

TEST_CASE("degenerate determinant is rejected with the impedances named") {
  // Z1 = Z2 = 1, Z3 = -1/2 gives D = 1 - 1/2 - 1/2 = 0.
  const auto c = make({1.0, 0.0, 0.0}, {Complex{0.5}, Complex{0.5}, Complex(0.0, 0.0)},
                      {Complex{0.5}, Complex{0.5}, Complex{-0.5}});
  try {
    solve_star_star(c);
    FAIL("expected DegenerateCaseError");
  } catch (const DegenerateCaseError& e) {
    CHECK(std::string(e.what()).find("Z3=-0.5") != std::string::npos);
  }
}

TEST_CASE("property: corrected matrix symmetric, rows sum to zero, currents conserve") {
  testing::Rng rng(5150);
  for (int n = 0; n < 500; ++n) {
    const auto c = testing::random_star_star_case(rng);
    const auto m = current_matrix(c);
    for (int r = 0; r < 3; ++r) {
      Complex rowsum{};
      for (int k = 0; k < 3; ++k) {
        CHECK(m[r][k] == m[k][r]);
        rowsum += m[r][k];
      }
      CHECK(std::abs(rowsum) <= 1e-12 * std::abs(m[r][r]));
    }
    const auto i = solve_star_star(c).currents;
    CHECK(std::abs(i[0] + i[1] + i[2]) <= 1e-12 * testing::max_abs(i));
  }
}

TEST_CASE("property: linear in the source vector") {
  testing::Rng rng(77);
  for (int n = 0; n < 200; ++n) {
    auto c = testing::random_star_star_case(rng);
    const Complex alpha = rng.complex(-2, 2, -2, 2);
    const auto i0 = solve_star_star(c).currents;
    for (auto& e : c.sources) e *= alpha;
    const auto i1 = solve_star_star(c).currents;
    Triple expect{alpha * i0[0], alpha * i0[1], alpha * i0[2]};
    CHECK(testing::rel_error(i1, expect) <= 1e-12);
  }
}

TEST_CASE("oracle equals MNA and the node-potential form; printed matrix does not") {
  testing::Rng rng(1);
  std::size_t printed_failures = 0;
  for (int n = 0; n < 200; ++n) {
    const auto c = testing::random_star_star_case(rng);
    const auto oracle = solve_star_star(c).currents;
    CHECK(testing::rel_error(oracle, mna_currents(c)) <= 1e-9);
    CHECK(testing::rel_error(oracle, testing::node_potential_currents(c)) <= 1e-9);
    if (testing::rel_error(testing::printed_matrix_currents(c), mna_currents(c)) > 1e-9) ++printed_failures;
  }
  // The printed entry only coincides with the corrected one when Za = Zc.
  CHECK(printed_failures == 200);
  // Symmetric loads hide the typo.
  const auto sym = make({1.0, 0.5, 0.25}, {Complex{10.0}, Complex{20.0}, Complex{30.0}}, k50);
  CHECK(testing::rel_error(testing::printed_matrix_currents(sym), mna_currents(sym)) <= 1e-12);
}

TEST_CASE("netlist form exposes sources, loads and output ports") {
  const auto net = star_star_netlist(make({1.0, 0.0, 0.0}, k50, k50));
  CHECK(net.find_element("E1"));
  CHECK(net.find_element("ZL3"));
  CHECK(net.find_port("S2"));
  CHECK(circuit::validate(net).ok());
}
