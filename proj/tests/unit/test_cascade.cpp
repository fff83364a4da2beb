#include <doctest.h>

#include "couplerlab/cascade.hpp"
#include "couplerlab/coupler.hpp"
#include "couplerlab/errors.hpp"
#include "couplerlab/link.hpp"
#include "couplerlab/mna.hpp"
#include "couplerlab/sweep.hpp"
#include "test_support.hpp"

using namespace couplerlab;
using namespace couplerlab::cascade;

namespace {

CMatrix m2(Complex a, Complex b, Complex c, Complex d) {
  CMatrix m(2, 2);
  m(0, 0) = a;
  m(0, 1) = b;
  m(1, 0) = c;
  m(1, 1) = d;
  return m;
}

MultiportTMatrix random_reciprocal_block(testing::Rng& rng, std::size_t n) {
  // Products of series and shunt sections are reciprocal.
  std::vector<Complex> z(n);
  for (auto& v : z) v = rng.complex(1, 100, -50, 50);
  CMatrix y(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) y(i, j) = y(j, i) = rng.complex(-0.01, 0.01, -0.01, 0.01);
  for (std::size_t i = 0; i < n; ++i) y(i, i) += 0.05;
  const std::vector<MultiportTMatrix> parts{series_tmatrix(z), shunt_tmatrix(y)};
  return cascade::cascade(parts);
}

}  // namespace

TEST_CASE("textbook single-line sections") {
  const Complex z(10, 5);
  const std::vector<Complex> zz{z};
  CHECK(series_tmatrix(zz).matrix == m2(1, z, 0, 1));
  CHECK(shunt_tmatrix(m2(0.02, 0, 0, 0).block(0, 0, 1, 1)).matrix == m2(1, 0, 0.02, 1));
}

TEST_CASE("extracted T of series and shunt fragments") {
  circuit::Netlist s;
  s.add_impedance("Z", "a", "b", Complex(10, 5));
  s.add_port("in", "a", "0");
  s.add_port("out", "b", "0");
  const std::vector<std::string> in{"in"}, out{"out"};
  CHECK(max_abs_diff(block_to_tmatrix(s, 1e6, in, out).matrix, m2(1, Complex(10, 5), 0, 1)) < 1e-12);

  circuit::Netlist y;
  y.add_resistor("R", "a", "0", 50.0);
  y.add_port("in", "a", "0");
  y.add_port("out", "a", "0");
  CHECK(max_abs_diff(block_to_tmatrix(y, 1e6, in, out).matrix, m2(1, 0, 0.02, 1)) < 1e-12);
}

TEST_CASE("ideal 1:n transformer chain matrix is diag(1/n, n)") {
  for (double n : {0.5, 2.0, 3.0}) {
    circuit::Netlist x;
    x.add_transformer("X", "p", "0", "s", "0", n);
    x.add_port("in", "p", "0");
    x.add_port("out", "s", "0");
    const std::vector<std::string> in{"in"}, out{"out"};
    const auto t = block_to_tmatrix(x, 1e6, in, out);
    CHECK(max_abs_diff(t.matrix, m2(1.0 / n, 0, 0, n)) < 1e-12);
    CHECK(t.reciprocity_defect() < 1e-12);
  }
}

TEST_CASE("cascade algebra: identity, series sum, associativity, reciprocity") {
  testing::Rng rng(99);
  for (std::size_t n : {1u, 3u}) {
    const auto a = random_reciprocal_block(rng, n);
    const auto b = random_reciprocal_block(rng, n);
    const auto c = random_reciprocal_block(rng, n);
    const std::vector<MultiportTMatrix> ai{a, MultiportTMatrix::identity(n)};
    CHECK(cascade::cascade(ai).matrix == a.matrix);
    const std::vector<MultiportTMatrix> ab{a, b}, bc{b, c};
    const std::vector<MultiportTMatrix> left{cascade::cascade(ab), c}, right{a, cascade::cascade(bc)};
    CHECK(testing::rel_error(cascade::cascade(left).matrix, cascade::cascade(right).matrix) <= 1e-12);
    const std::vector<MultiportTMatrix> abc{a, b, c};
    CHECK(cascade::cascade(abc).reciprocity_defect() <= 1e-8);
  }
  const std::vector<Complex> z1{Complex(3, 1)}, z2{Complex(4, -2)}, z12{Complex(7, -1)};
  const std::vector<MultiportTMatrix> ss{series_tmatrix(z1), series_tmatrix(z2)};
  CHECK(max_abs_diff(cascade::cascade(ss).matrix, series_tmatrix(z12).matrix) < 1e-15);
}

TEST_CASE("cascade rejects mismatched blocks") {
  const std::vector<MultiportTMatrix> empty;
  CHECK_THROWS_AS(cascade::cascade(empty), InvalidInputError);
  const std::vector<MultiportTMatrix> mixed{MultiportTMatrix::identity(1), MultiportTMatrix::identity(3)};
  CHECK_THROWS_AS(cascade::cascade(mixed), InvalidInputError);
  const std::vector<MultiportTMatrix> freq{MultiportTMatrix::identity(1, 1e6), MultiportTMatrix::identity(1, 2e6)};
  CHECK_THROWS_AS(cascade::cascade(freq), InvalidInputError);
}

TEST_CASE("terminated single-line chains") {
  const std::vector<Complex> z50{Complex(50.0)};
  CHECK(std::abs(tmatrix_to_transfer(MultiportTMatrix::identity(1), z50, z50)(0, 0) - 0.5) < 1e-15);
  CHECK(std::abs(tmatrix_to_transfer(series_tmatrix(z50), z50, z50)(0, 0) - 1.0 / 3.0) < 1e-15);
}

TEST_CASE("blocks B, C, D, E: cascade equals monolithic MNA") {
  coupler::BlockParams p;
  const coupler::Fragment b = coupler::build_block(coupler::BlockKind::Protection, p);
  const coupler::Fragment c = coupler::build_block(coupler::BlockKind::Filter, p);
  const coupler::Fragment d = coupler::build_block(coupler::BlockKind::CommonMode, p);
  const coupler::Fragment e = coupler::build_block(coupler::BlockKind::Uncoupling, p);

  // Monolithic: the four stages with renamed nodes joined in one netlist.
  circuit::Netlist joined;
  const std::vector<std::complex<double>> zs{50.0, 60.0, 70.0}, zl{50.0, 40.0, 30.0};
  for (int k = 0; k < 3; ++k) {
    const std::string i = std::to_string(k + 1);
    joined.add_source("E" + i, "v" + i, "0", k == 0 ? 1.0 : 0.0);
    joined.add_impedance("ZS" + i, "v" + i, "n0_" + i, zs[k]);
    joined.add_resistor("B.R" + i, "n0_" + i, "nb" + i, p.protection.resistance);
    joined.add_inductor("B.L" + i, "nb" + i, "n1_" + i, p.protection.inductance);
    joined.add_capacitor("C.C" + i, "n1_" + i, "n2_" + i, p.filter.capacitance);
    joined.add_resistor("D.R" + i, "n2_" + i, "m", p.common_mode.neutral_resistance);
    joined.add_inductor("E.W" + i + "Lp", "n2_" + i, "0", p.uncoupling.inductance);
    joined.add_inductor("E.W" + i + "Ls", "n3_" + i, "0", p.uncoupling.inductance);
    joined.add_coupling("E.W" + i + "K", "E.W" + i + "Lp", "E.W" + i + "Ls", p.uncoupling.coupling);
    joined.add_impedance("ZL" + i, "n3_" + i, "0", zl[k]);
    joined.add_port("out" + i, "n3_" + i, "0");
  }
  joined.add_inductor("D.Lp", "m", "0", p.common_mode.inductance);
  joined.add_inductor("D.Ls", "cm", "0", p.common_mode.inductance);
  joined.add_coupling("D.K", "D.Lp", "D.Ls", p.common_mode.coupling);

  const std::vector<std::string> sources{"E1", "E2", "E3"}, outs{"out1", "out2", "out3"};
  for (double f : {1e4, 1e6, 1e7, 1e8}) {
    CAPTURE(f);
    CMatrix mono = monolithic_transfer(joined, f, sources, outs);
    std::vector<MultiportTMatrix> chain;
    for (const auto* frag : {&b, &c, &d, &e})
      chain.push_back(block_to_tmatrix(frag->netlist, f, frag->mains_ports, frag->equipment_ports));
    const CMatrix h = tmatrix_to_transfer(cascade::cascade(chain), zs, zl);
    CHECK(testing::rel_error(h, mono) <= 1e-6);
  }
}

TEST_CASE("link model: cascade equals monolithic for triangle-T at 10 MHz") {
  const LinkModel model(coupler::BackToBackSpec{});
  const CMatrix mono = model.monolithic(10e6);
  const CMatrix casc = model.cascaded(10e6);
  CHECK(mono.rows() == 4);
  CHECK(mono.cols() == 2);
  CHECK(testing::rel_error(casc, mono) <= 1e-6);
}

TEST_CASE("link model falls back to the monolithic solve on a singular chain step") {
  // Without block D nothing but the series filter capacitors ties the two
  // mains sides together; at 1 mHz the chained T-matrices are so lopsided
  // that the terminated chain is rank-deficient while the full MNA system
  // still solves.
  coupler::BackToBackSpec spec;
  for (auto* side : {&spec.tx, &spec.rx}) {
    side->params.common_mode.bypass = true;
    side->mimo = coupler::MimoMode::M2x3;
  }
  const LinkModel model(spec);
  CHECK_THROWS_AS(model.cascaded(1e-3), SingularSystemError);
  bool fallback = false;
  CMatrix h;
  CHECK_NOTHROW(h = model.transfer(1e-3, Method::Cascade, &fallback));
  CHECK(fallback);
  CHECK(max_abs_diff(h, model.monolithic(1e-3)) == 0.0);

  model.transfer(1e6, Method::Cascade, &fallback);
  CHECK_FALSE(fallback);

  // Both paths fail at DC: the capacitors leave the filter nodes floating.
  CHECK_THROWS_AS(model.transfer(0.0, Method::Cascade, &fallback), SingularSystemError);
}

TEST_CASE("scaled link model perturbs both solve paths alike") {
  const LinkModel model(coupler::BackToBackSpec{});
  const LinkModel scaled = model.scaled({{"rx.C.C1", 1.5}, {"tx.B.L2", 0.7}, {"rx.E.W1Lp", 1.1}});
  for (double f : {1e5, 1e7}) {
    CHECK(testing::rel_error(scaled.cascaded(f), scaled.monolithic(f)) <= 1e-6);
    CHECK(max_abs_diff(scaled.monolithic(f), model.monolithic(f)) > 1e-6);
  }
}
