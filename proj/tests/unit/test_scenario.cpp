#include <doctest.h>

#include "couplerlab/scenario.hpp"
#include "couplerlab/si_units.hpp"
#include "test_support.hpp"

using namespace couplerlab;
using namespace couplerlab::report;
using coupler::Topology;

namespace {

std::vector<ScenarioIssue> issues_of(std::string_view text, std::vector<std::string> overrides = {}) {
  try {
    parse_scenario(text, overrides);
  } catch (const ScenarioError& e) {
    return e.issues();
  }
  return {};
}

bool mentions(const std::vector<ScenarioIssue>& issues, const std::string& where, const std::string& text) {
  for (const auto& i : issues)
    if (i.where == where && i.message.find(text) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("minimal file takes every documented default") {
  const auto s = parse_scenario("experiment = tf\n[tx]\ntopology = triangle\n[rx]\ntopology = T\n");
  CHECK(s == ScenarioSpec{});
  CHECK(s.experiment.kind == ExperimentKind::TransferFunction);
  CHECK(s.grid.points == 601);
  CHECK(s.grid.start == 10e3);
  CHECK(s.grid.stop == 300e6);
  CHECK(s.link.tx.params.filter.capacitance == 100e-9);
  CHECK(s.link.rx.params.common_mode.inductance == 1e-3);
  CHECK(s.link.line[1] == Complex(50.0));
  CHECK(s.experiment.load_values.size() == 61);
  CHECK(s.experiment.load_values.back() == 300.0);
}

TEST_CASE("si suffix values") {
  const auto s = parse_scenario("[tx]\ncapacitance = 100n\n[frequency]\nstop = 1meg\nstart = 1k\n");
  CHECK(s.link.tx.params.filter.capacitance == doctest::Approx(1.0e-7).epsilon(1e-15));
  CHECK(s.grid.stop == 1e6);
  CHECK(s.grid.start == 1e3);
}

TEST_CASE("points = 1 is rejected") {
  const auto issues = issues_of("[frequency]\npoints = 1\n");
  REQUIRE(issues.size() == 1);
  CHECK(issues[0].where == "line 2");
  CHECK(issues[0].message == "points >= 2 required");
}

TEST_CASE("all errors are reported together with their lines") {
  const auto issues = issues_of(
      "[frequency]\n"            // 1
      "start = ten\n"            // 2
      "colour = blue\n"          // 3
      "[tx]\n"                   // 4
      "mimo = 2x4\n"             // 5
      "topology = hexagon\n"     // 6
      "[rx]\n"                   // 7
      "mimo = 3x3\n"             // 8
      "[nonsense]\n"             // 9
      "[line]\n"                 // 10
      "impedances = 50, 50\n"    // 11
      "impedances = 60\n");      // 12
  CHECK(mentions(issues, "line 2", "malformed number"));
  CHECK(mentions(issues, "line 3", "unknown key 'colour'"));
  CHECK(mentions(issues, "line 6", "unknown topology"));
  CHECK(mentions(issues, "line 8", "conflicting sections"));
  CHECK(mentions(issues, "line 9", "unknown section"));
  CHECK(mentions(issues, "line 11", "one or three"));
  CHECK(mentions(issues, "line 12", "duplicate key"));
  try {
    parse_scenario("[frequency]\npoints = 0\nstart = x\n");
  } catch (const ScenarioError& e) {
    CHECK(std::string(e.what()).find("2 errors") != std::string::npos);
  }
}

TEST_CASE("semantic checks reuse the coupler rules") {
  auto issues = issues_of("[tx]\ntopology = triangle\nmimo = 3x3\n");
  CHECK(mentions(issues, "[tx]", "two independent windings"));
  issues = issues_of("[tx]\ndrive_common_mode = true\n");
  CHECK(mentions(issues, "[tx]", "EMI"));
  CHECK(issues_of("[tx]\ndrive_common_mode = true\nallow_emi_infeasible = true\n").empty());
  issues = issues_of("[experiment]\ntolerance = 0.7\ntrials = 0\nvalues = 1, 3, 2\n");
  CHECK(issues.size() == 3);
}

TEST_CASE("overrides replace file values and report their position") {
  const std::vector<std::string> ov{"frequency.points=11", "rx.topology=star"};
  const auto s = parse_scenario("[frequency]\npoints = 5\n", ov);
  CHECK(s.grid.points == 11);
  CHECK(s.link.rx.topology == Topology::Star);
  const auto issues = issues_of("", {"frequency.points=11", "bogus", "tx.nokey=1"});
  CHECK(mentions(issues, "--set 2", "section.key=value"));
  CHECK(mentions(issues, "--set 3", "unknown key"));
}

TEST_CASE("pass_through applies before individual keys") {
  const auto s = parse_scenario("[tx]\ncapacitance = 47n\npass_through = true\nimpedances = 75\n");
  CHECK(s.link.tx.params.filter.bypass);
  CHECK(s.link.tx.params.filter.capacitance == doctest::Approx(47e-9));
  CHECK(s.link.tx.params.terminations[2] == Complex(75.0));
  CHECK(s.link.tx.params.uncoupling.ideal);
}

TEST_CASE("value lists, ranges and sets") {
  const auto s = parse_scenario(
      "[experiment]\ntype = compare\nvalues = 0:100:5\ntx_set = star, T\nrx_set = delta\nmethod = monolithic\n"
      "[line]\nsweep = 30, 1k\nimpedances = 50+5j, 60, 70-1j\n[output]\ncomplex = re-im\n");
  CHECK(s.experiment.load_values == std::vector<double>{0, 25, 50, 75, 100});
  CHECK(s.experiment.tx_set == std::vector<Topology>{Topology::Star, Topology::T});
  CHECK(s.experiment.rx_set == std::vector<Topology>{Topology::Triangle});
  CHECK(s.experiment.method == cascade::Method::Monolithic);
  CHECK(s.line_sweep == std::vector<double>{30, 1000});
  CHECK(s.link.line[0] == Complex(50, 5));
  CHECK(s.link.line[2] == Complex(70, -1));
  CHECK(s.output.raw_complex);
  CHECK(parse_scenario("[experiment]\nfull = true\n").experiment.rx_set.size() == 3);
}

TEST_CASE("round trip: parse(print(spec)) == spec") {
  testing::Rng rng(8080);
  const char* topo[] = {"star", "triangle", "T"};
  const char* kinds[] = {"tf", "load-sweep", "line-sweep", "compare", "tolerance-mc"};
  for (int n = 0; n < 60; ++n) {
    std::vector<std::string> ov{
        std::string("tx.topology=") + topo[1 + rng.index(2)],
        std::string("rx.topology=") + topo[rng.index(3)],
        "tx.capacitance=" + format_number(rng.log_uniform(1e-9, 1e-6)),
        "rx.cm_coupling=" + format_number(rng.uniform(0.5, 0.99)),
        "tx.impedances=" + format_complex(rng.complex(1, 100, -10, 10)),
        "line.impedances=" + format_complex(rng.complex(1, 300, -30, 30)) + ", 50, " + format_number(rng.uniform(1, 99)),
        "frequency.points=" + std::to_string(2 + rng.index(50)),
        "frequency.scale=" + std::string(rng.unit() < 0.5 ? "log" : "linear"),
        std::string("experiment.type=") + kinds[rng.index(5)],
        "experiment.seed=" + std::to_string(rng.index(100000)),
        "experiment.tolerance=" + format_number(rng.uniform(0, 0.5)),
        "rx.protection_bypass=" + std::string(rng.unit() < 0.5 ? "true" : "false"),
        "output.directory=out" + std::to_string(n),
    };
    const auto spec = parse_scenario("", ov);
    const std::string text = print_scenario(spec);
    const auto back = parse_scenario(text);
    CHECK(back == spec);
    CHECK(print_scenario(back) == text);
  }
}
