#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "couplerlab/report.hpp"
#include "couplerlab/si_units.hpp"
#include "test_support.hpp"

using namespace couplerlab;
using namespace couplerlab::report;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::size_t s = 0;
    for (;;) {
      auto c = line.find(',', s);
      cells.push_back(line.substr(s, c == std::string::npos ? std::string::npos : c - s));
      if (c == std::string::npos) break;
      s = c + 1;
    }
    rows.push_back(cells);
  }
  return rows;
}

std::size_t count_lines(const std::string& text, char kind) {
  std::size_t n = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto sp = line.find(' ');
    if (sp != std::string::npos && sp + 2 < line.size() && line[sp + 1] == kind && line[sp + 2] == ' ') ++n;
  }
  return n;
}

ScenarioSpec small(std::string_view extra, std::vector<std::string> ov = {}) {
  ov.push_back("frequency.points=9");
  return parse_scenario(extra, ov);
}

}  // namespace

TEST_CASE("tf on a matched ideal star/star gives constant oracle columns") {
  const auto spec = small(
      "experiment = tf\n[tx]\ntopology = star\nmimo = 3x3\npass_through = true\n"
      "[rx]\ntopology = star\npass_through = true\n[line]\nimpedances = 0\n");
  const auto bundle = run(spec, 1);
  const auto* csv = bundle.find("transfer.csv");
  REQUIRE(csv);
  const auto rows = parse_csv(csv->content);
  REQUIRE(rows.size() == 10);
  CHECK(rows[0][0] == "frequency_hz");
  CHECK(rows[0][1] == "H_rx1_tx1_db");
  CHECK(rows[0][2] == "H_rx1_tx1_deg");
  CHECK(rows[0].back() == "cascade_fallback");
  // Unit source on line 1 of a matched star: S = (1/3, -1/6, -1/6) V.
  const double expect_db[3] = {20 * std::log10(1.0 / 3.0), 20 * std::log10(1.0 / 6.0), 20 * std::log10(1.0 / 6.0)};
  const double expect_deg[3] = {0.0, 180.0, 180.0};
  for (std::size_t r = 1; r < rows.size(); ++r)
    for (std::size_t o = 0; o < 3; ++o) {
      const std::size_t col = 1 + 2 * (o * 3 + 0);
      CHECK(*parse_si(rows[r][col]) == doctest::Approx(expect_db[o]).epsilon(1e-10));
      CHECK(std::abs(*parse_si(rows[r][col + 1])) == doctest::Approx(expect_deg[o]).epsilon(1e-10));
    }
}

TEST_CASE("raw complex columns") {
  const auto spec = small("experiment = tf\n[output]\ncomplex = re-im\n");
  const auto rows = parse_csv(run(spec, 1).find("transfer.csv")->content);
  CHECK(rows[0][1] == "H_rx1_tx1_re");
  CHECK(rows[0][2] == "H_rx1_tx1_im");
  CHECK(rows[0].size() == 1 + 2 * 4 * 2 + 1);
}

TEST_CASE("compare bundle ranks star-T first") {
  const auto spec = small("experiment = compare\n[experiment]\nfull = true\n", {"frequency.points=61"});
  const auto bundle = run(spec, 0);
  const auto rows = parse_csv(bundle.find("compare_ranking.csv")->content);
  REQUIRE(rows.size() == 10);
  CHECK(rows[0] == std::vector<std::string>{"rank", "configuration", "tx", "rx", "feasible", "mean_passband_db"});
  CHECK(rows[1][1] == "ST");
  CHECK(rows[1][4] == "false");
  CHECK(bundle.find("compare_curves.csv"));
}

TEST_CASE("load sweep csv marks undefined ratios") {
  const auto spec = small(
      "experiment = load-sweep\n[tx]\ntopology = star\nmimo = 3x3\npass_through = true\nsources = 1, 1, 1\n"
      "[rx]\ntopology = star\npass_through = true\n[line]\nimpedances = 0\n[experiment]\nvalues = 0, 50, 100\n");
  const auto rows = parse_csv(run(spec, 1).find("load_sweep.csv")->content);
  CHECK(rows[0] == std::vector<std::string>{"Za_ohm", "S_a_pct", "S_b_pct", "S_c_pct"});
  CHECK(rows[1][1] == "undefined");
}

TEST_CASE("manifest reruns to identical files, independent of threads") {
  for (const char* kind : {"tf", "load-sweep", "line-sweep", "compare", "tolerance-mc"}) {
    CAPTURE(kind);
    const auto spec = small("", {std::string("experiment.type=") + kind, "experiment.trials=6"});
    const auto first = run(spec, 1);
    const auto again = run(parse_scenario(first.find("manifest.ini")->content), 3);
    REQUIRE(first.files.size() == again.files.size());
    for (std::size_t i = 0; i < first.files.size(); ++i) {
      CHECK(first.files[i].name == again.files[i].name);
      CHECK(first.files[i].content == again.files[i].content);
    }
  }
}

TEST_CASE("emitted netlists") {
  ScenarioSpec spec;
  spec.link.rx.topology = coupler::Topology::Star;
  const std::string rx = emit_netlist(spec, NetlistPart::Rx);
  CHECK(count_lines(rx, 'C') == 3);
  CHECK(count_lines(rx, 'K') == 4);
  CHECK(rx.find(".port rx1") != std::string::npos);
  const std::string full = emit_netlist(spec, NetlistPart::Link);
  std::size_t line = 0;
  for (std::size_t p = full.find("\nline.Z"); p != std::string::npos; p = full.find("\nline.Z", p + 1)) ++line;
  CHECK(line == 3);
  const std::vector<std::string> ov{"tx.pass_through=true", "rx.pass_through=true", "tx.mimo=2x3"};
  auto ideal = parse_scenario("", ov);
  const std::string pt = emit_netlist(ideal, NetlistPart::Link);
  CHECK(count_lines(pt, 'C') == 0);
  CHECK(count_lines(pt, 'X') > 0);
}

TEST_CASE("bundle files are written in place without leftovers") {
  const auto dir = std::filesystem::temp_directory_path() / "couplerlab_bundle_test";
  std::filesystem::remove_all(dir);
  ResultBundle b;
  b.files = {{"a.csv", "x,y\n1,2\n"}, {"manifest.ini", "[output]\n"}};
  write_bundle(b, dir / "nested");
  std::ifstream in(dir / "nested" / "a.csv");
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "x,y\n1,2\n");
  std::size_t n = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir / "nested")) ++n;
  CHECK(n == 2);
  std::filesystem::remove_all(dir);
}
