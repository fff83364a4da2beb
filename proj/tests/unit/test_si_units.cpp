#include <doctest.h>

#include <clocale>
#include <locale>

#include "couplerlab/si_units.hpp"

using namespace couplerlab;

TEST_CASE("si suffixes") {
  CHECK(*parse_si("100n") == doctest::Approx(1e-7).epsilon(1e-15));
  CHECK(*parse_si("1meg") == 1e6);
  CHECK(*parse_si("1MEG") == 1e6);
  CHECK(*parse_si("2.2k") == 2200.0);
  CHECK(*parse_si("1m") == 1e-3);
  CHECK(*parse_si("50") == 50.0);
  CHECK(*parse_si("  3u ") == doctest::Approx(3e-6));
  CHECK(*parse_si("1e-3") == 1e-3);
  CHECK(*parse_si("10p") == doctest::Approx(1e-11));
  CHECK(*parse_si("1f") == doctest::Approx(1e-15));
  CHECK(*parse_si("2g") == 2e9);
  CHECK(*parse_si("1t") == 1e12);
  CHECK_FALSE(parse_si("1x"));
  CHECK_FALSE(parse_si("abc"));
  CHECK_FALSE(parse_si(""));
  CHECK_FALSE(parse_si("1,5"));
  CHECK_FALSE(parse_si("1mm"));
}

TEST_CASE("complex literals") {
  CHECK(*parse_complex("50") == Complex(50, 0));
  CHECK(*parse_complex("50+10j") == Complex(50, 10));
  CHECK(*parse_complex("-3j") == Complex(0, -3));
  CHECK(*parse_complex("1e-3-2e-3j") == Complex(1e-3, -2e-3));
  CHECK(*parse_complex("1k+2kj") == Complex(1000, 2000));
  CHECK(*parse_complex("j") == Complex(0, 1));
  CHECK_FALSE(parse_complex("50+j10"));
  CHECK_FALSE(parse_complex("1+2"));
}

TEST_CASE("formatting round-trips exactly") {
  for (double v : {0.1, 1.0 / 3.0, 1e-7, 299792458.0, -2.5e-300, 6.02214076e23}) {
    CHECK(*parse_si(format_number(v)) == v);
  }
  const Complex z(50.25, -1.0 / 7.0);
  CHECK(*parse_complex(format_complex(z)) == z);
  CHECK(format_complex(Complex(50, 0)) == "50");
  CHECK(format_number(0.5, 3) == "0.5");
  CHECK(format_number(1.0 / 3.0, 4) == "0.3333");
}

TEST_CASE("formatting ignores the global locale") {
  const char* previous = std::setlocale(LC_ALL, nullptr);
  const std::string saved = previous ? previous : "C";
  bool switched = false;
  for (const char* name : {"de_DE.UTF-8", "de_DE.utf8", "fr_FR.UTF-8", "de_DE"}) {
    if (std::setlocale(LC_ALL, name)) {
      switched = true;
      break;
    }
  }
  try {
    std::locale::global(std::locale(std::setlocale(LC_ALL, nullptr)));
  } catch (const std::exception&) {
  }
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(1234.5, 6) == "1234.5");
  CHECK(*parse_si("0.25") == 0.25);
  std::setlocale(LC_ALL, saved.c_str());
  std::locale::global(std::locale::classic());
  if (!switched) MESSAGE("no comma-decimal locale installed; checked under the default locale only");
}
