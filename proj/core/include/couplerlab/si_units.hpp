#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "couplerlab/dense.hpp"

namespace couplerlab {

// Parses "100n", "1meg", "2.2k", "50" ...  Suffixes are case-insensitive:
// f p n u m k meg g t (m is milli, meg is mega).  Returns nullopt on junk.
std::optional<double> parse_si(std::string_view text);

// Complex literal: "50", "50+10j", "-3.3j", "1e-3-2e-3j"; suffixes apply to
// each part ("1k+2kj" is accepted).
std::optional<Complex> parse_complex(std::string_view text);

// Shortest representation that parses back to exactly the same double.
// Independent of the global C/C++ locale.
std::string format_number(double value);
// Fixed significant digits, still locale independent.
std::string format_number(double value, int significant_digits);
std::string format_complex(Complex value);
// "1e+07 Hz" style label for messages.
std::string format_frequency(double hz);

std::string_view trim(std::string_view s);

}  // namespace couplerlab
