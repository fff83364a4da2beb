#include "couplerlab/si_units.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <string>

namespace couplerlab {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Leading numeric part, followed by an optional suffix which must be
// recognised in full.
std::optional<double> parse_real(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{}) return std::nullopt;
  const std::string suffix = lower(std::string_view(ptr, text.data() + text.size() - ptr));
  double scale = 1.0;
  if (suffix.empty()) {
    scale = 1.0;
  } else if (suffix == "meg") {
    scale = 1e6;
  } else if (suffix.size() == 1) {
    switch (suffix[0]) {
      case 'f': scale = 1e-15; break;
      case 'p': scale = 1e-12; break;
      case 'n': scale = 1e-9; break;
      case 'u': scale = 1e-6; break;
      case 'm': scale = 1e-3; break;
      case 'k': scale = 1e3; break;
      case 'g': scale = 1e9; break;
      case 't': scale = 1e12; break;
      default: return std::nullopt;
    }
  } else {
    return std::nullopt;
  }
  const double out = value * scale;
  if (!std::isfinite(out)) return std::nullopt;
  return out;
}

}  // namespace

std::optional<double> parse_si(std::string_view text) { return parse_real(text); }

std::optional<Complex> parse_complex(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  const bool imaginary = text.back() == 'j' || text.back() == 'J';
  if (!imaginary) {
    auto re = parse_real(text);
    if (!re) return std::nullopt;
    return Complex(*re, 0.0);
  }
  std::string_view body = text.substr(0, text.size() - 1);
  // Split at the last sign that is not part of an exponent and not leading.
  std::size_t split = std::string_view::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    const char c = body[i];
    if ((c == '+' || c == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  if (split == std::string_view::npos) {
    if (body.empty() || body == "+") return Complex(0.0, 1.0);
    if (body == "-") return Complex(0.0, -1.0);
    auto im = parse_real(body);
    if (!im) return std::nullopt;
    return Complex(0.0, *im);
  }
  auto re = parse_real(body.substr(0, split));
  std::string_view im_text = body.substr(split);
  std::optional<double> im;
  if (im_text == "+") im = 1.0;
  else if (im_text == "-") im = -1.0;
  else if (im_text.front() == '-') {
    auto v = parse_real(im_text.substr(1));
    if (v) im = -*v;
  } else {
    im = parse_real(im_text);
  }
  if (!re || !im) return std::nullopt;
  return Complex(*re, *im);
}

std::string format_number(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf.data(), ptr);
}

std::string format_number(double value, int significant_digits) {
  std::array<char, 64> buf{};
  auto [ptr, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, significant_digits);
  if (ec != std::errc{}) return "nan";
  return std::string(buf.data(), ptr);
}

std::string format_complex(Complex value) {
  if (value.imag() == 0.0) return format_number(value.real());
  std::string out = format_number(value.real());
  const double im = value.imag();
  if (!(im < 0.0) && !std::signbit(im)) out += "+";
  out += format_number(im);
  out += "j";
  return out;
}

std::string format_frequency(double hz) { return format_number(hz, 6) + " Hz"; }

}  // namespace couplerlab
