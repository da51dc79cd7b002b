#include "bulge/units.hpp"

#include <cctype>
#include <charconv>

#include "bulge/errors.hpp"

namespace bulge::units {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_with(std::string_view text, double (*factor)(std::string_view),
                  double fallback_factor) {
  std::string_view s = trim(text);
  require(!s.empty(), ErrorCode::ParseError, "empty quantity");

  // Split at the first character that cannot belong to a number.
  std::size_t split = s.size();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    const bool numeric = std::isdigit(static_cast<unsigned char>(c)) || c == '.' ||
                         c == '+' || c == '-' ||
                         ((c == 'e' || c == 'E') && i + 1 < s.size() &&
                          (std::isdigit(static_cast<unsigned char>(s[i + 1])) ||
                           s[i + 1] == '+' || s[i + 1] == '-'));
    if (!numeric) {
      split = i;
      break;
    }
  }

  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + split, value);
  require(ec == std::errc{} && ptr == s.data() + split, ErrorCode::ParseError,
          "malformed quantity '" + std::string(text) + "'");

  const std::string_view unit = trim(s.substr(split));
  return unit.empty() ? value * fallback_factor : value * factor(unit);
}

}  // namespace

double pressure_factor(std::string_view unit) {
  if (unit == "Pa") return 1.0;
  if (unit == "kPa") return 1e3;
  if (unit == "MPa") return 1e6;
  if (unit == "GPa") return 1e9;
  if (unit == "mbar") return 100.0;
  if (unit == "bar") return 1e5;
  fail(ErrorCode::UnitError, "unknown pressure unit '" + std::string(unit) +
                                 "' (expected Pa, kPa, MPa, GPa, mbar or bar)");
}

double length_factor(std::string_view unit) {
  if (unit == "m") return 1.0;
  if (unit == "mm") return 1e-3;
  if (unit == "um") return 1e-6;
  if (unit == "nm") return 1e-9;
  fail(ErrorCode::UnitError,
       "unknown length unit '" + std::string(unit) + "' (expected m, mm, um or nm)");
}

double parse_pressure(std::string_view text, double fallback_factor) {
  return parse_with(text, &pressure_factor, fallback_factor);
}

double parse_length(std::string_view text, double fallback_factor) {
  return parse_with(text, &length_factor, fallback_factor);
}

}  // namespace bulge::units
