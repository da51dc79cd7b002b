#pragma once

#include <string>
#include <string_view>

namespace bulge::units {

// Multiplier that converts a value in `unit` to pascals.
// Accepted: Pa, kPa, MPa, GPa, mbar, bar. Throws Error(UnitError) otherwise.
double pressure_factor(std::string_view unit);

// Multiplier that converts a value in `unit` to metres.
// Accepted: m, mm, um, nm. Throws Error(UnitError) otherwise.
double length_factor(std::string_view unit);

// Parses "90nm", "1.5 bar", "3.2e-4" (bare numbers use `fallback_factor`).
// The factor function decides which unit family is legal.
double parse_pressure(std::string_view text, double fallback_factor = 1.0);
double parse_length(std::string_view text, double fallback_factor = 1.0);

}  // namespace bulge::units
