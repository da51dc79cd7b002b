#pragma once

#include <string>
#include <vector>

namespace bulge {

// One measured load-deflection sample, SI units (Pa, m).
struct PressureDeflectionSample {
  double pressure;
  double deflection;
};

// An ordered pressure-deflection sweep. Pressures must be strictly
// increasing and non-negative, deflections non-negative. The trivial state
// (P = 0, h = 0) is implied and need not be stored; if present it must be the
// first sample.
struct PressureDeflectionCurve {
  std::vector<PressureDeflectionSample> samples;
  std::string label;

  explicit PressureDeflectionCurve(std::vector<PressureDeflectionSample> points,
                                   std::string curve_label = "");

  std::size_t size() const { return samples.size(); }
  double max_deflection() const;
};

}  // namespace bulge
